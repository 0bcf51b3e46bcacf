#include "dbo/optim.hpp"

#include <cstddef>
#include <utility>

#include "dbo/errors.hpp"
#include "dbo/rng.hpp"

namespace dbo {

Algo algo_from_string(const std::string& name) {
    if (name == "mdbo") return Algo::mdbo;
    if (name == "vrdbo") return Algo::vrdbo;
    if (name == "dsbo") return Algo::dsbo;
    if (name == "gdsbo") return Algo::gdsbo;
    throw ConfigError("unknown algorithm: " + name);
}

std::string to_string(Algo algo) {
    switch (algo) {
        case Algo::mdbo: return "mdbo";
        case Algo::vrdbo: return "vrdbo";
        case Algo::dsbo: return "dsbo";
        case Algo::gdsbo: return "gdsbo";
    }
    throw ConfigError("unknown algorithm value");
}

void AlgoConfig::validate() const {
    if (!(eta > 0.0) || eta > 1.0) throw ConfigError("eta must lie in (0, 1]");
    if (!(beta1 > 0.0) || !(beta2 > 0.0)) throw ConfigError("beta1 and beta2 must be positive");
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0))
        throw ConfigError("alpha1 and alpha2 must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (init_batch < 1) throw ConfigError("init_batch must be positive");
    if (algo == Algo::mdbo || algo == Algo::gdsbo) {
        if (alpha1 * eta > 1.0 || alpha2 * eta > 1.0)
            throw ConfigError("momentum rates need alpha1*eta <= 1 and alpha2*eta <= 1");
    } else if (algo == Algo::vrdbo) {
        if (alpha1 * eta * eta > 1.0 || alpha2 * eta * eta > 1.0)
            throw ConfigError("estimator rates need alpha1*eta^2 <= 1 and alpha2*eta^2 <= 1");
    }
}

Eigen::MatrixXd mix_columns(const Eigen::MatrixXd& M, const MixingMatrix& W) {
    const Eigen::Index K = M.cols();
    if (W.weights.rows() != K || W.weights.cols() != K)
        throw ShapeError("mixing matrix size does not match the column count");
    Eigen::MatrixXd out(M.rows(), K);
    for (Eigen::Index k = 0; k < K; ++k) {
        Eigen::VectorXd acc = W.weights(0, k) * M.col(0);
        for (Eigen::Index j = 1; j < K; ++j) acc += W.weights(j, k) * M.col(j);
        out.col(k) = acc;
    }
    return out;
}

Eigen::VectorXd column_mean(const Eigen::MatrixXd& M) {
    if (M.cols() == 0) return Eigen::VectorXd::Zero(M.rows());
    Eigen::VectorXd acc = M.col(0);
    for (Eigen::Index k = 1; k < M.cols(); ++k) acc += M.col(k);
    return acc / static_cast<double>(M.cols());
}

double consensus_error(const Eigen::MatrixXd& M) {
    if (M.cols() == 0) return 0.0;
    const Eigen::VectorXd mean = column_mean(M);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < M.cols(); ++k) sum += (M.col(k) - mean).squaredNorm();
    return sum / static_cast<double>(M.cols());
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> mean_iterate(const SwarmState& state) {
    return {column_mean(state.X), column_mean(state.Y)};
}

namespace {

// One iteration's sample draw for one node: the upper-level batch, the
// truncation structure for the inverse-Hessian series, and the lower batch.
struct NodeDraw {
    Batch grad_ids;
    std::vector<Batch> hess_ids;
    Batch lower_ids;
};

NodeDraw draw_node(const BilevelProblem& problem, int k, std::uint64_t iter,
                   const HypergradParams& hyper, std::uint64_t seed, long batch) {
    NodeDraw d;
    Rng rng_xi(stream_seed(seed, static_cast<std::uint64_t>(k), iter, purpose::hyper_xi));
    d.grad_ids = draw_batch(problem.upper_sample_count(k), batch, rng_xi);
    Rng rng_zeta(stream_seed(seed, static_cast<std::uint64_t>(k), iter, purpose::hyper_zeta));
    d.hess_ids = draw_hypergrad_batches(problem, k, hyper, batch, rng_zeta);
    Rng rng_low(stream_seed(seed, static_cast<std::uint64_t>(k), iter, purpose::lower_batch));
    d.lower_ids = draw_batch(problem.sample_count(k), batch, rng_low);
    return d;
}

void check_finite(const SwarmState& state, long long iteration) {
    if (!(state.X.allFinite() && state.Y.allFinite() && state.U.allFinite() &&
          state.V.allFinite() && state.ZF.allFinite() && state.Zg.allFinite()))
        throw DivergenceError("non-finite parameter", iteration);
}

}  // namespace

SwarmState init_state(const BilevelProblem& problem, const MixingMatrix& W,
                      const AlgoConfig& cfg, const HypergradParams& hyper, std::uint64_t seed,
                      const Eigen::VectorXd& x0, const Eigen::VectorXd& y0) {
    cfg.validate();
    const int K = problem.node_count();
    if (W.weights.rows() != K || W.weights.cols() != K)
        throw ShapeError("mixing matrix size does not match the node count");
    const Eigen::VectorXd x =
        x0.size() == 0 ? Eigen::VectorXd::Zero(problem.dim_x()).eval() : x0;
    const Eigen::VectorXd y =
        y0.size() == 0 ? Eigen::VectorXd::Zero(problem.dim_y()).eval() : y0;
    check_dim(x, problem.dim_x(), "x0");
    check_dim(y, problem.dim_y(), "y0");

    SwarmState state;
    state.X = x.replicate(1, K);
    state.Y = y.replicate(1, K);
    state.U.resize(problem.dim_x(), K);
    state.V.resize(problem.dim_y(), K);
    state.counters.assign(static_cast<std::size_t>(K), Counters{});
    state.pending.assign(static_cast<std::size_t>(K), Counters{});

    const long batch = cfg.algo == Algo::vrdbo ? cfg.init_batch : cfg.batch_size;
    for (int k = 0; k < K; ++k) {
        const NodeDraw d = draw_node(problem, k, 0, hyper, seed, batch);
        HypergradCost cost;
        state.U.col(k) =
            estimate_hypergrad(problem, k, x, y, d.grad_ids, d.hess_ids, hyper, &cost);
        state.V.col(k) = problem.grad_y_g(k, x, y, d.lower_ids);
        Counters& p = state.pending[static_cast<std::size_t>(k)];
        p.grad_evals = (cost.grad_evals + 1) * batch;
        p.jvp_evals = cost.jvp_evals;
        p.hvp_evals = cost.hvp_evals;
    }
    state.ZF = state.U;
    state.Zg = state.V;
    state.prev_X = state.X;
    state.prev_Y = state.Y;
    state.prev_U = state.U;
    state.prev_V = state.V;
    check_finite(state, 0);
    return state;
}

void step(SwarmState& state, const BilevelProblem& problem, const MixingMatrix& W,
          const AlgoConfig& cfg, const HypergradParams& hyper, std::uint64_t seed) {
    cfg.validate();
    const int K = problem.node_count();
    if (state.X.cols() != K || state.counters.size() != static_cast<std::size_t>(K))
        throw ContractViolationError("state does not match the problem's node count");
    const long long t = state.t;
    const double eta = cfg.eta;

    const Eigen::MatrixXd U_old = state.U;
    const Eigen::MatrixXd V_old = state.V;

    if (t == 0) {
        // The initialization draws are this iteration's estimates; charge them.
        for (int k = 0; k < K; ++k) {
            Counters& c = state.counters[static_cast<std::size_t>(k)];
            Counters& p = state.pending[static_cast<std::size_t>(k)];
            c.grad_evals += p.grad_evals;
            c.jvp_evals += p.jvp_evals;
            c.hvp_evals += p.hvp_evals;
            p = Counters{};
        }
    } else {
        const double a1 = cfg.alpha1 * eta;
        const double a2 = cfg.alpha2 * eta;
        const double r1 = cfg.alpha1 * eta * eta;
        const double r2 = cfg.alpha2 * eta * eta;
        for (int k = 0; k < K; ++k) {
            const NodeDraw d = draw_node(problem, k, static_cast<std::uint64_t>(t), hyper,
                                         seed, cfg.batch_size);
            HypergradCost cost;
            const Eigen::VectorXd delta_f = estimate_hypergrad(
                problem, k, state.X.col(k), state.Y.col(k), d.grad_ids, d.hess_ids, hyper,
                &cost);
            const Eigen::VectorXd delta_g =
                problem.grad_y_g(k, state.X.col(k), state.Y.col(k), d.lower_ids);
            long long grad_batches = cost.grad_evals + 1;

            switch (cfg.algo) {
                case Algo::mdbo:
                case Algo::gdsbo:
                    state.U.col(k) = (1.0 - a1) * U_old.col(k) + a1 * delta_f;
                    state.V.col(k) = (1.0 - a2) * V_old.col(k) + a2 * delta_g;
                    break;
                case Algo::dsbo:
                    state.U.col(k) = delta_f;
                    state.V.col(k) = delta_g;
                    break;
                case Algo::vrdbo: {
                    if (state.prev_X.size() == 0 || state.prev_Y.size() == 0)
                        throw ContractViolationError(
                            "variance-reduced step needs the previous iterate snapshot");
                    // Replay this step's exact draw (batches and truncation
                    // level) at the previous iterate.
                    HypergradCost prev_cost;
                    const Eigen::VectorXd prev_f = estimate_hypergrad(
                        problem, k, state.prev_X.col(k), state.prev_Y.col(k), d.grad_ids,
                        d.hess_ids, hyper, &prev_cost);
                    const Eigen::VectorXd prev_g = problem.grad_y_g(
                        k, state.prev_X.col(k), state.prev_Y.col(k), d.lower_ids);
                    state.U.col(k) =
                        (1.0 - r1) * (U_old.col(k) + delta_f - prev_f) + r1 * delta_f;
                    state.V.col(k) =
                        (1.0 - r2) * (V_old.col(k) + delta_g - prev_g) + r2 * delta_g;
                    grad_batches += prev_cost.grad_evals + 1;
                    cost.jvp_evals += prev_cost.jvp_evals;
                    cost.hvp_evals += prev_cost.hvp_evals;
                    break;
                }
            }
            Counters& c = state.counters[static_cast<std::size_t>(k)];
            c.grad_evals += grad_batches * cfg.batch_size;
            c.jvp_evals += cost.jvp_evals;
            c.hvp_evals += cost.hvp_evals;
        }
    }

    if (cfg.algo == Algo::mdbo || cfg.algo == Algo::vrdbo) {
        if (t > 0) {
            state.ZF = mix_columns(state.ZF, W) + state.U - U_old;
            state.Zg = mix_columns(state.Zg, W) + state.V - V_old;
        }
        const Eigen::MatrixXd XW = mix_columns(state.X, W);
        const Eigen::MatrixXd YW = mix_columns(state.Y, W);
        Eigen::MatrixXd newX = state.X - eta * (state.X - XW) - cfg.beta1 * eta * state.ZF;
        Eigen::MatrixXd newY = state.Y - eta * (state.Y - YW) - cfg.beta2 * eta * state.Zg;
        state.prev_X = std::move(state.X);
        state.prev_Y = std::move(state.Y);
        state.X = std::move(newX);
        state.Y = std::move(newY);
    } else {
        Eigen::MatrixXd newX = mix_columns(state.X, W) - cfg.beta1 * eta * state.U;
        Eigen::MatrixXd newY = mix_columns(state.Y, W) - cfg.beta2 * eta * state.V;
        state.prev_X = std::move(state.X);
        state.prev_Y = std::move(state.Y);
        state.X = std::move(newX);
        state.Y = std::move(newY);
    }
    for (auto& c : state.counters) c.comm_rounds += 1;
    state.prev_U = U_old;
    state.prev_V = V_old;
    state.t = t + 1;
    check_finite(state, t);
}

}  // namespace dbo
