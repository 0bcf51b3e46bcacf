#include "dbo/hypergrad.hpp"

#include <cmath>

#include "dbo/errors.hpp"

namespace dbo {

namespace {

void validate(const HypergradParams& params) {
    if (params.J < 0) throw ConfigError("neumann_j must be non-negative");
    if (params.l_gy <= 0.0) throw ConfigError("l_gy must be positive");
    if (params.mu < 0.0) throw ConfigError("mu must be non-negative");
    if (params.mu > params.l_gy)
        throw ConfigError("mu must not exceed l_gy; the Neumann contraction would be invalid");
}

}  // namespace

long sample_truncation(long J, Rng& rng) {
    if (J < 0) throw ContractViolationError("truncation range must be non-negative");
    if (J == 0) return 0;
    return static_cast<long>(rng.uniform_int(0, static_cast<std::uint64_t>(J)));
}

Batch draw_batch(long population, long batch_size, Rng& rng) {
    if (population < 1) throw InvalidBatchError("cannot sample from an empty shard");
    if (batch_size < 1) throw InvalidBatchError("batch size must be positive");
    Batch ids(batch_size);
    for (long i = 0; i < batch_size; ++i)
        ids[i] = static_cast<long>(rng.uniform_int(0, static_cast<std::uint64_t>(population - 1)));
    return ids;
}

std::vector<Batch> draw_hypergrad_batches(const BilevelProblem& problem, int k,
                                          const HypergradParams& params, long batch_size,
                                          Rng& rng) {
    validate(params);
    const long jt = params.J == 0 ? 0 : sample_truncation(params.J - 1, rng);
    std::vector<Batch> batches;
    batches.reserve(jt + 1);
    const long population = problem.sample_count(k);
    for (long j = 0; j <= jt; ++j) batches.push_back(draw_batch(population, batch_size, rng));
    return batches;
}

Eigen::VectorXd estimate_hypergrad(const BilevelProblem& problem, int k,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const Batch& grad_ids, const std::vector<Batch>& hess_ids,
                                   const HypergradParams& params, HypergradCost* cost) {
    validate(params);
    if (hess_ids.empty())
        throw ContractViolationError("hess_ids must hold at least the Jacobian batch");
    const long jt = static_cast<long>(hess_ids.size()) - 1;
    if (jt > params.J)
        throw ContractViolationError("truncation level " + std::to_string(jt) +
                                     " exceeds the series length " + std::to_string(params.J));

    const Eigen::VectorXd gx = problem.grad_x_f(k, x, y, grad_ids);
    Eigen::VectorXd v = problem.grad_y_f(k, x, y, grad_ids);
    for (long j = 1; j <= jt; ++j) v -= problem.hvp_yy_g(k, x, y, hess_ids[j], v) / params.l_gy;
    const Eigen::VectorXd jv = problem.jvp_xy_g(k, x, y, hess_ids[0], v);
    if (cost) {
        cost->grad_evals += 2;
        cost->hvp_evals += jt;
        cost->jvp_evals += 1;
    }
    return gx - (static_cast<double>(params.J) / params.l_gy) * jv;
}

Eigen::VectorXd estimate_hypergrad(const BilevelProblem& problem, int k,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const Batch& grad_ids, long batch_size,
                                   const HypergradParams& params, Rng& rng,
                                   HypergradCost* cost) {
    const auto hess_ids = draw_hypergrad_batches(problem, k, params, batch_size, rng);
    return estimate_hypergrad(problem, k, x, y, grad_ids, hess_ids, params, cost);
}

Eigen::VectorXd exact_neumann_apply(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hvp_full,
    const Eigen::VectorXd& v, const HypergradParams& params) {
    validate(params);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(v.size());
    Eigen::VectorXd term = v;
    for (int j = 0; j < params.J; ++j) {
        acc += term;
        term -= hvp_full(term) / params.l_gy;
    }
    return acc / params.l_gy;
}

double bias_bound(double C_gxy, double C_fy, double mu, double L_gy, long J) {
    if (C_gxy <= 0.0 || C_fy <= 0.0 || mu <= 0.0 || L_gy <= 0.0)
        throw ContractViolationError("bias bound requires positive constants");
    if (mu > L_gy) throw ContractViolationError("bias bound requires mu <= L_gy");
    if (J < 0) throw ContractViolationError("bias bound requires J >= 0");
    return C_gxy * C_fy / mu * std::pow(1.0 - mu / L_gy, static_cast<double>(J));
}

}  // namespace dbo
