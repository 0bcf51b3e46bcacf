#include "dbo/quadratic.hpp"

#include <cmath>

#include "dbo/errors.hpp"
#include "dbo/rng.hpp"

namespace dbo {

Evaluation evaluate(const BilevelProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) {
    check_dim(x, problem.dim_x(), "x");
    check_dim(y, problem.dim_y(), "y");
    return {problem.full_upper_loss(x, y), problem.accuracy(x, y)};
}

void check_batch(const Batch& ids, long limit) {
    if (ids.empty()) throw InvalidBatchError("batch of sample ids is empty");
    for (long id : ids)
        if (id < 0 || id >= limit)
            throw ShardViolationError("sample id " + std::to_string(id) +
                                      " outside the node's shard of size " +
                                      std::to_string(limit));
}

void check_dim(const Eigen::VectorXd& v, int expected, const char* what) {
    if (v.size() != expected)
        throw ShapeError(std::string(what) + " has dimension " + std::to_string(v.size()) +
                         ", expected " + std::to_string(expected));
}

Batch full_batch(long limit) {
    Batch ids(limit);
    for (long i = 0; i < limit; ++i) ids[i] = i;
    return ids;
}

namespace {

constexpr std::uint64_t kind_grad_x_f = 101;
constexpr std::uint64_t kind_grad_y_f = 102;
constexpr std::uint64_t kind_grad_y_g = 103;
constexpr std::uint64_t kind_hvp = 104;
constexpr std::uint64_t kind_jvp = 105;

}  // namespace

QuadraticBilevel::QuadraticBilevel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::VectorXd c,
                                   Eigen::VectorXd d_target, double rho, double noise_sigma,
                                   int node_count, long samples_per_node, double hetero_scale,
                                   std::uint64_t seed)
    : A_(std::move(A)),
      B_(std::move(B)),
      c_(std::move(c)),
      d_target_(std::move(d_target)),
      rho_(rho),
      noise_sigma_(noise_sigma),
      node_count_(node_count),
      samples_per_node_(samples_per_node),
      seed_(seed) {
    if (node_count_ < 1) throw ConfigError("node count must be at least 1");
    if (samples_per_node_ < 1) throw ConfigError("samples per node must be at least 1");
    if (rho_ <= 0.0) throw ConfigError("upper-level ridge weight must be positive");
    if (noise_sigma_ < 0.0) throw ConfigError("noise scale must be non-negative");
    const int dy = static_cast<int>(A_.rows());
    if (A_.cols() != dy || B_.rows() != dy || c_.size() != dy || d_target_.size() != dy)
        throw ShapeError("inconsistent quadratic problem dimensions");
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw AssumptionViolationError("lower-level Hessian must be symmetric");
    llt_.compute(A_);
    if (llt_.info() != Eigen::Success)
        throw AssumptionViolationError(
            "lower-level Hessian is not positive definite; the inner problem would not be "
            "strongly convex");

    // Node offsets in exactly cancelling pairs so the network-average lower
    // problem keeps the closed form bit-for-bit.
    offsets_.assign(node_count_, Eigen::VectorXd::Zero(dy));
    if (hetero_scale > 0.0) {
        for (int k = 0; k + 1 < node_count_; k += 2) {
            Rng rng(stream_seed(seed_, static_cast<std::uint64_t>(k), 0, purpose::init));
            Eigen::VectorXd delta(dy);
            for (int i = 0; i < dy; ++i) delta(i) = hetero_scale * rng.normal();
            offsets_[k] = delta;
            offsets_[k + 1] = -delta;
        }
    }
}

QuadraticBilevel QuadraticBilevel::random(const RandomSpec& spec) {
    if (spec.lambda_min <= 0.0 || spec.lambda_max < spec.lambda_min)
        throw ConfigError("require 0 < lambda_min <= lambda_max for the lower Hessian spectrum");
    Rng rng(stream_seed(spec.seed, 0, 0, purpose::init, 7));
    const int dy = spec.dim_y, dx = spec.dim_x;

    Eigen::MatrixXd G(dy, dy);
    for (int i = 0; i < dy; ++i)
        for (int j = 0; j < dy; ++j) G(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd spectrum(dy);
    for (int i = 0; i < dy; ++i)
        spectrum(i) = dy == 1 ? spec.lambda_min
                              : spec.lambda_min +
                                    (spec.lambda_max - spec.lambda_min) * i / (dy - 1.0);
    Eigen::MatrixXd A = Q * spectrum.asDiagonal() * Q.transpose();
    A = ((A + A.transpose()) / 2.0).eval();

    Eigen::MatrixXd B(dy, dx);
    for (int i = 0; i < dy; ++i)
        for (int j = 0; j < dx; ++j) B(i, j) = spec.coupling * rng.normal();
    Eigen::VectorXd c(dy), d(dy);
    for (int i = 0; i < dy; ++i) c(i) = rng.normal();
    for (int i = 0; i < dy; ++i) d(i) = rng.normal();

    return QuadraticBilevel(std::move(A), std::move(B), std::move(c), std::move(d), spec.rho,
                            spec.noise_sigma, spec.node_count, spec.samples_per_node,
                            spec.hetero_scale, spec.seed);
}

long QuadraticBilevel::sample_count(int k) const {
    if (k < 0 || k >= node_count_) throw ContractViolationError("node index out of range");
    return samples_per_node_;
}

// Per-sample noise: pairs (2m, 2m+1) carry opposite vectors, an odd tail
// sample carries zero, so any full ascending batch cancels exactly.
Eigen::VectorXd QuadraticBilevel::noise(int k, std::uint64_t kind, long id, int dim) const {
    if (samples_per_node_ % 2 == 1 && id == samples_per_node_ - 1)
        return Eigen::VectorXd::Zero(dim);
    const long pair = id / 2;
    const double sign = (id % 2 == 0) ? 1.0 : -1.0;
    Rng rng(stream_seed(seed_, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(pair),
                        kind));
    Eigen::VectorXd e(dim);
    for (int i = 0; i < dim; ++i) e(i) = sign * noise_sigma_ * rng.normal();
    return e;
}

Eigen::VectorXd QuadraticBilevel::batch_noise(int k, std::uint64_t kind, const Batch& ids,
                                              int dim) const {
    check_batch(ids, samples_per_node_);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
    if (noise_sigma_ == 0.0) return acc;
    for (long id : ids) acc += noise(k, kind, id, dim);
    return acc / static_cast<double>(ids.size());
}

Eigen::VectorXd QuadraticBilevel::grad_x_f(int k, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    return rho_ * x + batch_noise(k, kind_grad_x_f, ids, dim_x());
}

Eigen::VectorXd QuadraticBilevel::grad_y_f(int k, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    return y - d_target_ + batch_noise(k, kind_grad_y_f, ids, dim_y());
}

Eigen::VectorXd QuadraticBilevel::grad_y_g(int k, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, const Batch& ids) const {
    check_dim(x, dim_x(), "x");
    check_dim(y, dim_y(), "y");
    (void)sample_count(k);
    return A_ * y - B_ * x - (c_ + offsets_[k]) + batch_noise(k, kind_grad_y_g, ids, dim_y());
}

Eigen::VectorXd QuadraticBilevel::hvp_yy_g(int k, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, const Batch& ids,
                                           const Eigen::VectorXd& v) const {
    check_dim(v, dim_y(), "v");
    return A_ * v + batch_noise(k, kind_hvp, ids, dim_y());
}

Eigen::VectorXd QuadraticBilevel::jvp_xy_g(int k, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, const Batch& ids,
                                           const Eigen::VectorXd& v) const {
    check_dim(v, dim_y(), "v");
    return -B_.transpose() * v + batch_noise(k, kind_jvp, ids, dim_x());
}

double QuadraticBilevel::full_upper_loss(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& y) const {
    return 0.5 * (y - d_target_).squaredNorm() + 0.5 * rho_ * x.squaredNorm();
}

Eigen::VectorXd quadratic_oracle_y_star(const QuadraticBilevel& problem,
                                        const Eigen::VectorXd& x) {
    check_dim(x, problem.dim_x(), "x");
    const Eigen::VectorXd rhs = problem.B() * x + problem.c();
    Eigen::LLT<Eigen::MatrixXd> llt(problem.A());
    if (llt.info() != Eigen::Success)
        throw AssumptionViolationError("lower-level Hessian is not positive definite");
    const Eigen::VectorXd y = llt.solve(rhs);
    if ((problem.A() * y - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm()))
        throw AssumptionViolationError("inner solve residual too large; Hessian near-singular");
    return y;
}

Eigen::VectorXd quadratic_oracle_hypergrad(const QuadraticBilevel& problem,
                                           const Eigen::VectorXd& x) {
    const Eigen::VectorXd y_star = quadratic_oracle_y_star(problem, x);
    Eigen::LLT<Eigen::MatrixXd> llt(problem.A());
    const Eigen::VectorXd w = llt.solve(y_star - problem.d_target());
    return problem.rho() * x + problem.B().transpose() * w;
}

}  // namespace dbo
