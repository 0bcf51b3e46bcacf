#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dbo {

using Batch = std::vector<long>;

// Per-node stochastic oracle view of a bilevel problem
//
//   min_x (1/K) sum_k f_k(x, y*(x))   s.t.   y*(x) = argmin_y (1/K) sum_k g_k(x, y).
//
// All oracles are deterministic functions of (k, x, y, ids): replaying a batch
// reproduces bit-identical output, which the variance-reduced optimizer relies
// on when it re-evaluates the previous iterate on the current batch.  Upper
// (f-side) batches index [0, upper_sample_count(k)); lower (g-side) batches
// index [0, sample_count(k)).
class BilevelProblem {
  public:
    virtual ~BilevelProblem() = default;

    virtual int dim_x() const = 0;
    virtual int dim_y() const = 0;
    virtual int node_count() const = 0;
    virtual long sample_count(int k) const = 0;
    virtual long upper_sample_count(int k) const { return sample_count(k); }

    virtual Eigen::VectorXd grad_x_f(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Batch& ids) const = 0;
    virtual Eigen::VectorXd grad_y_f(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Batch& ids) const = 0;
    virtual Eigen::VectorXd grad_y_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Batch& ids) const = 0;
    // Action of the per-node lower Hessian blocks on v: yy-block maps d_y -> d_y,
    // xy-block maps d_y -> d_x.
    virtual Eigen::VectorXd hvp_yy_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Batch& ids, const Eigen::VectorXd& v) const = 0;
    virtual Eigen::VectorXd jvp_xy_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Batch& ids, const Eigen::VectorXd& v) const = 0;

    virtual double full_upper_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const = 0;
    virtual std::optional<double> accuracy(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const {
        return std::nullopt;
    }
};

struct Evaluation {
    double upper_loss = 0.0;
    std::optional<double> accuracy;
};

Evaluation evaluate(const BilevelProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y);

// Throws InvalidBatchError / ShardViolationError / ShapeError respectively.
void check_batch(const Batch& ids, long limit);
void check_dim(const Eigen::VectorXd& v, int expected, const char* what);

// Full batch 0..limit-1 in ascending order.
Batch full_batch(long limit);

}  // namespace dbo
