#pragma once

#include "dbo/ingest.hpp"
#include "dbo/problem.hpp"

namespace dbo {

// Hyperparameter optimization of softmax logistic regression:
//
//   lower  g_k(x, y) = mean cross-entropy on node k's training shard
//                      + (1/(c d)) sum_{p,q} exp(x_q) y_pq^2
//   upper  f_k(x, y) = mean cross-entropy on node k's validation shard
//
// x in R^d holds per-feature log regularization weights, y in R^{d x c} holds
// the classifier, flattened column-major over classes: y_pq sits at q*c + p.
// The upper loss has no direct x dependence, so grad_x_f is zero.  Upper
// batches index the node's validation shard, lower batches its training shard.
class HyperLogRegProblem : public BilevelProblem {
  public:
    HyperLogRegProblem(Dataset train, Dataset val, ShardPlan train_plan, ShardPlan val_plan);

    int dim_x() const override { return d_; }
    int dim_y() const override { return d_ * c_; }
    int node_count() const override { return train_plan_.node_count; }
    long sample_count(int k) const override;
    long upper_sample_count(int k) const override;

    Eigen::VectorXd grad_x_f(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Batch& ids) const override;
    Eigen::VectorXd grad_y_f(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Batch& ids) const override;
    Eigen::VectorXd grad_y_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Batch& ids) const override;
    Eigen::VectorXd hvp_yy_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Batch& ids, const Eigen::VectorXd& v) const override;
    Eigen::VectorXd jvp_xy_g(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Batch& ids, const Eigen::VectorXd& v) const override;

    double full_upper_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const override;
    std::optional<double> accuracy(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y) const override;

    // Full lower objective over node k's training shard (for brute-force
    // verification and inner-minimizer oracles).
    double lower_loss(int k, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  private:
    long global_train_id(int k, long local) const;
    long global_val_id(int k, long local) const;

    Dataset train_, val_;
    ShardPlan train_plan_, val_plan_;
    std::vector<std::vector<long>> train_ids_, val_ids_;
    int d_ = 0;
    int c_ = 0;
};

}  // namespace dbo
