#pragma once

#include <cstdint>

#include "dbo/problem.hpp"

namespace dbo {

// Synthetic verification instance with closed-form solutions:
//
//   f_k(x, y) = 1/2 ||y - d_target||^2 + rho/2 ||x||^2
//   g_k(x, y) = 1/2 y'Ay - y'(Bx + c_k),   c_k = c + delta_k,  sum_k delta_k = 0
//
// so y*(x) = A^{-1}(Bx + c) and grad F(x) = rho x + B'A^{-1}(y*(x) - d_target).
// Stochastic queries add per-sample Gaussian noise that is a pure function of
// (node, query kind, sample id); noise vectors cancel pairwise across each
// node's shard, so full-batch evaluations reproduce the deterministic values
// exactly while mini-batches see unbiased noise of scale noise_sigma.
class QuadraticBilevel : public BilevelProblem {
  public:
    QuadraticBilevel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::VectorXd c,
                     Eigen::VectorXd d_target, double rho, double noise_sigma, int node_count,
                     long samples_per_node, double hetero_scale = 0.0, std::uint64_t seed = 0);

    struct RandomSpec {
        int dim_x = 4;
        int dim_y = 5;
        int node_count = 8;
        long samples_per_node = 100;
        double lambda_min = 1.0;   // smallest eigenvalue of A
        double lambda_max = 2.0;   // largest eigenvalue of A
        double coupling = 1.0;     // scale of B
        double rho = 0.1;
        double noise_sigma = 0.0;
        double hetero_scale = 0.0;
        std::uint64_t seed = 0;
    };
    static QuadraticBilevel random(const RandomSpec& spec);

    int dim_x() const override { return static_cast<int>(B_.cols()); }
    int dim_y() const override { return static_cast<int>(A_.rows()); }
    int node_count() const override { return node_count_; }
    long sample_count(int k) const override;

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

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::VectorXd& c() const { return c_; }
    const Eigen::VectorXd& d_target() const { return d_target_; }
    double rho() const { return rho_; }
    double noise_sigma() const { return noise_sigma_; }

  private:
    Eigen::VectorXd noise(int k, std::uint64_t kind, long id, int dim) const;
    Eigen::VectorXd batch_noise(int k, std::uint64_t kind, const Batch& ids, int dim) const;

    Eigen::MatrixXd A_, B_;
    Eigen::VectorXd c_, d_target_;
    double rho_ = 0.0;
    double noise_sigma_ = 0.0;
    int node_count_ = 0;
    long samples_per_node_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<Eigen::VectorXd> offsets_;  // delta_k, exactly mean-zero
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Closed-form inner solution A^{-1}(Bx + c) via a direct solve.
Eigen::VectorXd quadratic_oracle_y_star(const QuadraticBilevel& problem, const Eigen::VectorXd& x);

// Exact hypergradient rho x + B'A^{-1}(y*(x) - d_target).
Eigen::VectorXd quadratic_oracle_hypergrad(const QuadraticBilevel& problem,
                                           const Eigen::VectorXd& x);

}  // namespace dbo
