#pragma once

#include <cstdint>

#include "dbo/problem.hpp"
#include "dbo/rng.hpp"

namespace dbo {

// Truncated-Neumann stochastic hypergradient:
//
//   est = grad_x f(xi) - (J/L_gy) * jvp_xy(zeta_0) [ prod_{j=1}^{Jt} (I - hvp_yy(zeta_j)/L_gy) ] grad_y f(xi)
//
// with the truncation level Jt drawn uniformly so that the expectation over Jt
// of (J/L_gy) * prod equals the J-term Neumann partial sum of the inverse
// lower Hessian — which requires Jt uniform over {0, ..., J-1}.
struct HypergradParams {
    int J = 10;        // series length (config key neumann_j)
    double l_gy = 0.0; // smoothness constant of grad_y g (config key l_gy)
    double mu = 0.0;   // strong-convexity constant, used by bounds only; 0 = unset
};

struct HypergradCost {
    long grad_evals = 0;  // first-order gradient batches
    long hvp_evals = 0;
    long jvp_evals = 0;
};

// Uniform draw over {0, 1, ..., J} inclusive.
long sample_truncation(long J, Rng& rng);

// batch_size ids drawn uniformly with replacement from [0, population).
Batch draw_batch(long population, long batch_size, Rng& rng);

// Draws the lower-level sample structure for one estimate: the truncation
// level Jt (uniform over {0..J-1}; 0 when J = 0), then Jt+1 batches —
// zeta_0 for the Jacobian and zeta_1..zeta_Jt for the Hessian factors.
std::vector<Batch> draw_hypergrad_batches(const BilevelProblem& problem, int k,
                                          const HypergradParams& params, long batch_size,
                                          Rng& rng);

// Replay form: hess_ids must hold Jt+1 batches (Jt <= J).  The product is
// applied to grad_y f as successive Hessian-vector products in ascending j.
// Performs exactly Jt HVPs, 1 JVP and 2 first-order gradient evaluations.
Eigen::VectorXd estimate_hypergrad(const BilevelProblem& problem, int k,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const Batch& grad_ids, const std::vector<Batch>& hess_ids,
                                   const HypergradParams& params,
                                   HypergradCost* cost = nullptr);

// Drawing form: samples the truncation level and lower batches from rng.
Eigen::VectorXd estimate_hypergrad(const BilevelProblem& problem, int k,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const Batch& grad_ids, long batch_size,
                                   const HypergradParams& params, Rng& rng,
                                   HypergradCost* cost = nullptr);

// (1/L_gy) sum_{j=0}^{J-1} (I - hvp/L_gy)^j v with J applications of hvp;
// J = 0 gives the zero vector.
Eigen::VectorXd exact_neumann_apply(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hvp_full,
    const Eigen::VectorXd& v, const HypergradParams& params);

// (C_gxy C_fy / mu) (1 - mu/L_gy)^J, the worst-case estimator bias.
double bias_bound(double C_gxy, double C_fy, double mu, double L_gy, long J);

}  // namespace dbo
