#pragma once

#include "dbo/quadratic.hpp"

namespace dbo {

// Smoothness and noise description of one bilevel instance, in the worst case
// over nodes and samples.  Callers fill the base fields; derive_constants
// validates them and fills the assembled quantities below the divider.
struct ProblemConstants {
    double mu = 0.0;      // strong convexity of the lower objective in y
    double l_gy = 0.0;    // Lipschitz constant of its y-gradient
    double l_fx = 0.0;    // Lipschitz constant of the upper x-gradient
    double l_fy = 0.0;    // Lipschitz constant of the upper y-gradient
    double c_fy = 0.0;    // bound on the upper y-gradient norm
    double c_gxy = 0.0;   // bound on the cross second-derivative norm
    double l_gxy = 0.0;   // Lipschitz constant of the cross second derivative
    double l_gyy = 0.0;   // Lipschitz constant of the lower Hessian
    double sigma = 0.0;   // per-sample gradient noise scale
    long neumann_j = 10;  // series length used by the hypergradient estimator

    // ---- filled by derive_constants ----
    double l_y = 0.0;           // Lipschitz constant of the lower solution map
    double l_f = 0.0;           // smoothness of the reduced objective
    double l_f_star = 0.0;      // smoothness along (x, y*(x))
    double l_ftilde = 0.0;      // smoothness of the estimator mean
    double sigma_ftilde = 0.0;  // estimator noise scale
};

// Validates base fields and computes the derived ones.  Throws ConfigError on
// mu <= 0, l_gy < mu, a negative field, or neumann_j < 0.
ProblemConstants derive_constants(ProblemConstants c);

// Spectral constants of a quadratic instance.  The upper y-gradient y - d is
// unbounded, so c_fy is taken over the ball ||y - d|| <= y_radius.
ProblemConstants constants_quadratic(const QuadraticBilevel& problem,
                                     double y_radius = 10.0, long neumann_j = 10);

// The six admissibility expressions for the two step-size factors, their
// minima, and the learning-rate cap that goes with them.  beta1_max bounds the
// upper factor, beta2_max the lower one; a run is inside the analyzed regime
// when beta1 <= beta1_max, beta2 <= beta2_max, eta < eta_max.
struct StepSizeBounds {
    double beta1_a = 0.0;
    double beta1_b = 0.0;
    double beta1_c = 0.0;
    double beta2_a = 0.0;
    double beta2_b = 0.0;
    double beta2_c = 0.0;
    double beta1_max = 0.0;
    double beta2_max = 0.0;
    double eta_max = 0.0;
};

// Bounds for the momentum-tracking method on a graph whose mixing matrix has
// second-largest absolute eigenvalue lambda.  beta1_a couples to the lower
// factor and is evaluated at the returned beta2_max.  Requires derived
// constants; lambda must lie in [0, 1) -- a gapless graph has no admissible
// step size and is rejected with ConfigError.
StepSizeBounds mdbo_bounds(const ProblemConstants& c, double alpha1, double alpha2,
                           double lambda);

// Bounds for the variance-reduced method on node_count nodes.  Same coupling
// and lambda contract as mdbo_bounds; the momentum weights enter as
// alpha * node_count, and eta_max uses 1/sqrt(alpha).
StepSizeBounds vrdbo_bounds(const ProblemConstants& c, double alpha1, double alpha2,
                            double lambda, int node_count);

}  // namespace dbo
