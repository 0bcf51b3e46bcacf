#include "dbo/theory.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dbo/errors.hpp"

namespace dbo {

namespace {

double sq(double v) { return v * v; }

void check_base(const ProblemConstants& c) {
    if (!(c.mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(c.l_gy >= c.mu)) throw ConfigError("l_gy must be at least mu");
    if (c.l_fx < 0.0 || c.l_fy < 0.0 || c.c_fy < 0.0 || c.c_gxy < 0.0 || c.l_gxy < 0.0 ||
        c.l_gyy < 0.0) {
        throw ConfigError("smoothness constants must be non-negative");
    }
    if (c.sigma < 0.0) throw ConfigError("sigma must be non-negative");
    if (c.neumann_j < 0) throw ConfigError("neumann_j must be non-negative");
}

void check_derived(const ProblemConstants& c) {
    if (!(c.l_f > 0.0) || !(c.l_y >= 0.0) || !(c.l_ftilde >= 0.0)) {
        throw ContractViolationError("constants must pass through derive_constants first");
    }
}

void check_graph(double alpha1, double alpha2, double lambda) {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw ConfigError("momentum weights must be positive");
    if (!(lambda >= 0.0) || !(lambda < 1.0)) {
        throw ConfigError("spectral radius must lie in [0, 1); a gapless graph admits no step size");
    }
}

}  // namespace

ProblemConstants derive_constants(ProblemConstants c) {
    check_base(c);
    const double mu2 = sq(c.mu);
    c.l_y = c.c_gxy / c.mu;
    c.l_f = c.l_fx + c.l_fy * c.c_gxy / c.mu + c.c_fy * c.l_gxy / c.mu +
            c.l_gyy * c.c_fy * c.c_gxy / mu2;
    c.l_f_star = c.l_f + c.l_f * c.c_gxy / c.mu;
    const double j = static_cast<double>(c.neumann_j);
    c.l_ftilde = std::sqrt(4.0 * sq(c.l_fx) +
                           4.0 * sq(c.c_gxy) * sq(c.c_fy) * sq(j) * sq(c.l_gyy) / (mu2 * sq(c.l_gy)) +
                           4.0 * sq(c.c_gxy) * sq(c.l_fy) / mu2 + sq(c.l_gxy) * sq(c.c_fy) / mu2);
    const double s2 = sq(c.sigma);
    c.sigma_ftilde =
        std::sqrt(4.0 * s2 + 4.0 * sq(c.c_fy) * s2 / mu2 + 4.0 * s2 * (s2 + sq(c.c_gxy)) / mu2 +
                  16.0 * (s2 + sq(c.c_gxy)) * (s2 + sq(c.c_fy)) / mu2);
    return c;
}

ProblemConstants constants_quadratic(const QuadraticBilevel& problem, double y_radius,
                                     long neumann_j) {
    if (!(y_radius > 0.0)) throw ConfigError("y_radius must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(problem.A());
    ProblemConstants c;
    c.mu = es.eigenvalues().minCoeff();
    c.l_gy = es.eigenvalues().maxCoeff();
    c.c_gxy = problem.B().jacobiSvd().singularValues()(0);
    c.l_fx = problem.rho();
    c.l_fy = 1.0;
    c.c_fy = y_radius;
    c.l_gxy = 0.0;
    c.l_gyy = 0.0;
    c.sigma = problem.noise_sigma();
    c.neumann_j = neumann_j;
    return derive_constants(c);
}

StepSizeBounds mdbo_bounds(const ProblemConstants& c, double alpha1, double alpha2,
                           double lambda) {
    check_derived(c);
    check_graph(alpha1, alpha2, lambda);
    const double lt2 = sq(c.l_ftilde);
    const double lf2 = sq(c.l_f);
    const double om2 = sq(1.0 - lambda);
    const double a1 = sq(alpha1);
    const double a2 = sq(alpha2);

    StepSizeBounds b;
    b.beta2_a = 9.0 * c.mu * lf2 /
                (2.0 * ((4.0 + 16.0 / a1) * lt2 + (200.0 + 400.0 / a2) * lf2) * sq(c.l_gy));
    b.beta2_b = 5.0 * om2 * c.l_f /
                (2.0 * c.l_gy * std::sqrt((12.0 + 36.0 / a1) * lt2 + (500.0 + 900.0 / a2) * lf2));
    b.beta2_c = 1.0 / (6.0 * c.l_gy);
    b.beta2_max = std::min({b.beta2_a, b.beta2_b, b.beta2_c});

    b.beta1_a = b.beta2_max * c.mu / (15.0 * c.l_y * c.l_f);
    b.beta1_b = c.mu /
                (4.0 * c.l_gy * std::sqrt((2.0 + 8.0 / a1) * lt2 + (100.0 + 200.0 / a2) * lf2));
    b.beta1_c = c.mu * om2 /
                (4.0 * c.l_gy * std::sqrt((6.0 + 18.0 / a1) * lt2 + (250.0 + 450.0 / a2) * lf2));
    b.beta1_max = std::min({b.beta1_a, b.beta1_b, b.beta1_c});

    b.eta_max = std::min({1.0, 1.0 / (2.0 * b.beta1_max * c.l_f_star), 1.0 / alpha1, 1.0 / alpha2});
    return b;
}

StepSizeBounds vrdbo_bounds(const ProblemConstants& c, double alpha1, double alpha2,
                            double lambda, int node_count) {
    check_derived(c);
    check_graph(alpha1, alpha2, lambda);
    if (node_count < 1) throw ConfigError("node_count must be at least 1");
    const double lt2 = sq(c.l_ftilde);
    const double lf2 = sq(c.l_f);
    const double om2 = sq(1.0 - lambda);
    const double a1k = alpha1 * static_cast<double>(node_count);
    const double a2k = alpha2 * static_cast<double>(node_count);

    StepSizeBounds b;
    const double shared_root =
        2.0 * std::sqrt((57.0 + 54.0 / a1k) * lt2 + (104.0 + 900.0 / a2k) * lf2);
    b.beta2_a = om2 * c.l_f / c.l_gy / shared_root;
    b.beta2_b = 9.0 * c.mu * lf2 /
                (8.0 * sq(c.l_gy) * ((6.0 + 6.0 / a1k) * lt2 + (6.0 + 100.0 / a2k) * lf2));
    b.beta2_c = 1.0 / (6.0 * c.l_gy);
    b.beta2_max = std::min({b.beta2_a, b.beta2_b, b.beta2_c});

    b.beta1_a = b.beta2_max * c.mu / (15.0 * c.l_y * c.l_f);
    b.beta1_b = c.mu /
                (8.0 * c.l_gy * std::sqrt((3.0 + 3.0 / a1k) * lt2 + (3.0 + 50.0 / a2k) * lf2));
    b.beta1_c = c.mu * om2 / c.l_gy / shared_root;
    b.beta1_max = std::min({b.beta1_a, b.beta1_b, b.beta1_c});

    b.eta_max = std::min({1.0, 1.0 / (2.0 * b.beta1_max * c.l_f_star), 1.0 / std::sqrt(alpha1),
                          1.0 / std::sqrt(alpha2)});
    return b;
}

}  // namespace dbo
