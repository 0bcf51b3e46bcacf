#include <cmath>

#include "doctest.h"
#include "dbo/errors.hpp"
#include "dbo/quadratic.hpp"
#include "dbo/theory.hpp"

using dbo::ProblemConstants;
using dbo::QuadraticBilevel;
using dbo::StepSizeBounds;

namespace {

// Shared regression fixture; values chosen so every constant contributes.
ProblemConstants fixture_constants() {
    ProblemConstants c;
    c.mu = 0.5;
    c.l_gy = 2.0;
    c.l_fx = 0.3;
    c.l_fy = 1.0;
    c.c_fy = 10.0;
    c.c_gxy = 1.5;
    c.l_gxy = 0.2;
    c.l_gyy = 0.1;
    c.sigma = 0.7;
    c.neumann_j = 10;
    return dbo::derive_constants(c);
}

QuadraticBilevel identity_instance() {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    return QuadraticBilevel(eye, eye, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 1.0,
                            0.0, 1, 4);
}

QuadraticBilevel scalar_instance() {
    Eigen::MatrixXd a(1, 1), b(1, 1);
    a << 2.0;
    b << 1.0;
    Eigen::VectorXd c0(1), d0(1);
    c0 << 0.0;
    d0 << 1.0;
    return QuadraticBilevel(a, b, c0, d0, 0.1, 0.0, 1, 4);
}

}  // namespace

TEST_CASE("identity quadratic yields unit spectral constants") {
    const auto c = dbo::constants_quadratic(identity_instance());
    CHECK(c.mu == 1.0);
    CHECK(c.l_gy == 1.0);
    CHECK(c.c_gxy == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.l_fx == 1.0);
    CHECK(c.l_fy == 1.0);
    CHECK(c.c_fy == 10.0);
    CHECK(c.l_gxy == 0.0);
    CHECK(c.l_gyy == 0.0);
    CHECK(c.l_y == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(1.0 - c.mu / c.l_gy == 0.0);
    CHECK(c.l_f == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.l_f_star == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(c.l_ftilde == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
    // No sample noise, but the estimator itself still carries variance.
    CHECK(c.sigma_ftilde == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("scalar quadratic constants match hand arithmetic") {
    const auto c = dbo::constants_quadratic(scalar_instance());
    CHECK(c.mu == 2.0);
    CHECK(c.l_gy == 2.0);
    CHECK(1.0 - c.mu / c.l_gy == 0.0);
    CHECK(c.c_gxy == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.l_y == doctest::Approx(0.5).epsilon(1e-14));
    // l_f = 0.1 + 1*1/2, then the path factor 1 + 1/2.
    CHECK(c.l_f == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(c.l_f_star == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(c.l_ftilde == doctest::Approx(std::sqrt(1.04)).epsilon(1e-14));
    CHECK(c.sigma_ftilde == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("quadratic constants honor the configured gradient box") {
    const auto c = dbo::constants_quadratic(scalar_instance(), 25.0, 7);
    CHECK(c.c_fy == 25.0);
    CHECK(c.neumann_j == 7);
    CHECK_THROWS_AS(dbo::constants_quadratic(scalar_instance(), 0.0), dbo::ConfigError);
}

TEST_CASE("constant derivation rejects inconsistent inputs") {
    ProblemConstants c;
    c.l_gy = 1.0;
    CHECK_THROWS_AS(dbo::derive_constants(c), dbo::ConfigError);  // mu = 0
    c.mu = 2.0;
    CHECK_THROWS_AS(dbo::derive_constants(c), dbo::ConfigError);  // l_gy < mu
    c = fixture_constants();
    c.sigma = -1.0;
    CHECK_THROWS_AS(dbo::derive_constants(c), dbo::ConfigError);
    c = fixture_constants();
    c.c_fy = -1.0;
    CHECK_THROWS_AS(dbo::derive_constants(c), dbo::ConfigError);
    c = fixture_constants();
    c.neumann_j = -1;
    CHECK_THROWS_AS(dbo::derive_constants(c), dbo::ConfigError);
}

TEST_CASE("bound evaluation demands derived constants and a spectral gap") {
    ProblemConstants raw;
    raw.mu = 0.5;
    raw.l_gy = 2.0;
    CHECK_THROWS_AS(dbo::mdbo_bounds(raw, 1.0, 1.0, 0.5), dbo::ContractViolationError);
    CHECK_THROWS_AS(dbo::vrdbo_bounds(raw, 1.0, 1.0, 0.5, 4), dbo::ContractViolationError);

    const auto c = fixture_constants();
    CHECK_THROWS_AS(dbo::mdbo_bounds(c, 1.0, 1.0, 1.0), dbo::ConfigError);
    CHECK_THROWS_AS(dbo::mdbo_bounds(c, 1.0, 1.0, -0.01), dbo::ConfigError);
    CHECK_THROWS_AS(dbo::mdbo_bounds(c, 0.0, 1.0, 0.5), dbo::ConfigError);
    CHECK_THROWS_AS(dbo::vrdbo_bounds(c, 1.0, 1.0, 1.0, 4), dbo::ConfigError);
    CHECK_THROWS_AS(dbo::vrdbo_bounds(c, 1.0, 0.0, 0.5, 4), dbo::ConfigError);
    CHECK_THROWS_AS(dbo::vrdbo_bounds(c, 1.0, 1.0, 0.5, 0), dbo::ConfigError);
    CHECK_NOTHROW(dbo::mdbo_bounds(c, 1.0, 1.0, 0.999));
}

TEST_CASE("lower smoothness cap halves exactly when l_gy doubles") {
    const auto c = fixture_constants();
    auto scaled = c;
    scaled.l_gy *= 2.0;  // all else held fixed on purpose
    const auto b1 = dbo::mdbo_bounds(c, 2.0, 2.0, 0.5);
    const auto b2 = dbo::mdbo_bounds(scaled, 2.0, 2.0, 0.5);
    CHECK(b2.beta2_c == b1.beta2_c / 2.0);
    const auto v1 = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 8);
    const auto v2 = dbo::vrdbo_bounds(scaled, 5.0, 5.0, 0.5, 8);
    CHECK(v2.beta2_c == v1.beta2_c / 2.0);
}

TEST_CASE("spectral-gap factor scales the gap-bound expressions as its square") {
    const auto c = fixture_constants();
    const double expected = ((1.0 - 0.5) * (1.0 - 0.5)) / ((1.0 - 0.75) * (1.0 - 0.75));

    const auto ma = dbo::mdbo_bounds(c, 2.0, 2.0, 0.5);
    const auto mb = dbo::mdbo_bounds(c, 2.0, 2.0, 0.75);
    CHECK(ma.beta1_c / mb.beta1_c == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ma.beta2_b / mb.beta2_b == doctest::Approx(expected).epsilon(1e-12));

    const auto va = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 8);
    const auto vb = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.75, 8);
    CHECK(va.beta1_c / vb.beta1_c == doctest::Approx(expected).epsilon(1e-12));
    CHECK(va.beta2_a / vb.beta2_a == doctest::Approx(expected).epsilon(1e-12));

    // Near a gapless graph the gap expressions bind, so the minima inherit
    // the square scaling.
    const auto na = dbo::mdbo_bounds(c, 2.0, 2.0, 0.99);
    const auto nb = dbo::mdbo_bounds(c, 2.0, 2.0, 0.995);
    const double near = ((1.0 - 0.99) * (1.0 - 0.99)) / ((1.0 - 0.995) * (1.0 - 0.995));
    CHECK(na.beta1_max / nb.beta1_max == doctest::Approx(near).epsilon(1e-12));
    CHECK(na.beta2_max / nb.beta2_max == doctest::Approx(near).epsilon(1e-12));
    const auto wa = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.99, 8);
    const auto wb = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.995, 8);
    CHECK(wa.beta1_max / wb.beta1_max == doctest::Approx(near).epsilon(1e-12));
    CHECK(wa.beta2_max / wb.beta2_max == doctest::Approx(near).epsilon(1e-12));
}

TEST_CASE("complete graph keeps the full unit gap factor") {
    const auto c = fixture_constants();
    const auto z = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.0, 8);
    const auto h = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 8);
    CHECK(z.beta1_c / h.beta1_c == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(z.beta2_a / h.beta2_a == doctest::Approx(4.0).epsilon(1e-12));
    const auto mz = dbo::mdbo_bounds(c, 2.0, 2.0, 0.0);
    const auto mh = dbo::mdbo_bounds(c, 2.0, 2.0, 0.5);
    CHECK(mz.beta1_c / mh.beta1_c == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("node count washes the momentum couplings out in the limit") {
    const auto c = fixture_constants();
    const auto b = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 2000000000);
    const double lt2 = c.l_ftilde * c.l_ftilde;
    const double lf2 = c.l_f * c.l_f;
    const double limit = c.mu / (8.0 * c.l_gy * std::sqrt(3.0 * lt2 + 3.0 * lf2));
    CHECK(b.beta1_b == doctest::Approx(limit).epsilon(1e-9));
}

TEST_CASE("coupled upper bound is evaluated at the returned lower minimum") {
    const auto c = fixture_constants();
    const auto m = dbo::mdbo_bounds(c, 2.0, 2.0, 0.5);
    CHECK(m.beta1_a == m.beta2_max * c.mu / (15.0 * c.l_y * c.l_f));
    const auto v = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 8);
    CHECK(v.beta1_a == v.beta2_max * c.mu / (15.0 * c.l_y * c.l_f));
}

TEST_CASE("bounds respond monotonically to each constant") {
    const auto c = fixture_constants();
    const auto bump = [&](double ProblemConstants::*field) {
        auto d = c;
        d.*field *= 1.1;
        return d;
    };
    const auto all_le = [](const StepSizeBounds& hi, const StepSizeBounds& lo) {
        CHECK(hi.beta1_a <= lo.beta1_a);
        CHECK(hi.beta1_b <= lo.beta1_b);
        CHECK(hi.beta1_c <= lo.beta1_c);
        CHECK(hi.beta2_a <= lo.beta2_a);
        CHECK(hi.beta2_b <= lo.beta2_b);
        CHECK(hi.beta2_c <= lo.beta2_c);
        CHECK(hi.beta1_max <= lo.beta1_max);
        CHECK(hi.beta2_max <= lo.beta2_max);
    };
    const auto mdbo = [](const ProblemConstants& k) { return dbo::mdbo_bounds(k, 2.0, 2.0, 0.5); };
    const auto vrdbo = [](const ProblemConstants& k) {
        return dbo::vrdbo_bounds(k, 5.0, 5.0, 0.5, 8);
    };

    // Non-increasing in the lower smoothness and the estimator smoothness.
    all_le(mdbo(bump(&ProblemConstants::l_gy)), mdbo(c));
    all_le(vrdbo(bump(&ProblemConstants::l_gy)), vrdbo(c));
    all_le(mdbo(bump(&ProblemConstants::l_ftilde)), mdbo(c));
    all_le(vrdbo(bump(&ProblemConstants::l_ftilde)), vrdbo(c));

    // Non-decreasing in the curvature floor.
    all_le(mdbo(c), mdbo(bump(&ProblemConstants::mu)));
    all_le(vrdbo(c), vrdbo(bump(&ProblemConstants::mu)));

    // The reduced smoothness enters those radicands alone, so only the
    // gradient-style expressions are literally monotone in it.
    const auto mf = mdbo(bump(&ProblemConstants::l_f));
    CHECK(mf.beta1_b <= mdbo(c).beta1_b);
    CHECK(mf.beta1_c <= mdbo(c).beta1_c);
    const auto vf = vrdbo(bump(&ProblemConstants::l_f));
    CHECK(vf.beta1_b <= vrdbo(c).beta1_b);
    CHECK(vf.beta1_c <= vrdbo(c).beta1_c);

    // Non-increasing in lambda.
    all_le(dbo::mdbo_bounds(c, 2.0, 2.0, 0.6), mdbo(c));
    all_le(dbo::vrdbo_bounds(c, 5.0, 5.0, 0.6, 8), vrdbo(c));
}

TEST_CASE("momentum bound regression values stay pinned") {
    const auto c = fixture_constants();
    CHECK(c.l_y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c.l_f == doctest::Approx(13.3).epsilon(1e-12));
    CHECK(c.l_f_star == doctest::Approx(53.2).epsilon(1e-12));
    CHECK(c.l_ftilde == doctest::Approx(30.86033052318138).epsilon(1e-12));
    CHECK(c.sigma_ftilde == doctest::Approx(135.7548083862962).epsilon(1e-12));

    const auto b = dbo::mdbo_bounds(c, 2.0, 2.0, 0.5);
    CHECK(b.beta1_a == doctest::Approx(1.3697585006594613e-06).epsilon(1e-12));
    CHECK(b.beta1_b == doctest::Approx(3.5879897044138655e-04).epsilon(1e-12));
    CHECK(b.beta1_c == doctest::Approx(5.7391195954439896e-05).epsilon(1e-12));
    CHECK(b.beta2_a == doctest::Approx(1.6396009252893752e-03).epsilon(1e-12));
    CHECK(b.beta2_b == doctest::Approx(1.0794733221384247e-02).epsilon(1e-12));
    CHECK(b.beta2_c == doctest::Approx(8.3333333333333329e-02).epsilon(1e-12));
    CHECK(b.beta1_max == b.beta1_a);
    CHECK(b.beta2_max == b.beta2_a);
    CHECK(b.eta_max == 0.5);  // the momentum weight cap binds
}

TEST_CASE("variance-reduced bound regression values stay pinned") {
    const auto c = fixture_constants();
    const auto b = dbo::vrdbo_bounds(c, 5.0, 5.0, 0.5, 8);
    CHECK(b.beta1_a == doctest::Approx(2.48735852057531e-06).epsilon(1e-12));
    CHECK(b.beta1_b == doctest::Approx(5.151207333568288e-04).epsilon(1e-12));
    CHECK(b.beta1_c == doctest::Approx(1.1193113342588895e-04).epsilon(1e-12));
    CHECK(b.beta2_a == doctest::Approx(2.977368149128646e-03).epsilon(1e-12));
    CHECK(b.beta2_b == doctest::Approx(3.379510803430002e-03).epsilon(1e-12));
    CHECK(b.beta2_c == doctest::Approx(8.3333333333333329e-02).epsilon(1e-12));
    CHECK(b.beta1_max == b.beta1_a);
    CHECK(b.beta2_max == b.beta2_a);
    CHECK(b.eta_max == doctest::Approx(0.4472135954999579).epsilon(1e-14));
}
