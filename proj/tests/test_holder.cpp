#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrg/holder.hpp"
#include "lrg/learning.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace lrg;

namespace {

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }
Box box1(double lo, double hi) { return Box{vec1(lo), vec1(hi)}; }

Eigen::MatrixXd m1(double v) {
    Eigen::MatrixXd m(1, 1);
    m << v;
    return m;
}

/// Random stable system with eigenvalues in [-5, -0.2], via a similarity
/// transform of a stable diagonal.
void random_stable_system(std::mt19937_64& rng, int n, int n_nu, int m, Eigen::MatrixXd& A,
                          Eigen::MatrixXd& B, Eigen::MatrixXd& C, Eigen::MatrixXd& F) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ueig(-5.0, -0.2);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = ueig(rng);
    Eigen::MatrixXd P;
    do {
        P = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    } while (std::abs(P.determinant()) < 0.1);
    A = P * D * P.inverse();
    B = Eigen::MatrixXd::NullaryExpr(n, n_nu, [&] { return u(rng); });
    C = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
    F = Eigen::MatrixXd::NullaryExpr(m, n_nu, [&] { return u(rng); });
}

} // namespace

TEST_CASE("closed-form constant for scalar systems") {
    auto b1 = lti_lipschitz_bound(m1(-1), m1(1), m1(1), m1(0));
    CHECK(b1.eta == doctest::Approx(1.0).epsilon(0.01));
    CHECK(b1.L_prime == doctest::Approx(2.0).epsilon(0.01));

    auto b2 = lti_lipschitz_bound(m1(-1), m1(1), m1(0), m1(0));
    CHECK(b2.L_prime == doctest::Approx(0.0).epsilon(1e-12));

    auto b3 = lti_lipschitz_bound(m1(-2), m1(1), m1(1), m1(0.5));
    CHECK(b3.eta == doctest::Approx(1.0).epsilon(0.01));
    CHECK(b3.L_prime == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("non-Hurwitz systems are rejected") {
    CHECK_THROWS_AS(lti_lipschitz_bound(m1(0.1), m1(1), m1(1), m1(0)), std::invalid_argument);
}

TEST_CASE("sampled deviation functional matches the scalar closed form") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double dnu = u(rng), dx = u(rng);
        const double got = lti_deviation(m1(-1), m1(1), m1(1), m1(0.3), vec1(dnu), vec1(dx));
        const double want = oracles::scalar_lti_deviation(-1, 1, 1, 0.3, dnu, dx);
        CHECK(got == doctest::Approx(want).epsilon(1e-3));
    }
}

TEST_CASE("closed-form bound passes every continuity probe") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> udim(1, 4);
    for (int sys = 0; sys < 25; ++sys) {
        Eigen::MatrixXd A, B, C, F;
        random_stable_system(rng, udim(rng), udim(rng), udim(rng), A, B, C, F);
        const auto bound = lti_lipschitz_bound(A, B, C, F);
        const auto report = verify_holder_on_lti(A, B, C, F, bound.L_prime, 1.0, 200, 1000 + sys);
        CHECK(report.violations == 0);
        CHECK(report.max_ratio <= bound.L_prime * (1.0 + 1e-9));
    }
}

TEST_CASE("halving the constant is caught by the probes") {
    std::mt19937_64 rng(13);
    Eigen::MatrixXd A, B, C, F;
    random_stable_system(rng, 3, 2, 2, A, B, C, F);
    const auto bound = lti_lipschitz_bound(A, B, C, F);
    const auto honest = verify_holder_on_lti(A, B, C, F, bound.L_prime, 1.0, 300, 77);
    REQUIRE(honest.max_ratio > 0.0);

    const double half = honest.max_ratio / 2.0;
    const auto broken = verify_holder_on_lti(A, B, C, F, half, 1.0, 300, 77);
    CHECK(broken.violations >= 1);
}

TEST_CASE("identical probes never violate") {
    // distance zero handled without division
    const auto report = verify_holder_on_lti(m1(-1), m1(1), m1(1), m1(0), 0.0, 1.0, 1, 5);
    CHECK(report.probe_count == 1);
}

TEST_CASE("square-root input channel: Holder but not Lipschitz") {
    // xdot = a x + b nu^(1/2), y = c x + f nu^(1/2) on a bounded set.
    const double a = -1.0, b = 1.0, c = 1.0, f = 0.5;
    const double gamma = f - c * b / a; // asymptotic gain on the substituted input
    const auto deviation = [&](double nu, double dnu, double dx) {
        const double u0 = std::sqrt(nu);
        const double du = std::sqrt(nu + dnu) - u0;
        return oracles::scalar_lti_deviation(a, b, c, f, du, dx);
    };

    // Bounded-region probes: the ratio against ||dz||^(1/2) stays bounded.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    double max_half_ratio = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double nu1 = u(rng), nu2 = u(rng);
        double dnu1 = u(rng) - nu1, dnu2 = u(rng) - nu2;
        const double dx1 = ux(rng), dx2 = ux(rng);
        const double dist = std::abs(nu1 - nu2) + std::abs(dnu1 - dnu2) + std::abs(dx1 - dx2);
        if (dist < 1e-12) continue;
        const double diff = std::abs(deviation(nu1, dnu1, dx1) - deviation(nu2, dnu2, dx2));
        max_half_ratio = std::max(max_half_ratio, diff / std::sqrt(dist));
    }
    CHECK(max_half_ratio < 100.0);
    CHECK(max_half_ratio > 0.0);

    // Lipschitz ratios blow up near nu = 0 with a fixed step.
    const auto lip_ratio = [&](double h) {
        const double step = 1.0;
        const double diff = std::abs(deviation(h, step, 0.0) - deviation(2.0 * h, step, 0.0));
        return diff / h;
    };
    CHECK(lip_ratio(1e-6) > 5.0 * lip_ratio(1e-4));
    CHECK(lip_ratio(1e-8) > 5.0 * lip_ratio(1e-6));
    CHECK(lip_ratio(1e-8) > 1000.0 * lip_ratio(1e-4));
    (void)gamma;
}

TEST_CASE("sampling estimator recovers a constructed slope") {
    // y = 0.3 nu: the deviation functional is exactly 0.3 |dnu|.
    LtiPlant plant(m1(-1), m1(1), m1(0), m1(0.3), box1(-1, 1), box1(-5, 5));
    MapBuildOptions opt;
    opt.settle_tolerance = 1e-9;
    opt.max_settle_time = 30.0;
    opt.dt = 1e-3;
    auto map = build_steady_state_map(plant, uniform_grid(-1.0, 1.0, 0.25), opt);

    GovernorConfig cfg;
    cfg.holder_L = 1.0;
    cfg.horizon_T = 2.0;
    cfg.epsilon = 0.01;
    cfg.sample_period = 0.04;
    const auto est = estimate_holder_sampling(plant, map, 25, 1.0, 4242, 1.1, cfg, 1e-3);
    CHECK(est.L == doctest::Approx(0.3 * 1.1).epsilon(0.05));
    CHECK(est.max_observed_ratio == doctest::Approx(0.3).epsilon(0.05));
    CHECK(est.L >= est.max_observed_ratio);
}

TEST_CASE("insensitive plant yields a zero estimate") {
    LtiPlant plant(m1(-1), m1(1), m1(0), m1(0), box1(-1, 1), box1(-5, 5));
    MapBuildOptions opt;
    opt.settle_tolerance = 1e-9;
    opt.max_settle_time = 30.0;
    opt.dt = 1e-3;
    auto map = build_steady_state_map(plant, uniform_grid(-1.0, 1.0, 0.5), opt);

    GovernorConfig cfg;
    cfg.holder_L = 1.0;
    cfg.horizon_T = 2.0;
    cfg.epsilon = 0.01;
    cfg.sample_period = 0.04;
    const auto est = estimate_holder_sampling(plant, map, 10, 1.0, 7, 1.1, cfg, 1e-3);
    CHECK(est.max_observed_ratio == 0.0);
    CHECK(est.L == 0.0);
    CHECK_THROWS_AS(estimate_holder_sampling(plant, map, 0, 1.0, 7, 1.1, cfg, 1e-3), ConfigError);
}
