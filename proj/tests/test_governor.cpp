#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrg/dataset.hpp"
#include "lrg/governor.hpp"

#include <Eigen/Core>

#include <cmath>
#include <future>
#include <random>
#include <sstream>

using namespace lrg;

namespace {

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

GovernorConfig basic_config(double L = 0.5, double beta = 1.0) {
    GovernorConfig cfg;
    cfg.holder_L = L;
    cfg.holder_beta = beta;
    cfg.horizon_T = 1.0;
    cfg.epsilon = 1e-3;
    cfg.sample_period = 0.1;
    cfg.lambda = 0.01;
    cfg.delta_v1 = 0.5;
    return cfg;
}

DataPoint point1(double nu, double dnu, double dx, double d_tilde) {
    return DataPoint{vec1(nu), vec1(dnu), vec1(dx), d_tilde};
}

/// Flat synthetic map over [-5, 5] with constant margin d.
SteadyStateMap flat_map(double d) {
    std::vector<MapNode> nodes;
    for (double nu = -5.0; nu <= 5.0; nu += 1.0) {
        MapNode n;
        n.nu = nu;
        n.x_nu = vec1(nu);
        n.y_nu = vec1(0.0);
        n.d = d;
        nodes.push_back(n);
    }
    return SteadyStateMap(std::move(nodes), InterpMode::linear);
}

} // namespace

TEST_CASE("deviation envelope on an empty dataset") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    Dataset ds(1, 1);

    CHECK(dbar_estimate(ds, vec1(0.1), vec1(0.0), vec1(0.0), cfg) == doctest::Approx(0.0));
    CHECK(dbar_estimate(ds, vec1(0.0), vec1(1.0), vec1(0.0), cfg) == doctest::Approx(0.5));
}

TEST_CASE("deviation envelope takes the zero-distance data term") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    Dataset ds(1, 1);
    ds.append(point1(0.0, 1.0, 0.0, 0.2));
    CHECK(dbar_estimate(ds, vec1(0.0), vec1(1.0), vec1(0.0), cfg) == doctest::Approx(0.2));
}

TEST_CASE("envelope never increases as points are appended") {
    GovernorConfig cfg = basic_config(0.7, 1.5);
    cfg.norm.w_delta_x = 2.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    std::vector<std::array<double, 3>> probes(100);
    for (auto& p : probes) p = {u(rng), u(rng), u(rng)};

    Dataset ds(1, 1);
    std::vector<double> prev(probes.size(), std::numeric_limits<double>::infinity());
    for (int step = 0; step < 60; ++step) {
        ds.append(point1(u(rng), u(rng), u(rng), std::abs(u(rng)) + 0.01));
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double val =
                dbar_estimate(ds, vec1(probes[i][0]), vec1(probes[i][1]), vec1(probes[i][2]), cfg);
            CHECK(val >= 0.0);
            CHECK(val <= prev[i]);
            prev[i] = val;
        }
    }
}

TEST_CASE("per-point certificate: worked scalar example") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    // headroom ((0.6-0.1)/0.5)^1 = 1, matching state: certified interval
    // |2 kappa| <= 1 so the best kappa is 0.5.
    const double x_dev = 0.3;
    DataPoint p = point1(0.0, 0.0, x_dev, 0.1);
    CHECK(kappa_for_datapoint(p, vec1(0.0), vec1(2.0), vec1(x_dev), 0.6, cfg) ==
          doctest::Approx(0.5));
}

TEST_CASE("per-point certificate: no headroom and saturation") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    // d_tilde above d with nonzero distance: infeasible.
    DataPoint p = point1(0.5, 0.2, 0.0, 0.9);
    CHECK(kappa_for_datapoint(p, vec1(0.0), vec1(2.0), vec1(0.1), 0.6, cfg) == 0.0);

    // Huge headroom: saturates at 1.
    DataPoint q = point1(0.0, 0.5, 0.0, 0.1);
    CHECK(kappa_for_datapoint(q, vec1(0.0), vec1(2.0), vec1(0.0), 10.0, cfg) == 1.0);
}

TEST_CASE("per-point certificate rejects bad arguments") {
    GovernorConfig cfg = basic_config();
    DataPoint p = point1(0.0, 0.0, 0.0, 0.1);
    CHECK_THROWS_AS(kappa_for_datapoint(p, vec1(0.0), vec1(1.0), vec1(0.0), -0.1, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(kappa_for_datapoint(p, vec1(1.0), vec1(1.0), vec1(0.0), 0.5, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        kappa_for_datapoint(p, vec1(0.0), vec1(1.0), vec1(std::nan("")), 0.5, cfg),
        std::invalid_argument);
}

TEST_CASE("fallback certificate examples") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    CHECK(kappa_fallback(vec1(0.0), vec1(2.0), vec1(0.0), 0.0, cfg) == 0.0);
    CHECK(kappa_fallback(vec1(0.0), vec1(2.0), vec1(0.0), 0.5, cfg) == doctest::Approx(0.5));
    CHECK(kappa_fallback(vec1(0.0), vec1(2.0), vec1(0.0), 100.0, cfg) == 1.0);
}

TEST_CASE("combined kappa: empty dataset defers to the fallback") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    Dataset ds(1, 1);
    const double d = 0.4;
    auto res = compute_kappa(ds, vec1(0.0), vec1(2.0), vec1(0.0), d, cfg);
    CHECK(res.kappa == doctest::Approx(kappa_fallback(vec1(0.0), vec1(2.0), vec1(0.0), d, cfg)));
    CHECK(res.fallback_wins);

    // d = 0 at equilibrium: no movement is certifiable.
    CHECK(compute_kappa(ds, vec1(0.0), vec1(2.0), vec1(0.0), 0.0, cfg).kappa == 0.0);
}

TEST_CASE("combined kappa: a matching data point certifies the full step") {
    GovernorConfig cfg = basic_config(0.5, 1.0);
    Dataset ds(1, 1);
    // Point recorded at the same (nu, x_dev) whose step equals r - nu and
    // whose measured bound leaves headroom.
    ds.append(point1(0.0, 2.0, 0.0, 0.1));
    auto res = compute_kappa(ds, vec1(0.0), vec1(2.0), vec1(0.0), 0.6, cfg);
    CHECK(res.kappa == 1.0);
    CHECK_FALSE(res.fallback_wins);
    REQUIRE(res.winners.size() == 1);
    CHECK(res.winners[0] == 0);
}

TEST_CASE("combined kappa: r equal to nu returns 1 by convention") {
    GovernorConfig cfg = basic_config();
    Dataset ds(1, 1);
    auto res = compute_kappa(ds, vec1(0.3), vec1(0.7), vec1(0.7), 0.5, cfg);
    CHECK(res.kappa == 1.0);
    CHECK(res.trivial);
}

TEST_CASE("reference update law") {
    CHECK(apply_update(vec1(10.0), vec1(50.0), 1.0)[0] == 50.0);
    CHECK(apply_update(vec1(10.0), vec1(50.0), 0.0)[0] == 10.0);
    CHECK(apply_update(vec1(10.0), vec1(50.0), 0.5)[0] == doctest::Approx(30.0));
    CHECK_THROWS_AS(apply_update(vec1(0.0), vec1(1.0), 1.5), std::invalid_argument);
}

TEST_CASE("enhanced update law gating") {
    GovernorConfig cfg = basic_config(1.0, 1.0);
    cfg.lambda = 0.2;
    cfg.delta_v1 = 0.5;
    SteadyStateMap map = flat_map(10.0);

    // Progress below lambda: candidate rejected, reference holds.
    auto r1 = apply_update_enhanced(vec1(0.0), vec1(1.0), 0.1, map, cfg);
    CHECK_FALSE(r1.accepted);
    CHECK(r1.nu_plus[0] == 0.0);

    // Full step reaches r exactly.
    auto r2 = apply_update_enhanced(vec1(0.0), vec1(1.0), 1.0, map, cfg);
    CHECK(r2.accepted);
    CHECK(r2.nu_plus[0] == 1.0);

    // Half step with ample margin: accepted (0.5 <= 1 - 0.2).
    auto r3 = apply_update_enhanced(vec1(0.0), vec1(1.0), 0.5, map, cfg);
    CHECK(r3.accepted);
    CHECK(r3.nu_plus[0] == doctest::Approx(0.5));
}

TEST_CASE("enhanced update law validates the progress parameter") {
    GovernorConfig cfg = basic_config(1.0, 1.0);
    cfg.lambda = 0.6; // above (min(d, delta_v1)/L)^beta = 0.5
    cfg.delta_v1 = 0.5;
    SteadyStateMap map = flat_map(10.0);
    CHECK_THROWS_AS(apply_update_enhanced(vec1(0.0), vec1(1.0), 0.5, map, cfg), ConfigError);
}

TEST_CASE("closed-form and bisection certificates agree to 1e-8") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> upos(0.05, 2.0);
    std::uniform_int_distribution<int> udim(1, 3);
    std::uniform_real_distribution<double> ubeta(1.0, 2.5);

    for (int trial = 0; trial < 400; ++trial) {
        const int n_nu = udim(rng);
        GovernorConfig cfg = basic_config(upos(rng), ubeta(rng));
        cfg.norm.w_nu = upos(rng);
        cfg.norm.w_delta_nu = upos(rng);
        cfg.norm.w_delta_x = upos(rng);

        Eigen::VectorXd nu(n_nu), r(n_nu), x_dev(2), p_nu(n_nu), p_dnu(n_nu), p_dx(2);
        for (int i = 0; i < n_nu; ++i) {
            nu[i] = u(rng);
            r[i] = u(rng);
            p_nu[i] = u(rng);
            p_dnu[i] = u(rng);
        }
        if ((r - nu).norm() == 0.0) continue;
        for (int i = 0; i < 2; ++i) {
            x_dev[i] = u(rng);
            p_dx[i] = u(rng);
        }
        DataPoint p{p_nu, p_dnu, p_dx, upos(rng)};
        const double d = upos(rng);

        const double closed = kappa_for_datapoint(p, nu, r, x_dev, d, cfg);
        const double bisect = kappa_for_datapoint_bisect(p, nu, r, x_dev, d, cfg);
        CHECK(std::abs(closed - bisect) < 1e-8);
    }
}

TEST_CASE("iterates of the update law stay on the segment to r") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> uk(0.0, 1.0);

    Eigen::VectorXd start(3), r(3);
    for (int i = 0; i < 3; ++i) {
        start[i] = u(rng);
        r[i] = u(rng);
    }
    const Eigen::VectorXd dir = r - start;
    Eigen::VectorXd nu = start;
    double prev_gap = (r - nu).norm();
    for (int k = 0; k < 200; ++k) {
        nu = apply_update(nu, r, uk(rng));
        // colinearity: nu - start is a nonnegative multiple of dir, length
        // never exceeding |dir|
        const Eigen::VectorXd offset = nu - start;
        const double proj = offset.dot(dir) / dir.squaredNorm();
        CHECK(proj >= -1e-12);
        CHECK(proj <= 1.0 + 1e-12);
        CHECK((offset - proj * dir).norm() < 1e-9);
        const double gap = (r - nu).norm();
        CHECK(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
}

TEST_CASE("accepted updates keep the envelope below the safety budget") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> upos(0.05, 1.5);

    for (int trial = 0; trial < 200; ++trial) {
        GovernorConfig cfg = basic_config(upos(rng), 1.0 + upos(rng));
        Dataset ds(1, 2);
        const int count = 1 + trial % 6;
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd dx(2);
            dx << u(rng), u(rng);
            ds.append(DataPoint{vec1(u(rng)), vec1(u(rng)), dx, upos(rng)});
        }
        Eigen::VectorXd x_dev(2);
        x_dev << u(rng), u(rng);
        const Eigen::VectorXd nu = vec1(u(rng));
        const Eigen::VectorXd r = vec1(u(rng));
        if ((r - nu).norm() == 0.0) continue;
        const double d = upos(rng);

        const auto res = compute_kappa(ds, x_dev, r, nu, d, cfg);
        if (res.kappa > 0.0) {
            const Eigen::VectorXd delta = res.kappa * (r - nu);
            CHECK(dbar_estimate(ds, nu, delta, x_dev, cfg) <= d + 1e-9);
        }
    }
}

TEST_CASE("kappa is non-increasing in the continuity constant") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> upos(0.05, 1.0);

    for (int trial = 0; trial < 200; ++trial) {
        Dataset ds(1, 1);
        for (int i = 0; i < 4; ++i)
            ds.append(point1(u(rng), u(rng), u(rng), upos(rng)));
        const Eigen::VectorXd nu = vec1(u(rng)), r = vec1(u(rng)), x_dev = vec1(u(rng));
        if ((r - nu).norm() == 0.0) continue;
        const double d = upos(rng);

        GovernorConfig lo = basic_config(0.3, 1.0);
        GovernorConfig hi = basic_config(0.5, 1.0);
        CHECK(compute_kappa(ds, x_dev, r, nu, d, hi).kappa <=
              compute_kappa(ds, x_dev, r, nu, d, lo).kappa + 1e-15);
    }
}

TEST_CASE("dataset CSV round trip preserves points and weights") {
    ProductNorm norm{1.0, 2.5, 0.125};
    Dataset ds(1, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 37; ++i) {
        Eigen::VectorXd dx(3);
        dx << u(rng), u(rng), u(rng);
        ds.append(DataPoint{vec1(u(rng)), vec1(u(rng)), dx, std::abs(u(rng))});
    }
    const std::string path = std::string(LRG_BINARY_DIR) + "/test_dataset_roundtrip.csv";
    ds.save_csv(path, norm);
    ProductNorm loaded_norm;
    Dataset loaded = Dataset::load_csv(path, &loaded_norm);
    REQUIRE(loaded.size() == ds.size());
    CHECK(loaded_norm.w_delta_nu == norm.w_delta_nu);
    CHECK(loaded_norm.w_delta_x == norm.w_delta_x);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(loaded[i].nu == ds[i].nu);
        CHECK(loaded[i].delta_nu == ds[i].delta_nu);
        CHECK(loaded[i].delta_x == ds[i].delta_x);
        CHECK(loaded[i].d_tilde == ds[i].d_tilde);
    }
}

TEST_CASE("dataset rejects non-finite ingestion") {
    Dataset ds(1, 1);
    CHECK_THROWS_AS(ds.append(point1(0.0, std::nan(""), 0.0, 0.1)), NumericalFault);
    CHECK_THROWS_AS(ds.append(point1(0.0, 0.0, 0.0, -0.5)), NumericalFault);
}

TEST_CASE("split dataset scan reduces to the sequential kappa bit for bit") {
    GovernorConfig cfg = basic_config(0.4, 1.3);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Dataset ds(1, 1);
    for (int i = 0; i < 101; ++i) ds.append(point1(u(rng), u(rng), u(rng), std::abs(u(rng)) + 0.01));

    const Eigen::VectorXd nu = vec1(0.2), r = vec1(-0.8), x_dev = vec1(0.05);
    const double d = 0.7;
    const double sequential = compute_kappa(ds, x_dev, r, nu, d, cfg).kappa;

    // two async halves reduced by max, plus the fallback
    auto scan = [&](std::size_t lo, std::size_t hi) {
        double best = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            best = std::max(best, kappa_for_datapoint(ds[i], nu, r, x_dev, d, cfg));
        return best;
    };
    auto f1 = std::async(std::launch::async, scan, 0, ds.size() / 2);
    auto f2 = std::async(std::launch::async, scan, ds.size() / 2, ds.size());
    const double parallel =
        std::max({f1.get(), f2.get(), kappa_fallback(nu, r, x_dev, d, cfg)});
    CHECK(parallel == sequential);
}
