#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Slower end-to-end checks on the truck plant; the shared steady-state map
// is built once per process.

#include "lrg/learning.hpp"
#include "lrg/scenario.hpp"
#include "lrg/vehicle_plant.hpp"
#include "lrg/integrator.hpp"
#include <sstream>

#include <cmath>

using namespace lrg;

namespace {

VehicleParams truck_params() {
    auto kv = KeyValues::parse_file(std::string(LRG_CONFIG_DIR) + "/truck.cfg");
    return vehicle_params_from_config(kv);
}

const SteadyStateMap& truck_map() {
    static SteadyStateMap map = [] {
        TruckPlant plant(truck_params());
        MapBuildOptions opt;
        opt.settle_tolerance = 1e-7;
        opt.max_settle_time = 80.0;
        opt.dt = 1e-3;
        opt.stripes = 4;
        return build_steady_state_map(plant, uniform_grid(-90.0, 90.0, 5.0), opt);
    }();
    return map;
}

} // namespace

TEST_CASE("truck steady-state map settles everywhere and is symmetric") {
    const auto& map = truck_map();
    for (const auto& node : map.nodes()) CHECK(node.usable);

    // left/right symmetry of the distance table
    const auto& nodes = map.nodes();
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        CHECK(nodes[i].nu == doctest::Approx(-nodes[n - 1 - i].nu));
        CHECK(nodes[i].d == doctest::Approx(nodes[n - 1 - i].d).epsilon(2e-3));
    }

    // margin shrinks with steering magnitude
    const double d0 = map.distance_to_boundary(0.0);
    CHECK(d0 > map.distance_to_boundary(50.0));
    CHECK(d0 <= 1.0 + 1e-9);
}

TEST_CASE("step responses settle to a steady state") {
    TruckPlant plant(truck_params());
    ScenarioConfig sc;
    sc.kind = ScenarioKind::step;
    sc.mode = GovernorMode::none;
    sc.duration = 30.0;
    sc.step_amplitude = 0.02 / plant.params().steer_ratio * 180.0 / 3.14159265358979;
    sc.step_time = 0.5;

    GovernorConfig gov;
    gov.holder_L = 0.3;
    gov.sample_period = 0.1;
    gov.horizon_T = 10.0;
    gov.epsilon = 0.02;
    gov.lambda = 0.5;
    gov.delta_v1 = 0.05;
    gov.norm.w_delta_x = 9.0;

    std::vector<GovernorNode> nodes{{25.0, &truck_map(), nullptr}};
    std::ostringstream csv;
    auto result = run_scenario(plant, nodes, gov, sc, 1e-3, &csv);
    CHECK(result.violation_steps == 0);

    // parse the LTR column over the last second and check it pinned down
    std::istringstream in(csv.str());
    std::string line;
    std::vector<std::string> header;
    std::vector<double> t_vals, ltr_vals;
    int t_col = -1, ltr_col = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> parts;
        while (std::getline(cells, cell, ',')) parts.push_back(cell);
        if (t_col < 0) {
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (parts[i] == "t") t_col = static_cast<int>(i);
                if (parts[i] == "ltr") ltr_col = static_cast<int>(i);
            }
            REQUIRE(t_col >= 0);
            REQUIRE(ltr_col >= 0);
            continue;
        }
        t_vals.push_back(std::stod(parts[t_col]));
        ltr_vals.push_back(std::stod(parts[ltr_col]));
    }
    REQUIRE(!ltr_vals.empty());
    double lo = 1e9, hi = -1e9, steady = ltr_vals.back();
    for (std::size_t i = 0; i < t_vals.size(); ++i) {
        if (t_vals[i] >= sc.duration - 1.0) {
            lo = std::min(lo, ltr_vals[i]);
            hi = std::max(hi, ltr_vals[i]);
        }
    }
    CHECK(std::abs(steady) > 1e-4); // a real turn
    CHECK(hi - lo < 1e-4 * std::max(1.0, std::abs(steady)));
}

TEST_CASE("steady yaw rate grows with steering across load cases") {
    for (int variant = 0; variant < 3; ++variant) {
        VehicleParams p = truck_params();
        if (variant == 0) { // no load
            p.m_t = 1700.0;
            p.m_l = 0.0;
        } else if (variant == 1) { // solid load
            p.m_t = 3700.0;
            p.m_l = 0.0;
        } // variant 2: liquid load from the config

        TruckPlant plant(p);
        double prev_r = 0.0;
        for (double sw_deg : {10.0, 25.0, 40.0}) {
            Eigen::VectorXd x = plant.initial_state();
            x = simulate(plant, x, Eigen::VectorXd::Constant(1, sw_deg), 40.0, 2e-3);
            const double r_ss = x[3];
            CHECK(r_ss > prev_r);
            prev_r = r_ss;
        }
    }
}

TEST_CASE("liquid load slows convergence relative to rigid loads") {
    // settling time of the roll rate after a step, same total mass
    const auto settle_time = [&](double m_t, double m_l) {
        VehicleParams p = truck_params();
        p.m_t = m_t;
        p.m_l = m_l;
        TruckPlant plant(p);
        Eigen::VectorXd x = plant.initial_state();
        const Eigen::VectorXd cmd = Eigen::VectorXd::Constant(1, 30.0);
        // settle reference
        Eigen::VectorXd x_ss = simulate(plant, x, cmd, 120.0, 2e-3);
        double last_above = 0.0;
        double t = 0.0;
        Eigen::VectorXd xi = plant.initial_state();
        while (t < 60.0) {
            xi = rk4_step(plant, xi, cmd, 2e-3);
            t += 2e-3;
            if ((xi - x_ss).norm() > 1e-3) last_above = t;
        }
        return last_above;
    };
    const double rigid = settle_time(3700.0, 0.0);
    const double liquid = settle_time(1700.0, 2000.0);
    CHECK(liquid > rigid);
}
