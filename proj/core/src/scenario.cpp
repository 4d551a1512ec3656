#include "lrg/scenario.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/integrator.hpp"
#include "lrg/vehicle_plant.hpp"
#include "lrg/version.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace lrg {

void ScenarioConfig::validate() const {
    if (!(duration > 0.0)) throw ConfigError("scenario duration must be > 0");
    if (kind == ScenarioKind::step && !(step_time >= 0.0))
        throw ConfigError("step_time must be >= 0");
    if (kind != ScenarioKind::step) {
        if (!(sine_frequency > 0.0)) throw ConfigError("sine_frequency must be > 0");
        if (!(dwell >= 0.0)) throw ConfigError("dwell must be >= 0");
    }
    if (kind == ScenarioKind::speed_profile) {
        if (!(speed_start > 0.0) || !(speed_end > 0.0))
            throw ConfigError("speeds must be > 0");
        if (speed_rate < kMinSpeedRate || speed_rate > kMaxSpeedRate || speed_rate == 0.0)
            throw ConfigError("speed_rate must lie in the documented envelope [-3, 1] m/s^2");
        if ((speed_end - speed_start) * speed_rate < 0.0)
            throw ConfigError("speed_rate sign does not reach speed_end");
    }
}

ScenarioConfig scenario_from_config(const KeyValues& kv) {
    ScenarioConfig sc;
    const std::string kind = kv.get_string("scenario.kind", "step");
    if (kind == "step")
        sc.kind = ScenarioKind::step;
    else if (kind == "sine_and_dwell")
        sc.kind = ScenarioKind::sine_and_dwell;
    else if (kind == "speed_profile")
        sc.kind = ScenarioKind::speed_profile;
    else
        throw ConfigError("unknown scenario.kind '" + kind + "'");

    const std::string mode = kv.get_string("scenario.mode", "no_lrg");
    if (mode == "no_lrg")
        sc.mode = GovernorMode::none;
    else if (mode == "lrg_before")
        sc.mode = GovernorMode::lrg_before;
    else if (mode == "lrg_after")
        sc.mode = GovernorMode::lrg_after;
    else
        throw ConfigError("unknown scenario.mode '" + mode + "'");

    const std::string law = kv.get_string("scenario.update_law", "basic");
    if (law == "basic")
        sc.update_law = UpdateLaw::basic;
    else if (law == "enhanced")
        sc.update_law = UpdateLaw::enhanced;
    else
        throw ConfigError("unknown scenario.update_law '" + law + "'");

    sc.duration = kv.get_double("scenario.duration", sc.duration);
    sc.step_amplitude = kv.get_double("scenario.step_amplitude", sc.step_amplitude);
    sc.step_time = kv.get_double("scenario.step_time", sc.step_time);
    sc.sine_amplitude = kv.get_double("scenario.sine_amplitude", sc.sine_amplitude);
    sc.sine_frequency = kv.get_double("scenario.sine_frequency", sc.sine_frequency);
    sc.dwell = kv.get_double("scenario.dwell", sc.dwell);
    sc.speed_start = kv.get_double("scenario.speed_start", sc.speed_start);
    sc.speed_end = kv.get_double("scenario.speed_end", sc.speed_end);
    sc.speed_rate = kv.get_double("scenario.speed_rate", sc.speed_rate);
    kv.require_all_used("scenario.");
    sc.validate();
    return sc;
}

double scenario_command(const ScenarioConfig& sc, double t) {
    if (sc.kind == ScenarioKind::step) return t < sc.step_time ? 0.0 : sc.step_amplitude;
    // Sine with a dwell held at the third quarter-cycle peak.
    const double period = 1.0 / sc.sine_frequency;
    const double t_peak = 0.75 * period;
    const double omega = 2.0 * std::numbers::pi * sc.sine_frequency;
    if (t < t_peak) return sc.sine_amplitude * std::sin(omega * t);
    if (t < t_peak + sc.dwell) return -sc.sine_amplitude;
    if (t < period + sc.dwell) return sc.sine_amplitude * std::sin(omega * (t - sc.dwell));
    return 0.0;
}

double scenario_speed(const ScenarioConfig& sc, double t) {
    if (sc.kind != ScenarioKind::speed_profile) return sc.speed_start;
    const double v = sc.speed_start + sc.speed_rate * t;
    const double lo = std::min(sc.speed_start, sc.speed_end);
    const double hi = std::max(sc.speed_start, sc.speed_end);
    return std::clamp(v, lo, hi);
}

namespace {

struct NodeBracket {
    const GovernorNode* a = nullptr;
    const GovernorNode* b = nullptr;
};

NodeBracket bracket_nodes(const std::vector<GovernorNode>& nodes, double speed) {
    NodeBracket out;
    out.a = &nodes.front();
    out.b = &nodes.front();
    for (const auto& n : nodes) {
        if (n.speed <= speed + 1e-9) out.a = &n;
    }
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        if (it->speed >= speed - 1e-9) out.b = &(*it);
    }
    return out;
}

struct NodeEval {
    double kappa = 0.0;
    double d = 0.0;
    bool admissible = true;
};

NodeEval eval_node(const GovernorNode& node, const Eigen::VectorXd& x, double r, double nu,
                   const GovernorConfig& cfg, const Dataset& empty) {
    NodeEval out;
    if (!node.map->admissible(r) || !node.map->admissible(nu)) {
        out.admissible = false;
        return out;
    }
    out.d = node.map->distance_to_boundary(nu);
    const Eigen::VectorXd x_dev = x - node.map->equilibrium_state(nu);
    const Dataset& ds = node.dataset ? *node.dataset : empty;
    out.kappa = compute_kappa(ds, x_dev, Eigen::VectorXd::Constant(1, r),
                              Eigen::VectorXd::Constant(1, nu), out.d, cfg)
                    .kappa;
    return out;
}

} // namespace

ScenarioResult run_scenario(Plant& plant, const std::vector<GovernorNode>& nodes,
                            const GovernorConfig& governor, const ScenarioConfig& scenario,
                            double dt, std::ostream* csv,
                            const std::vector<std::string>& header_comments,
                            const std::function<void(double)>& set_speed) {
    governor.validate();
    scenario.validate();
    if (plant.command_dim() != 1) throw ConfigError("scenario runner drives scalar-command plants");
    if (nodes.empty()) throw ConfigError("scenario runner needs at least one governor node");
    for (const auto& n : nodes)
        if (!n.map) throw ConfigError("governor node without a steady-state map");
    const bool governed = scenario.mode != GovernorMode::none;
    if (scenario.update_law == UpdateLaw::enhanced && nodes.size() != 1)
        throw ConfigError("enhanced update law supports single-node runs only");

    const auto* truck = dynamic_cast<TruckPlant*>(&plant);
    const Box v_box = plant.command_set();
    const Box y_box = plant.constraint_set();
    const Dataset empty(1, plant.state_dim());

    std::optional<CsvWriter> writer;
    if (csv) {
        writer.emplace(*csv);
        writer->comment(std::string("lrg scenario log v") + kVersion);
        for (const auto& c : header_comments) writer->comment(c);
        if (truck)
            writer->header({"t", "sw_cmd", "nu", "delta_f", "phi", "phi_dot", "beta", "r_yaw",
                            "theta", "theta_dot", "ltr", "d_nu", "kappa"});
        else {
            std::vector<std::string> cols{"t", "r", "nu"};
            for (int i = 0; i < plant.state_dim(); ++i) cols.push_back("x" + std::to_string(i));
            for (int i = 0; i < plant.output_dim(); ++i) cols.push_back("y" + std::to_string(i));
            cols.push_back("d_nu");
            cols.push_back("kappa");
            writer->header(cols);
        }
    }

    ScenarioResult result;

    // Start settled at the initial command's equilibrium, at the initial
    // scheduled speed.
    const double v0 = scenario_speed(scenario, 0.0);
    if (truck && set_speed) set_speed(v0);
    const NodeBracket init_bracket = bracket_nodes(nodes, v0);
    double nu = std::clamp(scenario_command(scenario, 0.0), v_box.lo[0], v_box.hi[0]);
    Eigen::VectorXd x = init_bracket.a->map->equilibrium_state(nu);

    Eigen::VectorXd y(plant.output_dim());
    double t = 0.0;
    double kappa_now = governed ? 0.0 : 1.0;
    double d_now = 0.0;
    const long sample_every = std::max(1L, std::lround(governor.sample_period / dt));
    long step = 0;

    const auto log_row = [&](double r_raw) {
        if (!writer) return;
        if (truck) {
            const double delta_f =
                truck->params().steer_ratio * nu * std::numbers::pi / 180.0;
            writer->row({t, r_raw, nu, delta_f, x[0], x[1], x[2], x[3], x[4], x[5], y[0], d_now,
                         kappa_now});
        } else {
            std::vector<double> row{t, r_raw, nu};
            for (int i = 0; i < x.size(); ++i) row.push_back(x[i]);
            for (int i = 0; i < y.size(); ++i) row.push_back(y[i]);
            row.push_back(d_now);
            row.push_back(kappa_now);
            writer->row(row);
        }
    };

    const long total_steps = std::lround(scenario.duration / dt);
    for (step = 0; step <= total_steps; ++step) {
        t = step * dt;
        const double speed = scenario_speed(scenario, t);
        if (set_speed) set_speed(speed);

        const double r_raw = scenario_command(scenario, t);
        const double r_gov = std::clamp(r_raw, v_box.lo[0], v_box.hi[0]);

        if (step % sample_every == 0) {
            const NodeBracket br = bracket_nodes(nodes, speed);
            if (!governed) {
                nu = r_gov;
                kappa_now = 1.0;
                d_now = br.a->map->admissible(nu) ? br.a->map->distance_to_boundary(nu) : 0.0;
            } else {
                NodeEval ea = eval_node(*br.a, x, r_gov, nu, governor, empty);
                NodeEval eb = br.b == br.a ? ea : eval_node(*br.b, x, r_gov, nu, governor, empty);
                if (!ea.admissible || !eb.admissible) {
                    kappa_now = 0.0; // refuse commands across unusable or uncovered nodes
                    d_now = 0.0;
                } else {
                    kappa_now = std::min(ea.kappa, eb.kappa);
                    d_now = std::min(ea.d, eb.d);
                    const Eigen::VectorXd nu_vec = Eigen::VectorXd::Constant(1, nu);
                    const Eigen::VectorXd r_vec = Eigen::VectorXd::Constant(1, r_gov);
                    if (scenario.update_law == UpdateLaw::enhanced) {
                        nu = apply_update_enhanced(nu_vec, r_vec, kappa_now, *nodes.front().map,
                                                   governor)
                                 .nu_plus[0];
                    } else {
                        nu = apply_update(nu_vec, r_vec, kappa_now)[0];
                    }
                }
            }
        }

        plant.output(x, Eigen::VectorXd::Constant(1, nu), y);
        result.max_abs_output = std::max(result.max_abs_output, y.cwiseAbs().maxCoeff());
        if (!y_box.contains(y)) ++result.violation_steps;
        result.command_modification += std::abs(r_raw - nu) * dt;
        log_row(r_raw);

        if (step < total_steps) x = rk4_step(plant, x, Eigen::VectorXd::Constant(1, nu), dt);
    }

    result.final_time = t;
    result.safety_fault = governed && result.violation_steps > 0;
    return result;
}

std::vector<SurfacePoint> dbar_surface(const std::vector<SurfaceNode>& ensemble,
                                       const Eigen::VectorXd& probe_nu,
                                       const Eigen::VectorXd& probe_delta_nu,
                                       const Eigen::VectorXd& probe_delta_x,
                                       const GovernorConfig& governor) {
    governor.validate();
    std::vector<SurfacePoint> out;
    out.reserve(ensemble.size());
    for (const auto& node : ensemble) {
        SurfacePoint p;
        p.speed = node.speed;
        p.fill = node.fill;
        p.trained = node.dataset != nullptr && !node.dataset->empty();
        if (p.trained) {
            p.dbar = dbar_estimate(*node.dataset, probe_nu, probe_delta_nu, probe_delta_x, governor);
        } else {
            const Dataset empty(static_cast<int>(probe_nu.size()),
                                static_cast<int>(probe_delta_x.size()));
            p.dbar = dbar_estimate(empty, probe_nu, probe_delta_nu, probe_delta_x, governor);
        }
        out.push_back(p);
    }
    return out;
}

void save_surface_csv(const std::vector<SurfacePoint>& surface, const std::string& path,
                      const std::vector<std::string>& header_comments) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write surface file: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg envelope surface v") + kVersion);
    for (const auto& c : header_comments) w.comment(c);
    w.header({"speed", "fill_ratio", "dbar", "trained"});
    for (const auto& p : surface) w.row({p.speed, p.fill, p.dbar, p.trained ? 1.0 : 0.0});
}

} // namespace lrg
