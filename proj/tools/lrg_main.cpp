// lrg: learning reference governor toolkit.
//
// Subcommands: map, learn, run, estimate-L, prune, surface. Everything is
// driven by one key/value config file plus --set overrides; all outputs are
// CSV with a deterministic comment header (config hash, seeds, version).
//
// Exit codes: 0 success, 2 config error, 3 safety fault, 4 numerical fault.

#include <CLI11.hpp>

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/holder.hpp"
#include "lrg/learning.hpp"
#include "lrg/scenario.hpp"
#include "lrg/toolkit.hpp"
#include "lrg/vehicle_plant.hpp"
#include "lrg/version.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Session {
    lrg::KeyValues kv;
    std::unique_ptr<lrg::Plant> plant;
    lrg::GovernorConfig governor;
    lrg::LearningConfig learning;
    lrg::MapBuildOptions map_options;
    std::vector<double> grid;
    lrg::ScenarioConfig scenario;
    double dt = 1e-3;
    std::uint64_t config_hash = 0;
};

Session load_session(const std::string& config_path, const std::vector<std::string>& overrides) {
    Session s;
    s.kv = lrg::KeyValues::parse_file(config_path);
    for (const auto& o : overrides) s.kv.apply_override(o);
    s.config_hash = s.kv.content_hash();
    s.plant = lrg::plant_from_config(s.kv);
    s.governor = lrg::governor_from_config(s.kv);
    s.learning = lrg::learning_from_config(s.kv);
    s.map_options = lrg::map_options_from_config(s.kv);
    s.grid = lrg::map_grid_from_config(s.kv);
    s.scenario = lrg::scenario_from_config(s.kv);
    s.dt = lrg::sim_dt_from_config(s.kv);
    s.kv.require_all_used();
    return s;
}

std::vector<std::string> standard_comments(const Session& s,
                                           const std::vector<std::string>& extra = {}) {
    std::vector<std::string> out;
    out.push_back(std::string("version=") + lrg::kVersion);
    out.push_back("config_hash=" + std::to_string(s.config_hash));
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

struct EnsembleRow {
    double speed = 0.0;
    double fill = 0.0;
    std::string map_path;
    std::string dataset_path; // may be empty (untrained node)
};

std::vector<EnsembleRow> load_ensemble_index(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lrg::ConfigError("cannot open ensemble index: " + path);
    std::vector<EnsembleRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // "speed,fill,map,dataset"
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        EnsembleRow row;
        std::string cell;
        std::getline(ss, cell, ',');
        row.speed = std::stod(cell);
        std::getline(ss, cell, ',');
        row.fill = std::stod(cell);
        std::getline(ss, row.map_path, ',');
        std::getline(ss, row.dataset_path, ',');
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw lrg::ConfigError(path + ": empty ensemble index");
    return rows;
}

int cmd_map(const Session& s, const std::string& out_path) {
    auto map = lrg::build_steady_state_map(*s.plant, s.grid, s.map_options);
    map.save_csv(out_path);
    long unusable = 0;
    for (const auto& n : map.nodes())
        if (!n.usable) ++unusable;
    std::cout << "map: " << map.nodes().size() << " nodes, " << unusable
              << " unusable, max adjacent d-jump " << lrg::format_double(map.max_adjacent_jump())
              << "\n";
    return 0;
}

int cmd_learn(const Session& s, const std::string& map_path, const std::string& out_dir) {
    auto map = lrg::SteadyStateMap::load_csv(map_path, s.map_options.mode);
    auto report = lrg::run_learning(*s.plant, map, s.governor, s.learning, s.dt);

    std::filesystem::create_directories(out_dir);
    report.dataset.save_csv(out_dir + "/dataset.csv", s.governor.norm);
    report.save_trace_csv(out_dir + "/trace.csv");
    report.save_step_log_csv(out_dir + "/steps.csv");

    std::cout << "learn: " << report.dataset.size() << " data points ("
              << report.dataset_unpruned.size() << " before pruning), "
              << report.constraint_violations << " violations, final windowed error "
              << lrg::format_double(report.tracking_error_trace.empty()
                                        ? 0.0
                                        : report.tracking_error_trace.back().value)
              << (report.early_terminated ? ", early-terminated" : "") << "\n";
    return 0;
}

int cmd_run(const Session& s, const std::string& map_path, const std::string& dataset_path,
            const std::string& ensemble_path, const std::string& out_path) {
    // Assemble governor nodes: either a single constant-speed node or the
    // bracketing ensemble for speed-profile runs.
    std::vector<lrg::SteadyStateMap> maps;
    std::vector<lrg::Dataset> datasets;
    std::vector<lrg::GovernorNode> nodes;

    const bool trained = s.scenario.mode == lrg::GovernorMode::lrg_after;
    if (!ensemble_path.empty()) {
        auto rows = load_ensemble_index(ensemble_path);
        const double fill = s.kv.has("vehicle.fill_ratio") ? s.kv.get_double("vehicle.fill_ratio") : 0.5;
        maps.reserve(rows.size());
        datasets.reserve(rows.size());
        for (const auto& row : rows) {
            if (std::abs(row.fill - fill) > 1e-9) continue;
            maps.push_back(lrg::SteadyStateMap::load_csv(row.map_path, s.map_options.mode));
            if (trained && !row.dataset_path.empty())
                datasets.push_back(lrg::Dataset::load_csv(row.dataset_path));
            else
                datasets.push_back(lrg::Dataset(1, s.plant->state_dim()));
            nodes.push_back({row.speed, nullptr, nullptr});
        }
        if (nodes.empty())
            throw lrg::ConfigError("ensemble index has no nodes at the configured fill ratio");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            nodes[i].map = &maps[i];
            nodes[i].dataset = &datasets[i];
        }
        std::sort(nodes.begin(), nodes.end(),
                  [](const auto& a, const auto& b) { return a.speed < b.speed; });
    } else {
        if (map_path.empty()) throw lrg::ConfigError("run needs --map or --ensemble");
        maps.push_back(lrg::SteadyStateMap::load_csv(map_path, s.map_options.mode));
        if (trained) {
            if (dataset_path.empty())
                throw lrg::ConfigError("mode lrg_after needs --dataset (or --ensemble)");
            datasets.push_back(lrg::Dataset::load_csv(dataset_path));
        } else {
            datasets.push_back(lrg::Dataset(1, s.plant->state_dim()));
        }
        nodes.push_back({s.scenario.speed_start, &maps[0], &datasets[0]});
    }

    auto* truck = dynamic_cast<lrg::TruckPlant*>(s.plant.get());
    std::function<void(double)> set_speed;
    if (truck && s.scenario.kind == lrg::ScenarioKind::speed_profile)
        set_speed = [truck](double v) { truck->set_speed(v); };

    std::ofstream csv(out_path);
    if (!csv) throw lrg::ConfigError("cannot write run log: " + out_path);
    auto result = lrg::run_scenario(*s.plant, nodes, s.governor, s.scenario, s.dt, &csv,
                                    standard_comments(s), set_speed);

    std::cout << "run: " << result.violation_steps << " violation steps, max |y| "
              << lrg::format_double(result.max_abs_output) << ", command modification "
              << lrg::format_double(result.command_modification) << "\n";
    if (result.safety_fault) {
        std::cerr << "safety fault: constraint violated under an active governor\n";
        return 3;
    }
    return 0;
}

int cmd_estimate(const Session& s, const std::string& map_path, int samples, std::uint64_t seed,
                 double safety_factor, const std::string& out_path) {
    auto map = lrg::SteadyStateMap::load_csv(map_path, s.map_options.mode);
    auto est = lrg::estimate_holder_sampling(*s.plant, map, samples, s.governor.holder_beta, seed,
                                             safety_factor, s.governor, s.dt);
    est.save_csv(out_path);
    std::cout << "estimate-L: raw " << lrg::format_double(est.max_observed_ratio) << ", scaled "
              << lrg::format_double(est.L) << " (beta " << lrg::format_double(est.beta) << ")\n";
    return 0;
}

int cmd_prune(const Session& s, const std::string& dataset_path, double cell_diameter,
              const std::string& out_path) {
    lrg::ProductNorm norm = s.governor.norm;
    auto ds = lrg::Dataset::load_csv(dataset_path, &norm);
    auto pruned = lrg::prune_dataset(ds, cell_diameter, norm);
    pruned.save_csv(out_path, norm);
    std::cout << "prune: " << ds.size() << " -> " << pruned.size() << " points\n";
    return 0;
}

int cmd_surface(const Session& s, const std::string& ensemble_path, double probe_nu,
                double probe_dnu, const std::string& out_path) {
    auto rows = load_ensemble_index(ensemble_path);
    std::vector<lrg::Dataset> datasets;
    datasets.reserve(rows.size());
    std::vector<lrg::SurfaceNode> ensemble;
    for (const auto& row : rows) {
        lrg::SurfaceNode node;
        node.speed = row.speed;
        node.fill = row.fill;
        if (!row.dataset_path.empty()) {
            datasets.push_back(lrg::Dataset::load_csv(row.dataset_path));
            node.dataset = &datasets.back();
        }
        ensemble.push_back(node);
    }
    // datasets vector must not reallocate after pointers are taken
    const Eigen::VectorXd nu = Eigen::VectorXd::Constant(1, probe_nu);
    const Eigen::VectorXd dnu = Eigen::VectorXd::Constant(1, probe_dnu);
    const Eigen::VectorXd dx = Eigen::VectorXd::Zero(s.plant->state_dim());
    auto surface = lrg::dbar_surface(ensemble, nu, dnu, dx, s.governor);
    lrg::save_surface_csv(surface, out_path,
                          standard_comments(s, {"probe_nu=" + lrg::format_double(probe_nu),
                                                "probe_dnu=" + lrg::format_double(probe_dnu)}));
    std::cout << "surface: " << surface.size() << " nodes\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learning reference governor toolkit"};
    app.require_subcommand(1);

    std::string config_path, map_path, dataset_path, ensemble_path, out_path, out_dir;
    std::vector<std::string> overrides;
    int samples = 80;
    std::uint64_t seed = 1;
    double safety_factor = 1.1;
    double cell_diameter = 0.1;
    double probe_nu = -25.0, probe_dnu = 25.0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key/value config file")->required();
        cmd->add_option("--set", overrides, "override config entries (section.key=value)");
    };

    auto* c_map = app.add_subcommand("map", "build the steady-state map");
    add_common(c_map);
    c_map->add_option("--out", out_path, "output map CSV")->required();

    auto* c_learn = app.add_subcommand("learn", "run the safe learning phase");
    add_common(c_learn);
    c_learn->add_option("--map", map_path, "steady-state map CSV")->required();
    c_learn->add_option("--out-dir", out_dir, "output directory")->required();

    auto* c_run = app.add_subcommand("run", "run an operating-phase scenario");
    add_common(c_run);
    c_run->add_option("--map", map_path, "steady-state map CSV");
    c_run->add_option("--dataset", dataset_path, "trained dataset CSV");
    c_run->add_option("--ensemble", ensemble_path, "ensemble index CSV (speed,fill,map,dataset)");
    c_run->add_option("--out", out_path, "output trajectory CSV")->required();

    auto* c_est = app.add_subcommand("estimate-L", "sampling-based continuity constant estimate");
    add_common(c_est);
    c_est->add_option("--map", map_path, "steady-state map CSV")->required();
    c_est->add_option("--samples", samples, "sample budget");
    c_est->add_option("--seed", seed, "sampling seed");
    c_est->add_option("--safety-factor", safety_factor, "multiplier on the raw estimate");
    c_est->add_option("--out", out_path, "output report CSV")->required();

    auto* c_prune = app.add_subcommand("prune", "thin a dataset by cell diameter");
    add_common(c_prune);
    c_prune->add_option("--dataset", dataset_path, "dataset CSV")->required();
    c_prune->add_option("--cell-diameter", cell_diameter, "cell diameter in the product norm");
    c_prune->add_option("--out", out_path, "output dataset CSV")->required();

    auto* c_surface = app.add_subcommand("surface", "deviation envelope over a trained ensemble");
    add_common(c_surface);
    c_surface->add_option("--ensemble", ensemble_path, "ensemble index CSV")->required();
    c_surface->add_option("--probe-nu", probe_nu, "probe reference");
    c_surface->add_option("--probe-dnu", probe_dnu, "probe step");
    c_surface->add_option("--out", out_path, "output surface CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Session session = load_session(config_path, overrides);
        if (c_map->parsed()) return cmd_map(session, out_path);
        if (c_learn->parsed()) return cmd_learn(session, map_path, out_dir);
        if (c_run->parsed())
            return cmd_run(session, map_path, dataset_path, ensemble_path, out_path);
        if (c_est->parsed())
            return cmd_estimate(session, map_path, samples, seed, safety_factor, out_path);
        if (c_prune->parsed()) return cmd_prune(session, dataset_path, cell_diameter, out_path);
        if (c_surface->parsed())
            return cmd_surface(session, ensemble_path, probe_nu, probe_dnu, out_path);
    } catch (const lrg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lrg::SafetyFault& e) {
        std::cerr << "safety fault: " << e.what() << "\n";
        return 3;
    } catch (const lrg::NumericalFault& e) {
        std::cerr << "numerical fault: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
