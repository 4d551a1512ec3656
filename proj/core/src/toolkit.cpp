#include "lrg/toolkit.hpp"

#include "lrg/errors.hpp"
#include "lrg/vehicle_plant.hpp"

namespace lrg {

std::unique_ptr<Plant> plant_from_config(const KeyValues& kv) {
    const std::string kind = kv.get_string("plant");
    if (kind == "truck") {
        return std::make_unique<TruckPlant>(vehicle_params_from_config(kv));
    }
    if (kind == "lti") {
        Eigen::MatrixXd A(1, 1), B(1, 1), C(1, 1), F(1, 1);
        A << kv.get_double("lti.a");
        B << kv.get_double("lti.b");
        C << kv.get_double("lti.c");
        F << kv.get_double("lti.f");
        if (!(A(0, 0) < 0.0)) throw ConfigError("lti.a must be negative (stable plant)");
        Box v{Eigen::VectorXd::Constant(1, kv.get_double("lti.command_min")),
              Eigen::VectorXd::Constant(1, kv.get_double("lti.command_max"))};
        Box y{Eigen::VectorXd::Constant(1, kv.get_double("lti.y_min")),
              Eigen::VectorXd::Constant(1, kv.get_double("lti.y_max"))};
        kv.require_all_used("lti.");
        return std::make_unique<LtiPlant>(A, B, C, F, v, y);
    }
    throw ConfigError("unknown plant '" + kind + "'");
}

GovernorConfig governor_from_config(const KeyValues& kv) {
    GovernorConfig cfg;
    cfg.holder_L = kv.get_double("governor.holder_L", cfg.holder_L);
    cfg.holder_beta = kv.get_double("governor.holder_beta", cfg.holder_beta);
    cfg.horizon_T = kv.get_double("governor.horizon_T", cfg.horizon_T);
    cfg.epsilon = kv.get_double("governor.epsilon", cfg.epsilon);
    cfg.sample_period = kv.get_double("governor.sample_period", cfg.sample_period);
    cfg.lambda = kv.get_double("governor.lambda", cfg.lambda);
    cfg.delta_v1 = kv.get_double("governor.delta_v1", cfg.delta_v1);
    cfg.norm.w_nu = kv.get_double("governor.w_nu", cfg.norm.w_nu);
    cfg.norm.w_delta_nu = kv.get_double("governor.w_delta_nu", cfg.norm.w_delta_nu);
    cfg.norm.w_delta_x = kv.get_double("governor.w_delta_x", cfg.norm.w_delta_x);
    kv.require_all_used("governor.");
    cfg.validate();
    return cfg;
}

LearningConfig learning_from_config(const KeyValues& kv) {
    LearningConfig lc;
    lc.n_max = kv.get_int("learning.n_max", lc.n_max);
    lc.k_max = kv.get_int("learning.k_max", lc.k_max);
    const std::string source = kv.get_string("learning.command_source", "uniform");
    if (source == "uniform")
        lc.command_source = CommandSource::uniform;
    else if (source == "profile")
        lc.command_source = CommandSource::profile;
    else
        throw ConfigError("unknown learning.command_source '" + source + "'");
    lc.profile = kv.get_double_list("learning.profile", {});
    lc.initial_command = kv.get_double("learning.initial_command", lc.initial_command);
    lc.window_T = kv.get_double("learning.window_T", lc.window_T);
    lc.error_threshold = kv.get_double("learning.error_threshold", lc.error_threshold);
    lc.prune_cell_diameter = kv.get_double("learning.prune_cell_diameter", lc.prune_cell_diameter);
    lc.rng_seed = kv.get_u64("learning.rng_seed", lc.rng_seed);
    kv.require_all_used("learning.");
    lc.validate();
    return lc;
}

MapBuildOptions map_options_from_config(const KeyValues& kv) {
    MapBuildOptions opt;
    opt.settle_tolerance = kv.get_double("map.settle_tol", opt.settle_tolerance);
    opt.max_settle_time = kv.get_double("map.max_settle_time", opt.max_settle_time);
    opt.dt = sim_dt_from_config(kv);
    opt.stripes = kv.get_int("map.stripes", opt.stripes);
    const std::string mode = kv.get_string("map.interpolation", "linear");
    if (mode == "linear")
        opt.mode = InterpMode::linear;
    else if (mode == "conservative")
        opt.mode = InterpMode::conservative;
    else
        throw ConfigError("unknown map.interpolation '" + mode + "'");
    return opt;
}

std::vector<double> map_grid_from_config(const KeyValues& kv) {
    return uniform_grid(kv.get_double("map.nu_min"), kv.get_double("map.nu_max"),
                        kv.get_double("map.nu_step"));
}

double sim_dt_from_config(const KeyValues& kv) {
    const double dt = kv.get_double("sim.dt", 1e-3);
    if (!(dt > 0.0)) throw ConfigError("sim.dt must be > 0");
    return dt;
}

} // namespace lrg
