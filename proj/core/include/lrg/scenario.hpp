#pragma once

#include "lrg/config.hpp"
#include "lrg/dataset.hpp"
#include "lrg/governor.hpp"
#include "lrg/plant.hpp"
#include "lrg/steady_state_map.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lrg {

enum class ScenarioKind { step, sine_and_dwell, speed_profile };
enum class GovernorMode { none, lrg_before, lrg_after };
enum class UpdateLaw { basic, enhanced };

/// Documented envelope for the speed-profile ramp rate (m/s^2).
inline constexpr double kMinSpeedRate = -3.0;
inline constexpr double kMaxSpeedRate = 1.0;

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::step;
    GovernorMode mode = GovernorMode::none;
    UpdateLaw update_law = UpdateLaw::basic;
    double duration = 12.0;

    double step_amplitude = 50.0; // command units (deg of steering wheel for the truck)
    double step_time = 1.0;

    double sine_amplitude = 80.0;
    double sine_frequency = 0.7; // Hz
    double dwell = 0.5;          // seconds held at the third quarter-cycle peak

    double speed_start = 25.0;
    double speed_end = 25.0;
    double speed_rate = 0.0; // m/s^2, within [kMinSpeedRate, kMaxSpeedRate]

    void validate() const;
};

/// Parses the scenario.* section. Unknown scenario.* keys are rejected.
ScenarioConfig scenario_from_config(const KeyValues& kv);

/// Commanded reference at time t for the configured profile.
double scenario_command(const ScenarioConfig& scenario, double t);

/// Instantaneous scheduled speed for speed_profile runs.
double scenario_speed(const ScenarioConfig& scenario, double t);

/// One trained operating point: the lookup table and dataset for a fixed
/// speed. Ordinary runs use exactly one node; speed-profile runs bracket the
/// instantaneous speed between nodes and take the conservative combination
/// (min kappa, min d) of the two.
struct GovernorNode {
    double speed = 0.0;
    const SteadyStateMap* map = nullptr;
    const Dataset* dataset = nullptr; // nullptr = untrained (empty dataset)
};

struct ScenarioResult {
    long violation_steps = 0;          // integrator steps with the output outside Y
    bool safety_fault = false;         // violations under an active governor
    double max_abs_output = 0.0;       // max over the run of ||y||_inf
    double command_modification = 0.0; // integral of |r_raw - nu| dt
    double final_time = 0.0;
};

/// Runs one scenario and optionally writes the per-step CSV log (one row per
/// integrator step). `header_comments` are emitted verbatim into the CSV
/// comment block (config hash, seeds, versions). `set_speed` is invoked with
/// the scheduled speed before integration steps of speed-profile runs.
ScenarioResult run_scenario(Plant& plant, const std::vector<GovernorNode>& nodes,
                            const GovernorConfig& governor, const ScenarioConfig& scenario,
                            double dt, std::ostream* csv,
                            const std::vector<std::string>& header_comments = {},
                            const std::function<void(double)>& set_speed = {});

/// One (speed, fill) node of a trained ensemble for the envelope surface.
struct SurfaceNode {
    double speed = 0.0;
    double fill = 0.0;
    const Dataset* dataset = nullptr; // nullptr = untrained node
};

struct SurfacePoint {
    double speed = 0.0;
    double fill = 0.0;
    double dbar = 0.0;
    bool trained = false; // untrained nodes fall back to the dataset-free envelope
};

/// Evaluates the deviation envelope at a fixed probe across the ensemble.
std::vector<SurfacePoint> dbar_surface(const std::vector<SurfaceNode>& ensemble,
                                       const Eigen::VectorXd& probe_nu,
                                       const Eigen::VectorXd& probe_delta_nu,
                                       const Eigen::VectorXd& probe_delta_x,
                                       const GovernorConfig& governor);

void save_surface_csv(const std::vector<SurfacePoint>& surface, const std::string& path,
                      const std::vector<std::string>& header_comments = {});

} // namespace lrg
