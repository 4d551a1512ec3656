#pragma once

// Assembly helpers shared by the command line tool and the test suites:
// they turn a parsed key/value config into plants, governor settings, and
// sweep options.

#include "lrg/config.hpp"
#include "lrg/governor.hpp"
#include "lrg/learning.hpp"
#include "lrg/plant.hpp"
#include "lrg/steady_state_map.hpp"

#include <memory>

namespace lrg {

/// Builds the configured plant ("plant = truck | lti").
std::unique_ptr<Plant> plant_from_config(const KeyValues& kv);

/// governor.* section.
GovernorConfig governor_from_config(const KeyValues& kv);

/// learning.* section.
LearningConfig learning_from_config(const KeyValues& kv);

/// map.* section plus sim.dt.
MapBuildOptions map_options_from_config(const KeyValues& kv);

/// Node grid from map.nu_min / nu_max / nu_step.
std::vector<double> map_grid_from_config(const KeyValues& kv);

double sim_dt_from_config(const KeyValues& kv);

} // namespace lrg
