#pragma once

#include "lrg/plant.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace lrg {

/// How d(nu) is evaluated between table nodes.
enum class InterpMode {
    linear,       // linear interpolation of d between the bracketing nodes
    conservative, // min of the bracketing nodes
};

struct MapNode {
    double nu = 0.0;
    Eigen::VectorXd x_nu;
    Eigen::VectorXd y_nu;
    double d = 0.0;           // distance from y_nu to the constraint boundary
    double settle_time = 0.0; // simulated time until ||xdot|| < tolerance
    double residual = 0.0;    // ||xdot|| at acceptance
    bool usable = true;       // false when the settle loop timed out
};

/// Tabulated scalar-command steady-state map nu -> (x_nu, y_nu, d(nu)),
/// built from settling experiments and kept as a lookup table for online
/// use. Node commands are strictly ascending.
class SteadyStateMap {
public:
    SteadyStateMap() = default;
    SteadyStateMap(std::vector<MapNode> nodes, InterpMode mode);

    const std::vector<MapNode>& nodes() const { return nodes_; }
    InterpMode interpolation() const { return mode_; }
    void set_interpolation(InterpMode mode) { mode_ = mode; }

    double nu_min() const { return nodes_.front().nu; }
    double nu_max() const { return nodes_.back().nu; }

    /// True when nu lies in the hull and its bracketing nodes settled.
    bool admissible(double nu) const;

    /// d(nu) per the configured interpolation mode. Refuses queries outside
    /// the hull or across unusable nodes.
    double distance_to_boundary(double nu) const;

    /// Component-wise linear interpolation of the equilibrium state.
    Eigen::VectorXd equilibrium_state(double nu) const;

    /// Component-wise linear interpolation of the steady output.
    Eigen::VectorXd steady_output(double nu) const;

    /// Largest |d(node_i+1) - d(node_i)| over adjacent usable nodes; a
    /// coarse-table quality indicator reported by the CLI.
    double max_adjacent_jump() const;

    void save_csv(const std::string& path) const;
    static SteadyStateMap load_csv(const std::string& path, InterpMode mode = InterpMode::linear);

private:
    std::pair<std::size_t, std::size_t> bracket(double nu) const;

    std::vector<MapNode> nodes_;
    InterpMode mode_ = InterpMode::linear;
};

struct MapBuildOptions {
    double settle_tolerance = 1e-8; // on ||xdot||
    double max_settle_time = 120.0; // seconds of simulated time per node
    double dt = 1e-3;
    int stripes = 1; // independent warm-start sweeps, computed concurrently
    InterpMode mode = InterpMode::linear;
};

/// Sweeps the node grid, settling each command from the previous node's
/// equilibrium (warm start). Nodes that do not settle within the time budget
/// are flagged unusable rather than failing the build. Stripes partition the
/// grid into independent serial sweeps so the result does not depend on
/// thread scheduling.
SteadyStateMap build_steady_state_map(const Plant& plant, const std::vector<double>& node_grid,
                                      const MapBuildOptions& options);

/// Convenience grid builder: nu_min, nu_min+step, ..., nu_max.
std::vector<double> uniform_grid(double nu_min, double nu_max, double step);

} // namespace lrg
