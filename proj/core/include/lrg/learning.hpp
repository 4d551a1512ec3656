#pragma once

#include "lrg/dataset.hpp"
#include "lrg/governor.hpp"
#include "lrg/plant.hpp"
#include "lrg/steady_state_map.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lrg {

enum class CommandSource {
    uniform, // seeded uniform draws over V, resampled if equal to the current reference
    profile, // fixed list of commands, cycled
};

struct LearningConfig {
    int n_max = 1;                 // training commands
    int k_max = 1;                 // governor samples per command
    CommandSource command_source = CommandSource::uniform;
    std::vector<double> profile;   // used when command_source == profile
    double initial_command = 0.0;  // nu(0-); the run starts at its equilibrium
    double window_T = 1.0;         // moving-average window for the tracking error
    double error_threshold = 0.0;  // early-stop when the windowed error drops below; 0 disables
    double prune_cell_diameter = 0.0; // post-processing cell size m; 0 keeps every point
    std::uint64_t rng_seed = 1;

    void validate() const;
};

struct TrackingTracePoint {
    double t = 0.0;
    double value = 0.0;
    bool full_window = false;
};

/// Everything the replay tests need to re-evaluate kappa at a recorded
/// sample instant: the dataset prefix is the first `dataset_size` points of
/// the final (unpruned) dataset.
struct LearningStepLog {
    double t = 0.0;
    double r = 0.0;
    double nu_pre = 0.0;
    double nu_post = 0.0;
    double kappa = 0.0;
    double d = 0.0;
    double d_tilde = 0.0;
    Eigen::VectorXd x_dev;
    std::size_t dataset_size = 0; // points available when kappa was computed
    bool fallback_wins = false;
    int tie_count = 0;
};

struct LearningReport {
    Dataset dataset;               // final dataset (pruned when configured)
    Dataset dataset_unpruned;      // as collected, for replay
    std::vector<TrackingTracePoint> tracking_error_trace;
    std::vector<LearningStepLog> steps;
    long constraint_violations = 0; // must be 0; violations abort the run instead
    bool early_terminated = false;
    double final_time = 0.0;
    double max_abs_output_excess = 0.0; // max over run of (||y|| excess into the margin), diagnostic

    void save_trace_csv(const std::string& path) const;
    void save_step_log_csv(const std::string& path) const;
};

/// Measured finite-horizon deviation bound: max over the integration grid of
/// ||y(t) - y_ref|| for the trajectory from x_start under the constant
/// command nu_minus + delta_nu, plus epsilon. The deviation is measured
/// against the pre-step steady output y_ref = y_nu(nu_minus).
double measure_dtilde(const Plant& plant, const Eigen::VectorXd& nu_minus,
                      const Eigen::VectorXd& delta_nu, const Eigen::VectorXd& x_start,
                      const Eigen::VectorXd& y_ref, double horizon_T, double epsilon, double dt);

/// Convenience overload resolving y_ref through the steady-state map.
double measure_dtilde(const Plant& plant, const SteadyStateMap& map, double nu_minus,
                      double delta_nu, const Eigen::VectorXd& x_start, double horizon_T,
                      double epsilon, double dt);

/// The training loop: per command, per sample instant, compute kappa from
/// the dataset, apply the update, roll the plant forward while measuring the
/// deviation bound over the horizon, and append the new data point. The
/// output constraint is asserted at every integrator step of the whole run
/// (including the measurement horizon beyond the next sample instant, where
/// a violation falsifies the certificate); any violation raises SafetyFault.
/// Early-terminates when the windowed tracking error drops below the
/// configured threshold.
LearningReport run_learning(const Plant& plant, const SteadyStateMap& map,
                            const GovernorConfig& governor_config, const LearningConfig& config,
                            double dt);

/// Windowed average of the tracking error by trapezoidal quadrature over the
/// recorded (t, error) samples. History may contain pre/post pairs at the
/// same instant, which makes the quadrature exact for piecewise-constant
/// signals. When the history does not span the full window the average runs
/// over the available span and *partial is set.
double tracking_error_ma(const std::vector<std::pair<double, double>>& history, double window_T,
                         double t_now, bool* partial = nullptr);

/// Cell-based thinning: partitions the (nu, delta_nu, delta_x) space into
/// axis-aligned cells of product-norm diameter <= cell_diameter and keeps
/// the smallest-d_tilde point of every occupied cell, in original order.
/// cell_diameter == 0 returns the dataset unchanged.
Dataset prune_dataset(const Dataset& dataset, double cell_diameter, const ProductNorm& norm);

} // namespace lrg
