#pragma once

#include "lrg/dataset.hpp"
#include "lrg/norms.hpp"
#include "lrg/steady_state_map.hpp"

#include <Eigen/Core>

#include <vector>

namespace lrg {

/// Parameters of the reference governor.
///
/// holder_L and holder_beta are the assumed continuity constants of the
/// deviation functional D: |D(z1) - D(z2)| <= L ||z1 - z2||^(1/beta) in the
/// configured product norm. lambda (minimum accepted progress, in weighted
/// command units) and delta_v1 (steady-state admissibility floor, in output
/// units) gate the enhanced update law.
struct GovernorConfig {
    double holder_L = 1.0;
    double holder_beta = 1.0;
    double horizon_T = 1.0;     // finite measurement horizon of the deviation bound
    double epsilon = 1e-2;      // additive measurement margin
    double sample_period = 0.1; // governor update period (operating phase)
    double lambda = 1e-2;
    double delta_v1 = 1e-2;
    ProductNorm norm;

    void validate() const;
};

enum class Phase { learning, operating };

/// Mutable governor runtime state.
struct GovernorState {
    Eigen::VectorXd current_nu;
    Dataset dataset;
    Phase phase = Phase::learning;
};

/// Data-interpolated upper envelope of the deviation functional at the query
/// (nu, delta_nu, delta_x): the minimum over all data points of
/// d_tilde_i + L * dist^(1/beta), further reduced by the dataset-free term
/// L * ||(delta_nu, delta_x)||^(1/beta). Never increases when points are
/// appended. An empty dataset degrades to the dataset-free term.
double dbar_estimate(const Dataset& dataset, const Eigen::VectorXd& nu,
                     const Eigen::VectorXd& delta_nu, const Eigen::VectorXd& delta_x,
                     const GovernorConfig& config);

/// Largest kappa in [0,1] whose step kappa*(r - nu) is certified by one data
/// point: || kappa (r-nu) - delta_nu_i || <= ((d - d_tilde_i)/L)^beta
/// - ||(nu, x_dev) - (nu_i, delta_x_i)||. Returns 0 when infeasible.
/// Closed-form path: the scalar-command resolvent when n_nu == 1, the
/// quadratic-norm resolvent otherwise.
double kappa_for_datapoint(const DataPoint& point, const Eigen::VectorXd& nu,
                           const Eigen::VectorXd& r, const Eigen::VectorXd& x_dev, double d,
                           const GovernorConfig& config);

/// Same problem solved numerically: golden-section localization of the
/// constraint minimum plus bisection of the upper feasibility boundary.
/// Absolute tolerance 1e-10 on kappa, at most 200 bisection iterations.
double kappa_for_datapoint_bisect(const DataPoint& point, const Eigen::VectorXd& nu,
                                  const Eigen::VectorXd& r, const Eigen::VectorXd& x_dev, double d,
                                  const GovernorConfig& config);

/// Dataset-free certificate: sat_[0,1] of
/// ((d/L)^beta - ||x_dev||) / ||r - nu||.
double kappa_fallback(const Eigen::VectorXd& nu, const Eigen::VectorXd& r,
                      const Eigen::VectorXd& x_dev, double d, const GovernorConfig& config);

struct KappaResult {
    double kappa = 0.0;
    bool fallback_wins = false;          // the dataset-free certificate attains the max
    std::vector<std::size_t> winners;    // every data point attaining the max (ties kept)
    bool trivial = false;                // r == nu, kappa = 1 by convention
};

/// kappa = max(max_i kappa_i, kappa') over the dataset scan and the
/// fallback. Deterministic, and monotone in the dataset: appending points
/// never decreases the result. r == nu returns 1 (the update is a no-op and
/// the fallback expression would divide by zero).
KappaResult compute_kappa(const Dataset& dataset, const Eigen::VectorXd& x_dev,
                          const Eigen::VectorXd& r, const Eigen::VectorXd& nu, double d,
                          const GovernorConfig& config);

/// nu_plus = nu_minus + kappa (r - nu_minus). kappa == 1 returns r exactly
/// and kappa == 0 returns nu_minus exactly, so converged references compare
/// bitwise equal.
Eigen::VectorXd apply_update(const Eigen::VectorXd& nu_minus, const Eigen::VectorXd& r,
                             double kappa);

struct EnhancedUpdate {
    Eigen::VectorXd nu_plus;
    bool accepted = false;
};

/// Gated update law for the operating phase: the candidate from
/// apply_update is accepted only if it keeps an admissibility floor,
/// d(candidate) >= min(d(r), delta_v1), and makes minimum progress,
/// ||candidate - r|| <= max(||nu_minus - r|| - lambda, 0); otherwise the
/// reference holds. Validates lambda < (min(d(r), delta_v1)/L)^beta, the
/// feasibility condition for eventual progress.
EnhancedUpdate apply_update_enhanced(const Eigen::VectorXd& nu_minus, const Eigen::VectorXd& r,
                                     double kappa, const SteadyStateMap& map,
                                     const GovernorConfig& config);

} // namespace lrg
