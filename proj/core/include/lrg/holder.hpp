#pragma once

#include "lrg/governor.hpp"
#include "lrg/plant.hpp"
#include "lrg/steady_state_map.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace lrg {

struct HolderEstimate {
    double L = 0.0;    // safety_factor * max_observed_ratio
    double beta = 1.0; // fixed by the caller
    int sample_count = 0;
    double max_observed_ratio = 0.0;
    double safety_factor = 1.0;
    std::uint64_t rng_seed = 0;

    void save_csv(const std::string& path) const;
};

/// Sampling-based continuity-constant estimate for a black-box plant:
/// draws points in (nu, delta_nu, delta_x) space, measures the deviation
/// bound at central-difference perturbations of every coordinate
/// (relative step 1e-3), and returns the largest ratio
/// |delta D| / ||delta z||^(1/beta) scaled by the safety factor.
/// Evidence, not proof: the result never undercuts its own samples but can
/// undercut the plant.
HolderEstimate estimate_holder_sampling(const Plant& plant, const SteadyStateMap& map,
                                        int sample_count, double beta_fixed,
                                        std::uint64_t rng_seed, double safety_factor,
                                        const GovernorConfig& config, double dt);

struct LtiBound {
    double L_prime = 0.0; // valid for the sum-of-blocks product norm
    double eta = 0.0;     // sup_t ||e^{At}||_2
    double horizon = 0.0; // sampled horizon used for eta
};

/// Closed-form continuity constant for xdot = Ax + B nu, y = Cx + F nu with
/// Hurwitz A:  L' = max(eta ||C||, (eta + 1) ||C A^-1|| ||B|| + ||F||),
/// eta = sup_t ||e^{At}||. The sup is evaluated on a sampled horizon of ten
/// slowest time constants with a submultiplicative tail bound: the horizon
/// doubles until ||e^{A t_end}|| < 1/2, after which the tail cannot exceed
/// the head. Spectral norms throughout.
LtiBound lti_lipschitz_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C, const Eigen::MatrixXd& F);

struct HolderProbeRecord {
    double ratio = 0.0;    // |D(z1) - D(z2)| / ||z1 - z2||^(1/beta)
    double distance = 0.0; // ||z1 - z2||
    bool violation = false;
};

struct HolderProbeReport {
    int probe_count = 0;
    long violations = 0;
    double max_ratio = 0.0;
    double L = 0.0;
    double beta = 1.0;
    std::uint64_t rng_seed = 0;
    std::vector<HolderProbeRecord> records;

    void save_csv(const std::string& path) const;
};

/// Draws probe pairs and checks |D(z1) - D(z2)| <= L ||z1 - z2||^(1/beta)
/// with D evaluated from the explicit LTI solution (dense time sampling of
/// e^{At} plus the exact asymptote). The norm is the sum of the block
/// Euclidean norms, matching lti_lipschitz_bound.
HolderProbeReport verify_holder_on_lti(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C, const Eigen::MatrixXd& F,
                                       double L, double beta, int probe_count,
                                       std::uint64_t rng_seed);

/// Deviation functional of the LTI system at (delta_nu, delta_x) (it does
/// not depend on the absolute command), by dense sampling of the explicit
/// solution. Exposed for the soundness tests.
double lti_deviation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& F, const Eigen::VectorXd& delta_nu,
                     const Eigen::VectorXd& delta_x);

} // namespace lrg
