#pragma once

#include "lrg/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace lrg {

/// Norm on the product space (nu, delta_nu, delta_x): weighted max of the
/// per-block Euclidean norms. The restrictions to the individual blocks and
/// to (nu, delta_x) are the same expression with the missing blocks zeroed,
/// so the triangle inequality
///
///   full(a, b, c) <= command_state_block(a, c) + step_block(b)
///
/// holds exactly, which the per-data-point step certificate relies on.
struct ProductNorm {
    double w_nu = 1.0;
    double w_delta_nu = 1.0;
    double w_delta_x = 1.0;

    void validate() const {
        if (!(w_nu > 0.0) || !(w_delta_nu > 0.0) || !(w_delta_x > 0.0) ||
            !std::isfinite(w_nu) || !std::isfinite(w_delta_nu) || !std::isfinite(w_delta_x))
            throw ConfigError("norm weights must be positive and finite");
    }

    double full(const Eigen::VectorXd& nu, const Eigen::VectorXd& delta_nu,
                const Eigen::VectorXd& delta_x) const {
        return std::max({w_nu * nu.norm(), w_delta_nu * delta_nu.norm(), w_delta_x * delta_x.norm()});
    }

    /// Restriction to {0} x R^n_nu x {0}.
    double step_block(const Eigen::VectorXd& delta_nu) const { return w_delta_nu * delta_nu.norm(); }

    /// Restriction to {0} x {0} x R^n.
    double state_block(const Eigen::VectorXd& delta_x) const { return w_delta_x * delta_x.norm(); }

    /// Restriction to R^n_nu x {0} x R^n.
    double command_state_block(const Eigen::VectorXd& nu, const Eigen::VectorXd& delta_x) const {
        return std::max(w_nu * nu.norm(), w_delta_x * delta_x.norm());
    }

    /// Restriction to {0} x R^n_nu x R^n (the dataset-free envelope term).
    double step_state_block(const Eigen::VectorXd& delta_nu, const Eigen::VectorXd& delta_x) const {
        return std::max(w_delta_nu * delta_nu.norm(), w_delta_x * delta_x.norm());
    }
};

} // namespace lrg
