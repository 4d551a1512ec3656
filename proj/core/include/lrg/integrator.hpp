#pragma once

#include "lrg/plant.hpp"

#include <Eigen/Core>

#include <functional>

namespace lrg {

/// One classic 4th-order Runge-Kutta step with the command held constant
/// over the step. Throws NumericalFault with a state snapshot in the message
/// if the result is not finite.
Eigen::VectorXd rk4_step(const Plant& plant, const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                         double dt);

/// Integrates over [0, duration] on a fixed dt grid (the last step is
/// shortened to land exactly on duration). `on_step(t, x)` is invoked after
/// every step; it may be empty.
Eigen::VectorXd simulate(const Plant& plant, Eigen::VectorXd x, const Eigen::VectorXd& nu,
                         double duration, double dt,
                         const std::function<void(double, const Eigen::VectorXd&)>& on_step = {});

} // namespace lrg
