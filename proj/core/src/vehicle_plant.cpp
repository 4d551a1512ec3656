#include "lrg/vehicle_plant.hpp"

#include "lrg/errors.hpp"

#include <cmath>
#include <numbers>

namespace lrg {

TruckPlant::TruckPlant(VehicleParams params) : params_(std::move(params)) {
    params_.validate();
    pendulum_ = pendulum_params(params_.fill_ratio, params_.tank_a, params_.tank_b, params_.m_l,
                                params_.pend_poly);
}

void TruckPlant::derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                             Eigen::VectorXd& dxdt) const {
    const double sw_rad = nu[0] * std::numbers::pi / 180.0;
    const VehicleState dot =
        vehicle_derivatives(VehicleState::from_vector(x), sw_rad, params_, pendulum_);
    dxdt = dot.to_vector();
}

void TruckPlant::output(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                        Eigen::VectorXd& y) const {
    (void)nu;
    y.resize(1);
    y[0] = ltr(VehicleState::from_vector(x), params_);
}

Box TruckPlant::command_set() const {
    return Box{Eigen::VectorXd::Constant(1, params_.command_min),
               Eigen::VectorXd::Constant(1, params_.command_max)};
}

Box TruckPlant::constraint_set() const {
    return Box{Eigen::VectorXd::Constant(1, -params_.ltr_limit),
               Eigen::VectorXd::Constant(1, params_.ltr_limit)};
}

Eigen::VectorXd TruckPlant::initial_state() const {
    VehicleState rest;
    rest.theta = -std::numbers::pi / 2.0; // liquid at rest
    return rest.to_vector();
}

void TruckPlant::set_speed(double speed) {
    if (!(speed > 0.0)) throw ConfigError("vehicle speed must be > 0");
    params_.speed = speed;
}

} // namespace lrg
