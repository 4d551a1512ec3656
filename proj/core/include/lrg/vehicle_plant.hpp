#pragma once

#include "lrg/plant.hpp"
#include "lrg/vehicle.hpp"

namespace lrg {

/// Tank-truck plant behind the governor contract. The scalar command is the
/// steering-wheel angle in degrees, the scalar output is the load transfer
/// ratio, and the constraint set is |LTR| <= ltr_limit. Forward speed is a
/// parameter; scenario runners may reschedule it between integrator steps.
class TruckPlant : public Plant {
public:
    explicit TruckPlant(VehicleParams params);

    int state_dim() const override { return 6; }
    int command_dim() const override { return 1; }
    int output_dim() const override { return 1; }

    void derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                     Eigen::VectorXd& dxdt) const override;
    void output(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                Eigen::VectorXd& y) const override;

    Box command_set() const override;
    Box constraint_set() const override;
    Eigen::VectorXd initial_state() const override;

    const VehicleParams& params() const { return params_; }
    const PendulumParams& pendulum() const { return pendulum_; }

    /// Exogenous speed schedule hook; rebuilding the pendulum split is not
    /// needed since it depends only on tank geometry and fill.
    void set_speed(double speed);

private:
    VehicleParams params_;
    PendulumParams pendulum_;
};

} // namespace lrg
