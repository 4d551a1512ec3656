#pragma once

#include "lrg/config.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace lrg {

/// The six dynamic states of the tank truck. theta is kept on a continuous
/// branch (never wrapped); the liquid rest configuration is theta = -pi/2.
struct VehicleState {
    double phi = 0.0;       // roll angle (rad)
    double phi_dot = 0.0;   // roll rate (rad/s)
    double beta_slip = 0.0; // vehicle slip angle (rad)
    double r_yaw = 0.0;     // yaw rate (rad/s)
    double theta = 0.0;     // pendulum angle (rad)
    double theta_dot = 0.0; // pendulum angular velocity (rad/s)

    Eigen::VectorXd to_vector() const;
    static VehicleState from_vector(const Eigen::VectorXd& v);
};

struct TireParams {
    double B = 10.0;
    double C = 1.9;
    double D = 6000.0; // peak lateral force per axle (N)
    double E = 0.97;
};

/// Bivariate cubic fits (in fill ratio and tank aspect ratio) for the
/// equivalent-pendulum mass fraction and semi-axis fraction.
struct PendulumPolynomials {
    std::array<double, 9> m_coef{}; // m_p / m_l
    std::array<double, 9> b_coef{}; // b_p / b
};

struct VehicleParams {
    double speed = 25.0; // forward speed V (m/s), exogenous parameter

    double m_t = 1700.0; // sprung mass (kg)
    double m_u = 300.0;  // unsprung mass (kg)
    double m_l = 2000.0; // liquid mass (kg)

    double tank_a = 1.0;     // tank half-width (m)
    double tank_b = 1.0;     // tank half-height (m)
    double fill_ratio = 0.5; // liquid fill ratio, in (0, 1)

    double h_s = 0.858; // sprung CG height above roll center (m)
    double h_f = 0.5;   // fixed liquid mass CG height above roll center (m)
    double c = 0.2;     // sprung CG to vehicle CG, longitudinal (m)
    double e_1 = 0.5;   // unsprung CG to vehicle CG, longitudinal (m)
    double e_2 = 0.3;   // tank CG to vehicle CG, longitudinal (m)
    double l_f = 1.160; // CG to front axle (m)
    double l_r = 1.750; // CG to rear axle (m)
    double W = 2.0;     // track width (m)

    double k_phi = 95707.0; // suspension roll stiffness (N*m/rad)
    double c_phi = 7471.0;  // suspension roll damping (N*m*s/rad)

    double I_xxs = 1280.0; // sprung mass inertias (kg*m^2)
    double I_zzs = 2800.0;
    double I_xzs = 0.0;
    double I_zzu = 600.0;  // unsprung yaw inertia
    double I_xxf = 450.0;  // fixed liquid mass inertias
    double I_zzf = 2400.0;
    double I_xzf = 0.0;

    TireParams tire;
    // Nominal fits for a circular tank: moving-mass fraction falling and
    // natural frequency rising with the fill ratio.
    PendulumPolynomials pend_poly{{0.55, -0.4, 0, 0, 0, 0, 0, 0, 0},
                                  {0.8, -0.5, 0, 0, 0, 0, 0, 0, 0}};

    double steer_ratio = 0.05; // front wheel angle per steering wheel angle
    double ltr_limit = 1.0;

    double command_min = -90.0; // admissible steering-wheel command (deg)
    double command_max = 90.0;

    void validate() const;
};

/// Equivalent trammel pendulum: the liquid mass splits into a tank-fixed
/// part m_f and a moving part m_p on an elliptical path with semi-axes a_p
/// (lateral) and b_p (vertical), a_p = (b/a) * b_p.
struct PendulumParams {
    double m_f = 0.0;
    double m_p = 0.0;
    double a_p = 0.0;
    double b_p = 0.0;
};

/// Evaluates the pendulum-parameter fits at the given fill ratio. Rejects
/// fits that step outside physical range (m_p outside [0, m_l] or
/// b_p <= 0) as a coefficient configuration error.
PendulumParams pendulum_params(double fill_ratio, double tank_a, double tank_b, double m_l,
                               const PendulumPolynomials& coefficients);

/// Free pendulum motion in the tank-fixed frame:
/// thdd (a_p^2 sin^2 th + b_p^2 cos^2 th)
///   + thd^2 (a_p^2 - b_p^2) sin(2 th)/2 + g b_p cos th = 0.
/// Returns (theta_dot, theta_ddot).
std::pair<double, double> pendulum_free_derivatives(double theta, double theta_dot,
                                                    const PendulumParams& pendulum);

/// Front and rear tire sideslip angles for front-wheel steering
/// (rear steering angle fixed at zero).
std::pair<double, double> tire_sideslip(double delta_f, double beta_slip, double r_yaw,
                                        const VehicleParams& params);

/// Magic-formula lateral force D sin(C atan(B a - E (B a - atan(B a)))).
double tire_force(double alpha, const TireParams& tire);

/// Roll/yaw/slip/slosh dynamics assembled as a 4x4 linear system in
/// (theta_dd, phi_dd, beta_dot, r_dot) from the pendulum equation of motion
/// in the moving tank frame, the lateral force balance, and the yaw and
/// roll moment balances, then solved by LU with partial pivoting. Raises
/// NumericalFault when the system matrix is near singular.
/// steering_wheel_angle is in radians; the front wheel angle is
/// steer_ratio * steering_wheel_angle.
VehicleState vehicle_derivatives(const VehicleState& state, double steering_wheel_angle,
                                 const VehicleParams& params, const PendulumParams& pendulum);

/// Load transfer ratio estimated from roll state:
/// -(2 / (m g W)) (k_phi phi + c_phi phi_dot), m = m_t + m_u + m_l.
double ltr(const VehicleState& state, const VehicleParams& params);

struct PendulumSample {
    double theta = 0.0;
    double theta_dot = 0.0;
    double theta_ddot = 0.0;
};

/// Peak lateral force the pendulum exerts on the tank over a trajectory:
/// max of m_p a_p (-thd sin th + thdd cos th).
double slosh_force(const std::vector<PendulumSample>& trajectory, const PendulumParams& pendulum);

/// Residual of the second (unused) pendulum/roll coupling equation at a
/// solved derivative vector; diagnostic for the equation-selection choice.
double pendulum_roll_residual(const VehicleState& state, const VehicleState& derivatives,
                              const VehicleParams& params, const PendulumParams& pendulum);

/// Parses the `vehicle.*` section of a key/value config (SI units, angles
/// in the documented units per key). Unknown vehicle.* keys are rejected.
VehicleParams vehicle_params_from_config(const KeyValues& kv);

namespace vehicle_detail {

/// One scalar equation row a . [thdd, phidd, betad, rd] = rhs.
struct EqRow {
    Eigen::RowVector4d a = Eigen::RowVector4d::Zero();
    double rhs = 0.0;
};

struct Workspace {
    double delta_f = 0.0;
    double F_yf = 0.0;
    double F_yr = 0.0;
    double D1 = 0.0, D2 = 0.0, D3 = 0.0, D4 = 0.0, D5 = 0.0;
    double E1 = 0.0, E2 = 0.0, E5 = 0.0;
    double psi_dot = 0.0;
    double K_af = 0.0; // derivative-free part of the pendulum-mass lateral acceleration
    double I_x = 0.0, I_z = 0.0, I_xz = 0.0;
    double I_xxp = 0.0, I_zzp = 0.0, I_xyp = 0.0, I_xzp = 0.0, I_yzp = 0.0;
};

Workspace make_workspace(const VehicleState& s, double steering_wheel_angle,
                         const VehicleParams& p, const PendulumParams& q);

EqRow pendulum_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q);
EqRow pendulum_roll_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q);
EqRow lateral_force_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                        const Workspace& w);
EqRow yaw_moment_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                     const Workspace& w);
EqRow roll_moment_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                      const Workspace& w);

} // namespace vehicle_detail

} // namespace lrg
