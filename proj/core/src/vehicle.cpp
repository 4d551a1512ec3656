#include "lrg/vehicle.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace lrg {

namespace {
constexpr double kGravity = 9.81;
}

Eigen::VectorXd VehicleState::to_vector() const {
    Eigen::VectorXd v(6);
    v << phi, phi_dot, beta_slip, r_yaw, theta, theta_dot;
    return v;
}

VehicleState VehicleState::from_vector(const Eigen::VectorXd& v) {
    if (v.size() != 6) throw std::invalid_argument("vehicle state has 6 components");
    return VehicleState{v[0], v[1], v[2], v[3], v[4], v[5]};
}

void VehicleParams::validate() const {
    if (!(speed > 0.0)) throw ConfigError("vehicle speed must be > 0");
    if (!(m_t > 0.0) || !(m_u > 0.0) || m_l < 0.0)
        throw ConfigError("vehicle masses must be positive (liquid mass may be 0)");
    if (!(tank_a > 0.0) || !(tank_b > 0.0)) throw ConfigError("tank half-axes must be > 0");
    if (!(fill_ratio > 0.0) || !(fill_ratio < 1.0))
        throw ConfigError("fill ratio must lie in (0, 1)");
    if (!(W > 0.0) || !(k_phi > 0.0) || !(c_phi > 0.0))
        throw ConfigError("track width, roll stiffness and damping must be > 0");
    if (!(l_f > 0.0) || !(l_r > 0.0)) throw ConfigError("axle distances must be > 0");
    if (!(ltr_limit > 0.0) || ltr_limit > 1.0) throw ConfigError("ltr_limit must lie in (0, 1]");
    if (!(tire.D > 0.0)) throw ConfigError("tire peak force must be > 0");
    if (!(steer_ratio > 0.0)) throw ConfigError("steer ratio must be > 0");
    if (!(command_max > command_min)) throw ConfigError("empty command range");
}

PendulumParams pendulum_params(double fill_ratio, double tank_a, double tank_b, double m_l,
                               const PendulumPolynomials& coefficients) {
    if (!(fill_ratio > 0.0) || !(fill_ratio < 1.0))
        throw ConfigError("fill ratio must lie in (0, 1)");
    if (m_l < 0.0) throw ConfigError("liquid mass must be >= 0");
    const double lam = tank_b / tank_a;
    const double del = fill_ratio;
    const std::array<double, 9> basis{
        1.0, del, lam, del * del, del * lam, lam * lam, del * del * del, del * del * lam,
        del * lam * lam};

    double m_ratio = 0.0, b_ratio = 0.0;
    for (int i = 0; i < 9; ++i) {
        m_ratio += coefficients.m_coef[i] * basis[i];
        b_ratio += coefficients.b_coef[i] * basis[i];
    }

    PendulumParams p;
    p.m_p = m_ratio * m_l;
    p.m_f = m_l - p.m_p;
    p.b_p = b_ratio * tank_b;
    p.a_p = lam * p.b_p;
    if (p.m_p < 0.0 || p.m_p > m_l)
        throw ConfigError("pendulum fit yields moving mass outside [0, m_l]");
    if (!(p.b_p > 0.0)) throw ConfigError("pendulum fit yields nonpositive semi-axis");
    return p;
}

std::pair<double, double> pendulum_free_derivatives(double theta, double theta_dot,
                                                    const PendulumParams& pendulum) {
    const double ap = pendulum.a_p, bp = pendulum.b_p;
    if (ap == 0.0 && bp == 0.0) throw std::invalid_argument("degenerate pendulum (a_p = b_p = 0)");
    const double st = std::sin(theta), ct = std::cos(theta);
    const double inertia = ap * ap * st * st + bp * bp * ct * ct;
    if (inertia < 1e-300) throw NumericalFault("pendulum inertia term vanished");
    const double s2t = std::sin(2.0 * theta);
    const double accel =
        -(0.5 * theta_dot * theta_dot * (ap * ap - bp * bp) * s2t + kGravity * bp * ct) / inertia;
    return {theta_dot, accel};
}

std::pair<double, double> tire_sideslip(double delta_f, double beta_slip, double r_yaw,
                                        const VehicleParams& params) {
    const double V = params.speed;
    const double alpha_f = delta_f - std::atan((V * beta_slip + r_yaw * params.l_f) / V);
    const double alpha_r = -std::atan((V * beta_slip - r_yaw * params.l_r) / V);
    return {alpha_f, alpha_r};
}

double tire_force(double alpha, const TireParams& tire) {
    const double ba = tire.B * alpha;
    return tire.D * std::sin(tire.C * std::atan(ba - tire.E * (ba - std::atan(ba))));
}

double ltr(const VehicleState& state, const VehicleParams& params) {
    const double m = params.m_t + params.m_u + params.m_l;
    return -2.0 / (m * kGravity * params.W) *
           (params.k_phi * state.phi + params.c_phi * state.phi_dot);
}

double slosh_force(const std::vector<PendulumSample>& trajectory, const PendulumParams& pendulum) {
    if (trajectory.empty()) throw std::invalid_argument("slosh force needs a nonempty trajectory");
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& s : trajectory) {
        const double f = pendulum.m_p * pendulum.a_p *
                         (-s.theta_dot * std::sin(s.theta) + s.theta_ddot * std::cos(s.theta));
        peak = std::max(peak, f);
    }
    return peak;
}

namespace vehicle_detail {

Workspace make_workspace(const VehicleState& s, double steering_wheel_angle,
                         const VehicleParams& p, const PendulumParams& q) {
    Workspace w;
    w.delta_f = p.steer_ratio * steering_wheel_angle;
    auto [alpha_f, alpha_r] = tire_sideslip(w.delta_f, s.beta_slip, s.r_yaw, p);
    w.F_yf = tire_force(alpha_f, p.tire);
    w.F_yr = tire_force(alpha_r, p.tire);

    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double sp = std::sin(s.phi), cp = std::cos(s.phi);
    const double ap = q.a_p, bp = q.b_p, b = p.tank_b;

    w.D1 = b * cp + ap * ct * sp + bp * st * cp;
    w.D2 = ap * st * cp + bp * ct * sp;
    w.D3 = ap * st * sp - bp * ct * cp;
    w.D4 = b * sp - ap * ct * cp + bp * st * sp;
    w.D5 = -ap * ct * cp + bp * st * sp;

    const double zp = p.h_s + b + bp * st; // pendulum mass height above roll center
    const double yp = -ap * ct;            // lateral offset
    w.E1 = zp * zp + (ap * ct) * (ap * ct);
    w.E2 = ap * ((p.h_s + b) * st + bp);
    w.E5 = 2.0 * ap * ct * ((p.h_s + b) * st + bp) * (bp * zp - ap * ap * st) -
           w.E1 * ap * (p.h_s + b) * ct;
    w.psi_dot = w.E2 * s.theta_dot / w.E1;

    w.K_af = 2.0 * w.D3 * s.phi_dot * s.theta_dot + w.D4 * s.phi_dot * s.phi_dot +
             w.D5 * s.theta_dot * s.theta_dot;

    w.I_x = p.I_xxs + p.I_xxf + p.m_t * p.h_s * p.h_s;
    w.I_z = p.I_zzs + p.I_zzu + p.I_zzf + p.m_t * p.c * p.c + p.m_u * p.e_1 * p.e_1;
    w.I_xz = p.I_xzs + p.I_xzf + p.m_t * p.h_s * p.c;

    // Moving liquid mass treated as a point mass at its instantaneous
    // position (0, yp, zp) in the roll-center frame.
    w.I_xxp = q.m_p * (yp * yp + zp * zp);
    w.I_zzp = q.m_p * yp * yp;
    w.I_xyp = 0.0;
    w.I_xzp = 0.0;
    w.I_yzp = q.m_p * yp * zp;
    return w;
}

EqRow pendulum_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q) {
    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double sp = std::sin(s.phi), cp = std::cos(s.phi);
    const double s2t = std::sin(2.0 * s.theta);
    const double ap = q.a_p, bp = q.b_p, b = p.tank_b;

    EqRow row;
    row.a[0] = ap * ap * st * st + bp * bp * ct * ct;
    row.a[1] = ap * bp + ap * b * st;
    row.a[2] = -p.speed * (ap * st * cp + bp * ct * sp);
    row.a[3] = 0.0;
    row.rhs = -(s.phi_dot * s.phi_dot * (0.5 * (ap * ap - bp * bp) * s2t - bp * b * ct) +
                0.5 * s.theta_dot * s.theta_dot * (ap * ap - bp * bp) * s2t +
                kGravity * (bp * ct * cp - ap * st * sp));
    return row;
}

EqRow pendulum_roll_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q) {
    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double sp = std::sin(s.phi), cp = std::cos(s.phi);
    const double s2t = std::sin(2.0 * s.theta);
    const double ap = q.a_p, bp = q.b_p, b = p.tank_b;

    EqRow row;
    row.a[0] = ap * bp + ap * b * st;
    row.a[1] = (b + bp * st) * (b + bp * st) + ap * ap * ct * ct;
    row.a[2] = -p.speed * (b * cp + ap * ct * sp + bp * st * cp);
    row.a[3] = 0.0;
    row.rhs = -(2.0 * s.theta_dot * s.phi_dot * (0.5 * (bp * bp - ap * ap) * s2t + bp * b * ct) +
                s.theta_dot * s.theta_dot * ap * b * ct -
                kGravity * ((b + bp * st) * sp - ap * ct * cp));
    return row;
}

EqRow lateral_force_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                        const Workspace& w) {
    EqRow row;
    row.a[0] = -q.m_p * w.D2;
    row.a[1] = -(p.m_t + q.m_f) * p.h_s - q.m_p * w.D1;
    row.a[2] = (p.m_t + q.m_f + p.m_u + q.m_p) * p.speed;
    row.a[3] = (p.m_t + q.m_f) * p.c - p.m_u * p.e_1;
    row.rhs = w.F_yf + w.F_yr - (p.m_t + q.m_f + p.m_u) * p.speed * s.r_yaw - q.m_p * w.K_af;
    return row;
}

EqRow yaw_moment_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                     const Workspace& w) {
    const double omega = s.phi_dot + w.psi_dot;
    EqRow row;
    row.a[0] = q.m_p * p.e_2 * w.D2 - w.I_xzp * (w.E2 / w.E1);
    row.a[1] = -w.I_xz + q.m_f * p.e_2 * p.h_s + q.m_p * p.e_2 * w.D1 - w.I_xzp;
    row.a[2] = -(q.m_f + q.m_p) * p.e_2 * p.speed;
    row.a[3] = w.I_z - q.m_f * p.e_2 * p.c + w.I_zzp;
    row.rhs = w.F_yf * p.l_f - w.F_yr * p.l_r + q.m_f * p.e_2 * p.speed * s.r_yaw +
              q.m_p * p.e_2 * w.K_af -
              w.I_xzp * (w.E5 / (w.E1 * w.E1)) * s.theta_dot * s.theta_dot +
              w.I_xyp * omega * omega + w.I_yzp * s.r_yaw * omega;
    return row;
}

EqRow roll_moment_row(const VehicleState& s, const VehicleParams& p, const PendulumParams& q,
                      const Workspace& w) {
    const double ct = std::cos(s.theta);
    const double hb = p.h_s + p.tank_b;
    const double omega = s.phi_dot + w.psi_dot;
    const double lever = p.m_t * p.h_s + q.m_f * p.h_f + hb * q.m_p;

    EqRow row;
    row.a[0] = -hb * q.m_p * w.D2 + w.I_xxp * (w.E2 / w.E1);
    row.a[1] = w.I_x - q.m_f * p.h_f * p.h_s - hb * q.m_p * w.D1 + w.I_xxp;
    row.a[2] = lever * p.speed;
    row.a[3] = -w.I_xz - w.I_xzp;
    row.rhs = -p.k_phi * s.phi - p.c_phi * s.phi_dot + s.phi * kGravity * lever -
              q.m_p * kGravity * q.a_p * ct - lever * p.speed * s.r_yaw - hb * q.m_p * w.K_af +
              w.I_xxp * (w.E5 / (w.E1 * w.E1)) * s.theta_dot * s.theta_dot -
              w.I_xyp * s.r_yaw * omega - w.I_yzp * s.r_yaw * s.r_yaw;
    return row;
}

} // namespace vehicle_detail

VehicleState vehicle_derivatives(const VehicleState& state, double steering_wheel_angle,
                                 const VehicleParams& params, const PendulumParams& pendulum) {
    using namespace vehicle_detail;
    const Workspace w = make_workspace(state, steering_wheel_angle, params, pendulum);

    Eigen::Matrix4d M;
    Eigen::Vector4d h;
    const EqRow rows[4] = {pendulum_row(state, params, pendulum),
                           lateral_force_row(state, params, pendulum, w),
                           yaw_moment_row(state, params, pendulum, w),
                           roll_moment_row(state, params, pendulum, w)};
    for (int i = 0; i < 4; ++i) {
        M.row(i) = rows[i].a;
        h[i] = rows[i].rhs;
    }

    Eigen::PartialPivLU<Eigen::Matrix4d> lu(M);
    if (!(lu.rcond() > 1e-12)) {
        std::string msg = "singular vehicle model matrix at state:";
        const Eigen::VectorXd sv = state.to_vector();
        for (int i = 0; i < sv.size(); ++i) msg += " " + format_double(sv[i]);
        throw NumericalFault(msg);
    }
    const Eigen::Vector4d u = lu.solve(h); // [theta_dd, phi_dd, beta_dot, r_dot]

    VehicleState dot;
    dot.phi = state.phi_dot;
    dot.phi_dot = u[1];
    dot.beta_slip = u[2];
    dot.r_yaw = u[3];
    dot.theta = state.theta_dot;
    dot.theta_dot = u[0];
    return dot;
}

double pendulum_roll_residual(const VehicleState& state, const VehicleState& derivatives,
                              const VehicleParams& params, const PendulumParams& pendulum) {
    using namespace vehicle_detail;
    const EqRow row = pendulum_roll_row(state, params, pendulum);
    Eigen::Vector4d u;
    u << derivatives.theta_dot, derivatives.phi_dot, derivatives.beta_slip, derivatives.r_yaw;
    return row.a.dot(u) - row.rhs;
}

VehicleParams vehicle_params_from_config(const KeyValues& kv) {
    VehicleParams p;
    p.speed = kv.get_double("vehicle.speed", p.speed);
    p.m_t = kv.get_double("vehicle.m_t", p.m_t);
    p.m_u = kv.get_double("vehicle.m_u", p.m_u);
    p.m_l = kv.get_double("vehicle.m_l", p.m_l);
    p.tank_a = kv.get_double("vehicle.tank_half_width", p.tank_a);
    p.tank_b = kv.get_double("vehicle.tank_half_height", p.tank_b);
    p.fill_ratio = kv.get_double("vehicle.fill_ratio", p.fill_ratio);
    p.h_s = kv.get_double("vehicle.h_s", p.h_s);
    p.h_f = kv.get_double("vehicle.h_f", p.h_f);
    p.c = kv.get_double("vehicle.c", p.c);
    p.e_1 = kv.get_double("vehicle.e_1", p.e_1);
    p.e_2 = kv.get_double("vehicle.e_2", p.e_2);
    p.l_f = kv.get_double("vehicle.l_f", p.l_f);
    p.l_r = kv.get_double("vehicle.l_r", p.l_r);
    p.W = kv.get_double("vehicle.W", p.W);
    p.k_phi = kv.get_double("vehicle.k_phi", p.k_phi);
    p.c_phi = kv.get_double("vehicle.c_phi", p.c_phi);
    p.I_xxs = kv.get_double("vehicle.I_xxs", p.I_xxs);
    p.I_zzs = kv.get_double("vehicle.I_zzs", p.I_zzs);
    p.I_xzs = kv.get_double("vehicle.I_xzs", p.I_xzs);
    p.I_zzu = kv.get_double("vehicle.I_zzu", p.I_zzu);
    p.I_xxf = kv.get_double("vehicle.I_xxf", p.I_xxf);
    p.I_zzf = kv.get_double("vehicle.I_zzf", p.I_zzf);
    p.I_xzf = kv.get_double("vehicle.I_xzf", p.I_xzf);
    p.tire.B = kv.get_double("vehicle.tire_B", p.tire.B);
    p.tire.C = kv.get_double("vehicle.tire_C", p.tire.C);
    p.tire.D = kv.get_double("vehicle.tire_D", p.tire.D);
    p.tire.E = kv.get_double("vehicle.tire_E", p.tire.E);
    p.steer_ratio = kv.get_double("vehicle.steer_ratio", p.steer_ratio);
    p.ltr_limit = kv.get_double("vehicle.ltr_limit", p.ltr_limit);
    p.command_min = kv.get_double("vehicle.command_min", p.command_min);
    p.command_max = kv.get_double("vehicle.command_max", p.command_max);
    for (int i = 0; i < 9; ++i) {
        p.pend_poly.m_coef[i] =
            kv.get_double("vehicle.pend_m" + std::to_string(i + 1), p.pend_poly.m_coef[i]);
        p.pend_poly.b_coef[i] =
            kv.get_double("vehicle.pend_b" + std::to_string(i + 1), p.pend_poly.b_coef[i]);
    }
    kv.require_all_used("vehicle.");
    p.validate();
    return p;
}

} // namespace lrg
