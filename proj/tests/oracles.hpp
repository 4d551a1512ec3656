#pragma once

// Test-only reference computations, independent of the library code paths
// they check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace oracles {

/// Deviation functional of the scalar system xdot = a x + b nu, y = c x +
/// f nu, from the explicit solution: the deviation decays exponentially
/// from c*dx + f*dnu toward (f - c b / a) dnu, so the sup is attained at an
/// endpoint.
inline double scalar_lti_deviation(double a, double b, double c, double f, double dnu, double dx) {
    const double initial = c * dx + f * dnu;
    const double asymptote = (f - c * b / a) * dnu;
    return std::max(std::abs(initial), std::abs(asymptote));
}

/// Three-state roll-plane model (phi, phi_dot, beta, r) for a rigid-load
/// truck: lateral force balance, yaw moment balance, roll moment balance,
/// written directly in textbook form and solved as a 3x3 system for
/// (phi_dd, beta_dot, r_dot).
struct RollPlaneParams {
    double V, m_t, m_u, h_s, c, e_1, l_f, l_r, k_phi, c_phi;
    double I_x, I_z, I_xz; // assembled inertias about the roll center
    double B, C, D, E;     // axle magic-formula parameters
    double g = 9.81;
};

inline Eigen::Vector4d roll_plane_derivatives(const Eigen::Vector4d& s, double delta_f,
                                              const RollPlaneParams& p) {
    const double phi = s[0], phi_dot = s[1], beta = s[2], r = s[3];
    const auto tire = [&](double alpha) {
        const double ba = p.B * alpha;
        return p.D * std::sin(p.C * std::atan(ba - p.E * (ba - std::atan(ba))));
    };
    const double F_yf = tire(delta_f - std::atan((p.V * beta + r * p.l_f) / p.V));
    const double F_yr = tire(-std::atan((p.V * beta - r * p.l_r) / p.V));

    Eigen::Matrix3d M;
    Eigen::Vector3d h;
    // unknowns: [phi_dd, beta_dot, r_dot]
    M << -p.m_t * p.h_s, (p.m_t + p.m_u) * p.V, p.m_t * p.c - p.m_u * p.e_1,
        -p.I_xz, 0.0, p.I_z,
        p.I_x, p.m_t * p.h_s * p.V, -p.I_xz;
    h << F_yf + F_yr - (p.m_t + p.m_u) * p.V * r,
        F_yf * p.l_f - F_yr * p.l_r,
        -p.k_phi * phi - p.c_phi * phi_dot + phi * p.g * p.m_t * p.h_s - p.m_t * p.h_s * p.V * r;
    const Eigen::Vector3d u = M.partialPivLu().solve(h);
    return Eigen::Vector4d(phi_dot, u[0], u[1], u[2]);
}

} // namespace oracles
