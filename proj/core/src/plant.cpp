#include "lrg/plant.hpp"

#include "lrg/errors.hpp"

#include <cmath>

namespace lrg {

bool Box::contains(const Eigen::VectorXd& v, double tol) const {
    for (int i = 0; i < v.size(); ++i)
        if (v[i] < lo[i] - tol || v[i] > hi[i] + tol) return false;
    return true;
}

double Box::distance_inside(const Eigen::VectorXd& v) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.size(); ++i) d = std::min({d, v[i] - lo[i], hi[i] - v[i]});
    return std::max(d, 0.0);
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = v;
    for (int i = 0; i < v.size(); ++i) out[i] = std::min(std::max(out[i], lo[i]), hi[i]);
    return out;
}

LtiPlant::LtiPlant(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd F,
                   Box command_set, Box constraint_set)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), F_(std::move(F)),
      command_(std::move(command_set)), constraint_(std::move(constraint_set)) {
    const auto n = A_.rows();
    if (A_.cols() != n || B_.rows() != n || C_.cols() != n || F_.rows() != C_.rows() ||
        F_.cols() != B_.cols())
        throw ConfigError("inconsistent LTI system dimensions");
}

void LtiPlant::derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                           Eigen::VectorXd& dxdt) const {
    dxdt = A_ * x + B_ * nu;
}

void LtiPlant::output(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                      Eigen::VectorXd& y) const {
    y = C_ * x + F_ * nu;
}

Eigen::VectorXd LtiPlant::initial_state() const { return Eigen::VectorXd::Zero(A_.rows()); }

std::unique_ptr<LtiPlant> make_canonical_scalar_plant() {
    Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), f(1, 1);
    a << -1.0;
    b << 1.0;
    c << 1.0;
    f << 0.0;
    Box v{Eigen::VectorXd::Constant(1, -0.9), Eigen::VectorXd::Constant(1, 0.9)};
    Box y{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
    return std::make_unique<LtiPlant>(a, b, c, f, v, y);
}

} // namespace lrg
