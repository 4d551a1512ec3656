#include "lrg/integrator.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"

#include <cmath>

namespace lrg {

Eigen::VectorXd rk4_step(const Plant& plant, const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                         double dt) {
    Eigen::VectorXd k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
    plant.derivatives(x, nu, k1);
    plant.derivatives(x + 0.5 * dt * k1, nu, k2);
    plant.derivatives(x + 0.5 * dt * k2, nu, k3);
    plant.derivatives(x + dt * k3, nu, k4);
    Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
        std::string snapshot = "integration fault, state:";
        for (int i = 0; i < x.size(); ++i) snapshot += " " + format_double(x[i]);
        throw NumericalFault(snapshot);
    }
    return next;
}

Eigen::VectorXd simulate(const Plant& plant, Eigen::VectorXd x, const Eigen::VectorXd& nu,
                         double duration, double dt,
                         const std::function<void(double, const Eigen::VectorXd&)>& on_step) {
    if (dt <= 0.0) throw ConfigError("integrator step must be positive");
    double t = 0.0;
    while (t < duration - 1e-12) {
        const double h = std::min(dt, duration - t);
        x = rk4_step(plant, x, nu, h);
        t += h;
        if (on_step) on_step(t, x);
    }
    return x;
}

} // namespace lrg
