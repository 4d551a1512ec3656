#include "lrg/governor.hpp"

#include "lrg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrg {

void GovernorConfig::validate() const {
    norm.validate();
    if (!(holder_L > 0.0) || !std::isfinite(holder_L)) throw ConfigError("holder_L must be > 0");
    if (!(holder_beta >= 1.0) || !std::isfinite(holder_beta))
        throw ConfigError("holder_beta must be >= 1");
    if (!(horizon_T > 0.0)) throw ConfigError("horizon_T must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(sample_period > 0.0)) throw ConfigError("sample_period must be > 0");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (!(delta_v1 > 0.0)) throw ConfigError("delta_v1 must be > 0");
}

namespace {

void check_finite_query(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, double d) {
    if (!a.allFinite() || !b.allFinite() || !c.allFinite() || !std::isfinite(d))
        throw std::invalid_argument("non-finite governor query");
    if (d < 0.0) throw std::invalid_argument("distance-to-boundary must be nonnegative");
}

/// Feasibility budget of one data point: ((d - d_tilde_i)/L)^beta minus the
/// (nu, delta_x) distance to the point. Negative means infeasible.
double step_budget(const DataPoint& p, const Eigen::VectorXd& nu, const Eigen::VectorXd& x_dev,
                   double d, const GovernorConfig& cfg) {
    const double headroom = d - p.d_tilde;
    if (headroom < 0.0) return -1.0;
    return std::pow(headroom / cfg.holder_L, cfg.holder_beta) -
           cfg.norm.command_state_block(nu - p.nu, x_dev - p.delta_x);
}

} // namespace

double dbar_estimate(const Dataset& dataset, const Eigen::VectorXd& nu,
                     const Eigen::VectorXd& delta_nu, const Eigen::VectorXd& delta_x,
                     const GovernorConfig& config) {
    check_finite_query(nu, delta_nu, delta_x, 0.0);
    const double inv_beta = 1.0 / config.holder_beta;
    double best = config.holder_L * std::pow(config.norm.step_state_block(delta_nu, delta_x), inv_beta);
    for (const auto& p : dataset.points()) {
        const double dist = config.norm.full(nu - p.nu, delta_nu - p.delta_nu, delta_x - p.delta_x);
        best = std::min(best, p.d_tilde + config.holder_L * std::pow(dist, inv_beta));
    }
    return best;
}

double kappa_for_datapoint(const DataPoint& point, const Eigen::VectorXd& nu,
                           const Eigen::VectorXd& r, const Eigen::VectorXd& x_dev, double d,
                           const GovernorConfig& config) {
    check_finite_query(nu, r, x_dev, d);
    const Eigen::VectorXd dir = r - nu;
    if (dir.norm() == 0.0) throw std::invalid_argument("kappa certificate needs r != nu");

    const double budget = step_budget(point, nu, x_dev, d, config);
    if (budget < 0.0) return 0.0;
    // The delta_nu block is a scaled Euclidean norm, so the constraint is
    // || kappa dir - delta_nu_i ||_2 <= budget / w_delta_nu.
    const double radius = budget / config.norm.w_delta_nu;

    double lo, hi;
    if (dir.size() == 1) {
        // Scalar-command resolvent: (delta_nu_i +/- radius)/(r - nu).
        const double a = (point.delta_nu[0] - radius) / dir[0];
        const double b = (point.delta_nu[0] + radius) / dir[0];
        lo = std::min(a, b);
        hi = std::max(a, b);
    } else {
        // Quadratic-norm resolvent: roots of
        // kappa^2 |dir|^2 - 2 kappa <dir, delta_nu_i> + |delta_nu_i|^2 - radius^2.
        const double aa = dir.squaredNorm();
        const double ab = dir.dot(point.delta_nu);
        const double bb = point.delta_nu.squaredNorm();
        const double disc = ab * ab - aa * (bb - radius * radius);
        if (disc < 0.0) return 0.0;
        const double s = std::sqrt(disc);
        lo = (ab - s) / aa;
        hi = (ab + s) / aa;
    }

    if (lo > 1.0 || hi < 0.0) return 0.0; // interval misses [0, 1]
    return std::min(hi, 1.0);
}

double kappa_for_datapoint_bisect(const DataPoint& point, const Eigen::VectorXd& nu,
                                  const Eigen::VectorXd& r, const Eigen::VectorXd& x_dev, double d,
                                  const GovernorConfig& config) {
    check_finite_query(nu, r, x_dev, d);
    const Eigen::VectorXd dir = r - nu;
    if (dir.norm() == 0.0) throw std::invalid_argument("kappa certificate needs r != nu");

    const double budget = step_budget(point, nu, x_dev, d, config);
    if (budget < 0.0) return 0.0;

    const auto slack = [&](double k) {
        return config.norm.step_block(k * dir - point.delta_nu) - budget;
    };

    if (slack(1.0) <= 0.0) return 1.0;

    // The constraint function is convex in kappa; locate its minimizer by
    // golden-section search, then bisect the upper feasibility crossing.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = slack(c), fe = slack(e);
    for (int i = 0; i < 200 && (b - a) > 1e-12; ++i) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = slack(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = slack(e);
        }
    }
    const double k_min = 0.5 * (a + b);
    if (slack(k_min) > 0.0) return 0.0;

    double feasible = k_min, infeasible = 1.0;
    for (int i = 0; i < 200 && (infeasible - feasible) > 1e-10; ++i) {
        const double mid = 0.5 * (feasible + infeasible);
        (slack(mid) <= 0.0 ? feasible : infeasible) = mid;
    }
    return feasible;
}

double kappa_fallback(const Eigen::VectorXd& nu, const Eigen::VectorXd& r,
                      const Eigen::VectorXd& x_dev, double d, const GovernorConfig& config) {
    check_finite_query(nu, r, x_dev, d);
    const double denom = config.norm.step_block(r - nu);
    if (denom == 0.0) throw std::invalid_argument("fallback certificate needs r != nu");
    const double val =
        (std::pow(d / config.holder_L, config.holder_beta) - config.norm.state_block(x_dev)) / denom;
    return std::clamp(val, 0.0, 1.0);
}

KappaResult compute_kappa(const Dataset& dataset, const Eigen::VectorXd& x_dev,
                          const Eigen::VectorXd& r, const Eigen::VectorXd& nu, double d,
                          const GovernorConfig& config) {
    check_finite_query(nu, r, x_dev, d);
    KappaResult result;
    if ((r - nu).norm() == 0.0) {
        // The update is a no-op whatever kappa is; 1 avoids the fallback
        // singularity with identical behavior.
        result.kappa = 1.0;
        result.trivial = true;
        return result;
    }

    result.kappa = kappa_fallback(nu, r, x_dev, d, config);
    result.fallback_wins = true;

    // Pure scan over immutable points; max is order-independent so a
    // parallel split reduces to bit-identical results.
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const double k = kappa_for_datapoint(dataset[i], nu, r, x_dev, d, config);
        if (k > result.kappa) {
            result.kappa = k;
            result.winners.assign(1, i);
            result.fallback_wins = false;
        } else if (k == result.kappa) {
            result.winners.push_back(i);
        }
    }
    return result;
}

Eigen::VectorXd apply_update(const Eigen::VectorXd& nu_minus, const Eigen::VectorXd& r,
                             double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0, 1]");
    if (kappa == 0.0) return nu_minus;
    if (kappa == 1.0) return r;
    return nu_minus + kappa * (r - nu_minus);
}

EnhancedUpdate apply_update_enhanced(const Eigen::VectorXd& nu_minus, const Eigen::VectorXd& r,
                                     double kappa, const SteadyStateMap& map,
                                     const GovernorConfig& config) {
    if (r.size() != 1 || nu_minus.size() != 1)
        throw ConfigError("enhanced update law requires a scalar command (tabulated d)");
    const double d_r = map.distance_to_boundary(r[0]);
    const double floor = std::min(d_r, config.delta_v1);
    const double gate = std::pow(floor / config.holder_L, config.holder_beta);
    if (!(config.lambda < gate))
        throw ConfigError("lambda must be < (min(d(r), delta_v1)/L)^beta for this command");

    EnhancedUpdate out;
    const Eigen::VectorXd candidate = apply_update(nu_minus, r, kappa);
    const bool v1 = map.distance_to_boundary(candidate[0]) >= floor;
    const bool v2 = config.norm.step_block(candidate - r) <=
                    std::max(config.norm.step_block(nu_minus - r) - config.lambda, 0.0);
    if (v1 && v2) {
        out.nu_plus = candidate;
        out.accepted = true;
    } else {
        out.nu_plus = nu_minus;
        out.accepted = false;
    }
    return out;
}

} // namespace lrg
