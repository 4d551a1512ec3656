#include "lrg/holder.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/learning.hpp"
#include "lrg/version.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace lrg {

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()[0];
}

double slowest_decay_rate(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    double max_real = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        max_real = std::max(max_real, es.eigenvalues()[i].real());
    if (!(max_real < 0.0)) throw std::invalid_argument("A must be Hurwitz");
    return -max_real;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A) {
    // Scaling and squaring with a Taylor core; adequate for the small,
    // well-scaled matrices handled here.
    int squarings = 0;
    Eigen::MatrixXd scaled = A;
    while (spectral_norm(scaled) > 0.5) {
        scaled *= 0.5;
        ++squarings;
        if (squarings > 64) throw NumericalFault("matrix exponential scaling failed");
    }
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 20; ++k) {
        term = (term * scaled) / double(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

LtiBound lti_lipschitz_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& C, const Eigen::MatrixXd& F) {
    const double decay = slowest_decay_rate(A);
    double t_end = 10.0 / decay;

    constexpr int kSamples = 2000;
    double eta = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        const double h = t_end / kSamples;
        const Eigen::MatrixXd step = matrix_exp(A * h);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(A.rows(), A.cols());
        eta = 1.0; // t = 0
        double tail = 0.0;
        for (int k = 1; k <= kSamples; ++k) {
            m = m * step;
            tail = spectral_norm(m);
            eta = std::max(eta, tail);
        }
        if (tail < 0.5) {
            // Between-sample growth bound, then the submultiplicative tail
            // argument closes the sup over [t_end, inf).
            eta *= std::exp(spectral_norm(A) * h);
            break;
        }
        t_end *= 2.0; // slow transients; extend the sampled horizon
    }

    const Eigen::MatrixXd A_inv =
        A.partialPivLu().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
    const double c_ainv_b = spectral_norm(C * A_inv) * spectral_norm(B);
    LtiBound out;
    out.eta = eta;
    out.horizon = t_end;
    out.L_prime = std::max(eta * spectral_norm(C), (eta + 1.0) * c_ainv_b + spectral_norm(F));
    return out;
}

double lti_deviation(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& F, const Eigen::VectorXd& delta_nu,
                     const Eigen::VectorXd& delta_x) {
    const double decay = slowest_decay_rate(A);
    const double t_end = 10.0 / decay;
    constexpr int kSamples = 2000;
    const Eigen::MatrixXd step = matrix_exp(A * (t_end / kSamples));

    const Eigen::VectorXd ainv_b_dnu = A.partialPivLu().solve(B * delta_nu);
    const Eigen::VectorXd asym = F * delta_nu - C * ainv_b_dnu; // limit of y(t) - y_ss
    Eigen::VectorXd v = delta_x + ainv_b_dnu;

    double peak = (C * v + asym).norm(); // t = 0
    for (int k = 1; k <= kSamples; ++k) {
        v = step * v;
        peak = std::max(peak, (C * v + asym).norm());
    }
    return std::max(peak, asym.norm());
}

HolderProbeReport verify_holder_on_lti(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& C, const Eigen::MatrixXd& F,
                                       double L, double beta, int probe_count,
                                       std::uint64_t rng_seed) {
    if (probe_count < 1) throw std::invalid_argument("probe_count must be >= 1");
    slowest_decay_rate(A); // rejects non-Hurwitz inputs up front

    const int n = static_cast<int>(A.rows());
    const int n_nu = static_cast<int>(B.cols());

    HolderProbeReport report;
    report.probe_count = probe_count;
    report.L = L;
    report.beta = beta;
    report.rng_seed = rng_seed;
    report.records.reserve(probe_count);

    for (int i = 0; i < probe_count; ++i) {
        std::mt19937_64 rng(mix_seed(rng_seed, i));
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const auto draw = [&](int dim) {
            Eigen::VectorXd v(dim);
            for (int j = 0; j < dim; ++j) v[j] = u(rng);
            return v;
        };
        const Eigen::VectorXd nu1 = draw(n_nu), dnu1 = draw(n_nu), dx1 = draw(n);
        const Eigen::VectorXd nu2 = draw(n_nu), dnu2 = draw(n_nu), dx2 = draw(n);

        const double d1 = lti_deviation(A, B, C, F, dnu1, dx1);
        const double d2 = lti_deviation(A, B, C, F, dnu2, dx2);
        // Sum-of-blocks norm, matching the closed-form bound.
        const double dist = (nu1 - nu2).norm() + (dnu1 - dnu2).norm() + (dx1 - dx2).norm();

        HolderProbeRecord rec;
        rec.distance = dist;
        rec.ratio = dist > 0.0 ? std::abs(d1 - d2) / std::pow(dist, 1.0 / beta) : 0.0;
        rec.violation = std::abs(d1 - d2) > L * std::pow(dist, 1.0 / beta);
        report.max_ratio = std::max(report.max_ratio, rec.ratio);
        if (rec.violation) ++report.violations;
        report.records.push_back(rec);
    }
    return report;
}

HolderEstimate estimate_holder_sampling(const Plant& plant, const SteadyStateMap& map,
                                        int sample_count, double beta_fixed,
                                        std::uint64_t rng_seed, double safety_factor,
                                        const GovernorConfig& config, double dt) {
    if (sample_count < 1) throw ConfigError("sample budget must be >= 1");
    if (plant.command_dim() != 1)
        throw ConfigError("sampling estimator drives scalar-command plants");
    config.validate();

    const int n = plant.state_dim();
    const Box v = plant.command_set();

    // State-offset scale per coordinate from the equilibrium spread over the
    // map, floored so flat coordinates still get a finite probe range.
    Eigen::VectorXd x_scale = Eigen::VectorXd::Constant(n, 0.0);
    {
        Eigen::VectorXd lo = map.nodes().front().x_nu, hi = map.nodes().front().x_nu;
        for (const auto& node : map.nodes()) {
            lo = lo.cwiseMin(node.x_nu);
            hi = hi.cwiseMax(node.x_nu);
        }
        x_scale = (hi - lo).cwiseMax(0.05);
    }
    const double nu_span = map.nu_max() - map.nu_min();

    const auto dtilde_at = [&](double nu, double dnu, const Eigen::VectorXd& dx) {
        const Eigen::VectorXd x_start = map.equilibrium_state(nu) + dx;
        return measure_dtilde(plant, Eigen::VectorXd::Constant(1, nu),
                              Eigen::VectorXd::Constant(1, dnu), x_start, map.steady_output(nu),
                              config.horizon_T, config.epsilon, dt);
    };

    HolderEstimate est;
    est.beta = beta_fixed;
    est.sample_count = sample_count;
    est.safety_factor = safety_factor;
    est.rng_seed = rng_seed;

    const double rel = 1e-3;
    for (int s = 0; s < sample_count; ++s) {
        std::mt19937_64 rng(mix_seed(rng_seed, s));
        // Keep a perturbation margin inside V on both the base command and
        // the step target.
        const double margin = rel * nu_span;
        std::uniform_real_distribution<double> u_nu(std::max(v.lo[0], map.nu_min()) + 2.0 * margin,
                                                    std::min(v.hi[0], map.nu_max()) - 2.0 * margin);
        std::uniform_real_distribution<double> u01(-0.5, 0.5);

        const double nu = u_nu(rng);
        const double target = u_nu(rng);
        const double dnu = target - nu;
        Eigen::VectorXd dx(n);
        for (int j = 0; j < n; ++j) dx[j] = u01(rng) * x_scale[j];

        // Central differences coordinate by coordinate.
        const auto consider = [&](double d_plus, double d_minus, double step_norm) {
            if (step_norm <= 0.0) return;
            const double ratio = std::abs(d_plus - d_minus) / std::pow(step_norm, 1.0 / beta_fixed);
            est.max_observed_ratio = std::max(est.max_observed_ratio, ratio);
        };

        const double h_nu = rel * nu_span;
        consider(dtilde_at(nu + h_nu, dnu, dx), dtilde_at(nu - h_nu, dnu, dx),
                 config.norm.w_nu * 2.0 * h_nu);
        consider(dtilde_at(nu, dnu + h_nu, dx), dtilde_at(nu, dnu - h_nu, dx),
                 config.norm.w_delta_nu * 2.0 * h_nu);
        for (int j = 0; j < n; ++j) {
            const double h_x = rel * x_scale[j];
            Eigen::VectorXd dxp = dx, dxm = dx;
            dxp[j] += h_x;
            dxm[j] -= h_x;
            consider(dtilde_at(nu, dnu, dxp), dtilde_at(nu, dnu, dxm),
                     config.norm.w_delta_x * 2.0 * h_x);
        }
    }

    est.L = safety_factor * est.max_observed_ratio;
    return est;
}

void HolderEstimate::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write estimate file: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg holder estimate v") + kVersion);
    w.comment("seed=" + std::to_string(rng_seed));
    w.header({"L", "beta", "sample_count", "max_observed_ratio", "safety_factor"});
    w.row({L, beta, static_cast<double>(sample_count), max_observed_ratio, safety_factor});
}

void HolderProbeReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write probe report: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg holder probe report v") + kVersion);
    w.comment("seed=" + std::to_string(rng_seed) + " L=" + format_double(L) +
              " beta=" + format_double(beta));
    w.header({"ratio", "distance", "violation"});
    for (const auto& r : records) w.row({r.ratio, r.distance, r.violation ? 1.0 : 0.0});
}

} // namespace lrg
