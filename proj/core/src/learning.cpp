#include "lrg/learning.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/integrator.hpp"
#include "lrg/version.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace lrg {

void LearningConfig::validate() const {
    if (n_max < 1 || k_max < 1) throw ConfigError("n_max and k_max must be >= 1");
    if (!(window_T > 0.0)) throw ConfigError("window_T must be > 0");
    if (error_threshold < 0.0) throw ConfigError("error_threshold must be >= 0");
    if (prune_cell_diameter < 0.0) throw ConfigError("prune_cell_diameter must be >= 0");
    if (command_source == CommandSource::profile && profile.empty())
        throw ConfigError("profile command source needs a nonempty profile");
}

namespace {

struct RolloutResult {
    double max_deviation = 0.0;
    Eigen::VectorXd x_at_advance;
};

/// Rolls the plant forward for `horizon` under a constant command, tracking
/// the max output deviation from y_ref over the grid (t = 0 included) and
/// returning the state at `advance` into the rollout. The monitor callback
/// sees (t, y) at every grid point.
RolloutResult rollout_deviation(const Plant& plant, Eigen::VectorXd x, const Eigen::VectorXd& nu,
                                const Eigen::VectorXd& y_ref, double horizon, double advance,
                                double dt,
                                const std::function<void(double, const Eigen::VectorXd&)>& monitor) {
    RolloutResult out;
    Eigen::VectorXd y(plant.output_dim());
    plant.output(x, nu, y);
    if (monitor) monitor(0.0, y);
    out.max_deviation = (y - y_ref).norm();

    double t = 0.0;
    bool captured = advance <= 0.0;
    if (captured) out.x_at_advance = x;
    while (t < horizon - 1e-12) {
        const double h = std::min(dt, horizon - t);
        x = rk4_step(plant, x, nu, h);
        t += h;
        plant.output(x, nu, y);
        if (monitor) monitor(t, y);
        out.max_deviation = std::max(out.max_deviation, (y - y_ref).norm());
        if (!captured && t >= advance - 1e-12) {
            out.x_at_advance = x;
            captured = true;
        }
    }
    if (!captured) out.x_at_advance = x;
    return out;
}

} // namespace

double measure_dtilde(const Plant& plant, const Eigen::VectorXd& nu_minus,
                      const Eigen::VectorXd& delta_nu, const Eigen::VectorXd& x_start,
                      const Eigen::VectorXd& y_ref, double horizon_T, double epsilon, double dt) {
    if (!(horizon_T > 0.0) || !(epsilon > 0.0)) throw ConfigError("horizon_T and epsilon must be > 0");
    const Box v = plant.command_set();
    const Eigen::VectorXd nu_plus = nu_minus + delta_nu;
    if (!v.contains(nu_minus, 1e-9) || !v.contains(nu_plus, 1e-9))
        throw ConfigError("deviation measurement outside the admissible command set");
    auto r = rollout_deviation(plant, x_start, nu_plus, y_ref, horizon_T, 0.0, dt, {});
    return r.max_deviation + epsilon;
}

double measure_dtilde(const Plant& plant, const SteadyStateMap& map, double nu_minus,
                      double delta_nu, const Eigen::VectorXd& x_start, double horizon_T,
                      double epsilon, double dt) {
    return measure_dtilde(plant, Eigen::VectorXd::Constant(1, nu_minus),
                          Eigen::VectorXd::Constant(1, delta_nu), x_start,
                          map.steady_output(nu_minus), horizon_T, epsilon, dt);
}

double tracking_error_ma(const std::vector<std::pair<double, double>>& history, double window_T,
                         double t_now, bool* partial) {
    if (history.empty()) throw ConfigError("tracking-error history is empty");
    if (!(window_T > 0.0)) throw ConfigError("window_T must be > 0");

    const double t_lo = t_now - window_T;
    const bool full = history.front().first <= t_lo + 1e-12;
    if (partial) *partial = !full;

    // Collect points in [max(t0, t_lo), t_now], interpolating the left edge.
    double integral = 0.0;
    double prev_t = 0.0, prev_e = 0.0;
    bool have_prev = false;
    double span_start = std::max(history.front().first, t_lo);
    for (std::size_t i = 0; i < history.size(); ++i) {
        auto [t, e] = history[i];
        if (t > t_now + 1e-12) break;
        if (t < t_lo) {
            // interpolate at the window edge against the next sample
            if (i + 1 < history.size() && history[i + 1].first > t_lo) {
                const auto& [t2, e2] = history[i + 1];
                const double w = t2 == t ? 0.0 : (t_lo - t) / (t2 - t);
                prev_t = t_lo;
                prev_e = e + w * (e2 - e);
                have_prev = true;
            }
            continue;
        }
        if (have_prev) integral += 0.5 * (prev_e + e) * (t - prev_t);
        prev_t = t;
        prev_e = e;
        have_prev = true;
    }
    const double span = prev_t - span_start;
    if (span <= 0.0) return prev_e; // single instant of history
    return integral / (full ? window_T : span);
}

LearningReport run_learning(const Plant& plant, const SteadyStateMap& map,
                            const GovernorConfig& governor_config, const LearningConfig& config,
                            double dt) {
    governor_config.validate();
    config.validate();
    if (plant.command_dim() != 1)
        throw ConfigError("the learning loop drives scalar-command plants (tabulated d)");
    if (!(dt > 0.0) || dt > governor_config.sample_period / 50.0 + 1e-12)
        throw ConfigError("integrator step must satisfy dt <= sample_period/50");

    const Box v = plant.command_set();
    const Box y_box = plant.constraint_set();

    // Line 1: start at a strictly constraint-admissible steady state.
    const double nu0 = config.initial_command;
    if (!v.contains(Eigen::VectorXd::Constant(1, nu0), 1e-12))
        throw ConfigError("initial command outside the admissible set");
    Eigen::VectorXd x = map.equilibrium_state(nu0);
    {
        Eigen::VectorXd y0(plant.output_dim());
        plant.output(x, Eigen::VectorXd::Constant(1, nu0), y0);
        if (!(y_box.distance_inside(y0) > 0.0))
            throw ConfigError("initial steady state is not strictly constraint-admissible");
    }

    LearningReport report{Dataset(1, plant.state_dim()), Dataset(1, plant.state_dim()), {}, {}, 0,
                          false, 0.0, 0.0};
    std::mt19937_64 rng(config.rng_seed);
    std::uniform_real_distribution<double> draw(v.lo[0], v.hi[0]);

    std::vector<std::pair<double, double>> error_history;
    double nu = nu0;
    double t = 0.0;
    const double period = governor_config.sample_period;
    const double horizon = std::max(governor_config.horizon_T, period);

    long live_steps_per_sample = static_cast<long>(std::round(period / dt));
    bool stop = false;
    for (int n = 0; n < config.n_max && !stop; ++n) {
        double r;
        if (config.command_source == CommandSource::profile) {
            r = config.profile[n % config.profile.size()];
            if (!v.contains(Eigen::VectorXd::Constant(1, r), 1e-12))
                throw ConfigError("profile command outside the admissible set");
        } else {
            int guard = 0;
            do {
                r = draw(rng);
            } while (r == nu && ++guard < 100);
        }

        for (int k = 0; k < config.k_max && !stop; ++k) {
            const Eigen::VectorXd nu_vec = Eigen::VectorXd::Constant(1, nu);
            const Eigen::VectorXd r_vec = Eigen::VectorXd::Constant(1, r);
            const double d = map.distance_to_boundary(nu);
            const Eigen::VectorXd x_dev = x - map.equilibrium_state(nu);
            const Eigen::VectorXd y_ref = map.steady_output(nu);

            const KappaResult kr =
                compute_kappa(report.dataset_unpruned, x_dev, r_vec, nu_vec, d, governor_config);
            const Eigen::VectorXd nu_plus = apply_update(nu_vec, r_vec, kr.kappa);
            const double delta_nu = nu_plus[0] - nu;

            error_history.emplace_back(t, std::abs(r - nu));
            error_history.emplace_back(t, std::abs(r - nu_plus[0]));

            // Roll forward one horizon under the new constant command. The
            // segment up to the next sample instant is the live trajectory;
            // the tail re-measures what the certificate promised, so a
            // violation anywhere is a safety fault.
            long step_index = 0;
            auto monitor = [&](double tau, const Eigen::VectorXd& y) {
                const double margin = y_box.distance_inside(y);
                report.max_abs_output_excess =
                    std::max(report.max_abs_output_excess, -margin);
                if (!y_box.contains(y, 0.0)) {
                    if (step_index <= live_steps_per_sample) ++report.constraint_violations;
                    throw SafetyFault(
                        "output constraint violated at t=" + format_double(t + tau) +
                        "; the configured Holder constants do not hold for this plant");
                }
                ++step_index;
            };
            auto rollout =
                rollout_deviation(plant, x, nu_plus, y_ref, horizon, period, dt, monitor);
            const double d_tilde = rollout.max_deviation + governor_config.epsilon;

            DataPoint p;
            p.nu = nu_vec;
            p.delta_nu = Eigen::VectorXd::Constant(1, delta_nu);
            p.delta_x = x_dev;
            p.d_tilde = d_tilde;
            report.dataset_unpruned.append(p);

            LearningStepLog log;
            log.t = t;
            log.r = r;
            log.nu_pre = nu;
            log.nu_post = nu_plus[0];
            log.kappa = kr.kappa;
            log.d = d;
            log.d_tilde = d_tilde;
            log.x_dev = x_dev;
            log.dataset_size = report.dataset_unpruned.size() - 1;
            log.fallback_wins = kr.fallback_wins;
            log.tie_count = static_cast<int>(kr.winners.size());
            report.steps.push_back(std::move(log));

            x = rollout.x_at_advance;
            nu = nu_plus[0];
            t += period;

            bool partial = true;
            const double ma = tracking_error_ma(error_history, config.window_T, t, &partial);
            report.tracking_error_trace.push_back({t, ma, !partial});
            if (!partial && config.error_threshold > 0.0 && ma < config.error_threshold) {
                report.early_terminated = true;
                stop = true;
            }
        }
    }

    report.final_time = t;
    report.dataset = config.prune_cell_diameter > 0.0
                         ? prune_dataset(report.dataset_unpruned, config.prune_cell_diameter,
                                         governor_config.norm)
                         : report.dataset_unpruned;
    return report;
}

Dataset prune_dataset(const Dataset& dataset, double cell_diameter, const ProductNorm& norm) {
    if (cell_diameter < 0.0) throw ConfigError("cell diameter must be >= 0");
    if (cell_diameter == 0.0 || dataset.size() < 2) return dataset;
    norm.validate();

    const int n_nu = dataset.command_dim();
    const int n_x = dataset.state_dim();
    // Hypercube side such that the cell diameter in the product norm is
    // cell_diameter: the block diameters are w * side * sqrt(block_dim).
    const double scale = std::max({norm.w_nu * std::sqrt(double(n_nu)),
                                   norm.w_delta_nu * std::sqrt(double(n_nu)),
                                   norm.w_delta_x * std::sqrt(double(std::max(n_x, 1)))});
    const double side = cell_diameter / scale;

    std::map<std::vector<long long>, std::size_t> best; // cell -> index of min d_tilde
    std::vector<long long> key(2 * n_nu + n_x);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const DataPoint& p = dataset[i];
        int c = 0;
        for (int j = 0; j < n_nu; ++j) key[c++] = static_cast<long long>(std::floor(p.nu[j] / side));
        for (int j = 0; j < n_nu; ++j)
            key[c++] = static_cast<long long>(std::floor(p.delta_nu[j] / side));
        for (int j = 0; j < n_x; ++j)
            key[c++] = static_cast<long long>(std::floor(p.delta_x[j] / side));
        auto [it, inserted] = best.emplace(key, i);
        if (!inserted && dataset[it->second].d_tilde > p.d_tilde) it->second = i;
    }

    std::vector<std::size_t> keep;
    keep.reserve(best.size());
    for (const auto& [cell, idx] : best) keep.push_back(idx);
    std::sort(keep.begin(), keep.end());

    Dataset out(n_nu, n_x);
    for (std::size_t idx : keep) out.append(dataset[idx]);
    return out;
}

void LearningReport::save_trace_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg tracking-error trace v") + kVersion);
    w.header({"t", "windowed_error", "full_window"});
    for (const auto& p : tracking_error_trace)
        w.row({p.t, p.value, p.full_window ? 1.0 : 0.0});
}

void LearningReport::save_step_log_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write step log: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg learning step log v") + kVersion);
    w.header({"t", "r", "nu_pre", "nu_post", "kappa", "d", "d_tilde", "dataset_size",
              "fallback_wins", "tie_count"});
    for (const auto& s : steps)
        w.row({s.t, s.r, s.nu_pre, s.nu_post, s.kappa, s.d, s.d_tilde,
               static_cast<double>(s.dataset_size), s.fallback_wins ? 1.0 : 0.0,
               static_cast<double>(s.tie_count)});
}

} // namespace lrg
