#include "lrg/steady_state_map.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/integrator.hpp"
#include "lrg/version.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

namespace lrg {

SteadyStateMap::SteadyStateMap(std::vector<MapNode> nodes, InterpMode mode)
    : nodes_(std::move(nodes)), mode_(mode) {
    if (nodes_.size() < 2) throw ConfigError("steady-state map needs at least two nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i].nu > nodes_[i - 1].nu))
            throw ConfigError("steady-state map nodes must be strictly ascending");
}

std::pair<std::size_t, std::size_t> SteadyStateMap::bracket(double nu) const {
    if (nu < nu_min() || nu > nu_max())
        throw ConfigError("command " + format_double(nu) + " outside steady-state map hull [" +
                          format_double(nu_min()) + ", " + format_double(nu_max()) + "]");
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), nu,
                               [](const MapNode& n, double v) { return n.nu < v; });
    std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
    if (hi == 0) return {0, 0};
    if (nodes_[hi].nu == nu) return {hi, hi};
    return {hi - 1, hi};
}

bool SteadyStateMap::admissible(double nu) const {
    if (nu < nu_min() || nu > nu_max()) return false;
    auto [a, b] = bracket(nu);
    return nodes_[a].usable && nodes_[b].usable;
}

double SteadyStateMap::distance_to_boundary(double nu) const {
    auto [a, b] = bracket(nu);
    if (!nodes_[a].usable || !nodes_[b].usable)
        throw ConfigError("command " + format_double(nu) + " crosses an unusable map node");
    if (a == b) return nodes_[a].d;
    if (mode_ == InterpMode::conservative) return std::min(nodes_[a].d, nodes_[b].d);
    const double w = (nu - nodes_[a].nu) / (nodes_[b].nu - nodes_[a].nu);
    return (1.0 - w) * nodes_[a].d + w * nodes_[b].d;
}

Eigen::VectorXd SteadyStateMap::equilibrium_state(double nu) const {
    auto [a, b] = bracket(nu);
    if (!nodes_[a].usable || !nodes_[b].usable)
        throw ConfigError("command " + format_double(nu) + " crosses an unusable map node");
    if (a == b) return nodes_[a].x_nu;
    const double w = (nu - nodes_[a].nu) / (nodes_[b].nu - nodes_[a].nu);
    return (1.0 - w) * nodes_[a].x_nu + w * nodes_[b].x_nu;
}

Eigen::VectorXd SteadyStateMap::steady_output(double nu) const {
    auto [a, b] = bracket(nu);
    if (!nodes_[a].usable || !nodes_[b].usable)
        throw ConfigError("command " + format_double(nu) + " crosses an unusable map node");
    if (a == b) return nodes_[a].y_nu;
    const double w = (nu - nodes_[a].nu) / (nodes_[b].nu - nodes_[a].nu);
    return (1.0 - w) * nodes_[a].y_nu + w * nodes_[b].y_nu;
}

double SteadyStateMap::max_adjacent_jump() const {
    double jump = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].usable && nodes_[i - 1].usable)
            jump = std::max(jump, std::abs(nodes_[i].d - nodes_[i - 1].d));
    return jump;
}

namespace {

MapNode settle_node(const Plant& plant, double nu_value, Eigen::VectorXd x,
                    const MapBuildOptions& opt) {
    Eigen::VectorXd nu = Eigen::VectorXd::Constant(1, nu_value);
    Eigen::VectorXd xdot(plant.state_dim());

    MapNode node;
    node.nu = nu_value;

    double t = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    while (t < opt.max_settle_time) {
        x = rk4_step(plant, x, nu, opt.dt);
        t += opt.dt;
        plant.derivatives(x, nu, xdot);
        residual = xdot.norm();
        if (residual < opt.settle_tolerance) break;
    }

    node.x_nu = x;
    node.settle_time = t;
    node.residual = residual;
    node.usable = residual < opt.settle_tolerance;

    Eigen::VectorXd y(plant.output_dim());
    plant.output(x, nu, y);
    node.y_nu = y;
    node.d = plant.constraint_set().distance_inside(y);
    return node;
}

std::vector<MapNode> sweep_stripe(const Plant& plant, const std::vector<double>& grid,
                                  std::size_t begin, std::size_t end, const MapBuildOptions& opt) {
    std::vector<MapNode> out;
    out.reserve(end - begin);
    Eigen::VectorXd warm = plant.initial_state();
    for (std::size_t i = begin; i < end; ++i) {
        MapNode node = settle_node(plant, grid[i], warm, opt);
        if (node.usable) warm = node.x_nu;
        out.push_back(std::move(node));
    }
    return out;
}

} // namespace

SteadyStateMap build_steady_state_map(const Plant& plant, const std::vector<double>& node_grid,
                                      const MapBuildOptions& options) {
    if (plant.command_dim() != 1)
        throw ConfigError("steady-state map supports scalar-command plants only");
    if (node_grid.size() < 2) throw ConfigError("node grid needs at least two entries");

    const int stripes = std::max(1, std::min<int>(options.stripes, static_cast<int>(node_grid.size())));
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t chunk = (node_grid.size() + stripes - 1) / stripes;
    for (std::size_t b = 0; b < node_grid.size(); b += chunk)
        ranges.emplace_back(b, std::min(b + chunk, node_grid.size()));

    std::vector<std::future<std::vector<MapNode>>> futures;
    for (auto [b, e] : ranges)
        futures.push_back(std::async(std::launch::async, [&, b, e] {
            return sweep_stripe(plant, node_grid, b, e, options);
        }));

    std::vector<MapNode> nodes;
    nodes.reserve(node_grid.size());
    for (auto& f : futures)
        for (auto& n : f.get()) nodes.push_back(std::move(n));

    return SteadyStateMap(std::move(nodes), options.mode);
}

std::vector<double> uniform_grid(double nu_min, double nu_max, double step) {
    if (!(step > 0.0) || !(nu_max > nu_min)) throw ConfigError("bad grid specification");
    std::vector<double> grid;
    const int count = static_cast<int>(std::round((nu_max - nu_min) / step));
    for (int i = 0; i <= count; ++i) grid.push_back(nu_min + i * step);
    if (grid.back() < nu_max - 1e-12) grid.push_back(nu_max);
    return grid;
}

void SteadyStateMap::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write map file: " + path);
    CsvWriter w(out);
    const int n = static_cast<int>(nodes_.front().x_nu.size());
    const int m = static_cast<int>(nodes_.front().y_nu.size());
    w.comment(std::string("lrg steady-state map v") + kVersion);
    w.comment("n_x=" + std::to_string(n) + " n_y=" + std::to_string(m));
    std::vector<std::string> cols{"nu"};
    for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
    for (int i = 0; i < m; ++i) cols.push_back("y" + std::to_string(i));
    cols.insert(cols.end(), {"d", "settle_time", "residual", "usable"});
    w.header(cols);
    for (const auto& node : nodes_) {
        std::vector<double> row{node.nu};
        for (int i = 0; i < n; ++i) row.push_back(node.x_nu[i]);
        for (int i = 0; i < m; ++i) row.push_back(node.y_nu[i]);
        row.push_back(node.d);
        row.push_back(node.settle_time);
        row.push_back(node.residual);
        row.push_back(node.usable ? 1.0 : 0.0);
        w.row(row);
    }
}

SteadyStateMap SteadyStateMap::load_csv(const std::string& path, InterpMode mode) {
    CsvTable table = CsvTable::load(path);
    std::string v;
    if (!table.comment_value("n_x", v)) throw ConfigError(path + ": missing n_x in map header");
    const int n = std::stoi(v);
    if (!table.comment_value("n_y", v)) throw ConfigError(path + ": missing n_y in map header");
    const int m = std::stoi(v);
    if (static_cast<int>(table.columns.size()) != 1 + n + m + 4)
        throw ConfigError(path + ": column count does not match declared dimensions");

    std::vector<MapNode> nodes;
    for (const auto& row : table.rows) {
        MapNode node;
        int c = 0;
        node.nu = row[c++];
        node.x_nu.resize(n);
        for (int i = 0; i < n; ++i) node.x_nu[i] = row[c++];
        node.y_nu.resize(m);
        for (int i = 0; i < m; ++i) node.y_nu[i] = row[c++];
        node.d = row[c++];
        node.settle_time = row[c++];
        node.residual = row[c++];
        node.usable = row[c] != 0.0;
        nodes.push_back(std::move(node));
    }
    return SteadyStateMap(std::move(nodes), mode);
}

} // namespace lrg
