#include "lrg/dataset.hpp"

#include "lrg/csv.hpp"
#include "lrg/errors.hpp"
#include "lrg/version.hpp"

#include <cmath>
#include <fstream>

namespace lrg {

Dataset::Dataset(int n_nu, int n_x) : n_nu_(n_nu), n_x_(n_x) {
    if (n_nu < 1 || n_x < 0) throw ConfigError("dataset dimensions must satisfy n_nu >= 1, n_x >= 0");
}

void Dataset::append(DataPoint p) {
    if (p.nu.size() != n_nu_ || p.delta_nu.size() != n_nu_ || p.delta_x.size() != n_x_)
        throw ConfigError("data point dimensions do not match dataset");
    if (!p.nu.allFinite() || !p.delta_nu.allFinite() || !p.delta_x.allFinite() ||
        !std::isfinite(p.d_tilde))
        throw NumericalFault("non-finite data point rejected");
    if (p.d_tilde < 0.0) throw NumericalFault("negative deviation bound rejected");
    points_.push_back(std::move(p));
}

void Dataset::save_csv(const std::string& path, const ProductNorm& norm) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write dataset file: " + path);
    CsvWriter w(out);
    w.comment(std::string("lrg dataset v") + kVersion);
    w.comment("n_nu=" + std::to_string(n_nu_) + " n_x=" + std::to_string(n_x_));
    w.comment("w_nu=" + format_double(norm.w_nu) + " w_delta_nu=" + format_double(norm.w_delta_nu) +
              " w_delta_x=" + format_double(norm.w_delta_x));
    std::vector<std::string> cols;
    for (int i = 0; i < n_nu_; ++i) cols.push_back("nu" + std::to_string(i));
    for (int i = 0; i < n_nu_; ++i) cols.push_back("delta_nu" + std::to_string(i));
    for (int i = 0; i < n_x_; ++i) cols.push_back("delta_x" + std::to_string(i));
    cols.push_back("d_tilde");
    w.header(cols);
    std::vector<double> row(cols.size());
    for (const auto& p : points_) {
        int c = 0;
        for (int i = 0; i < n_nu_; ++i) row[c++] = p.nu[i];
        for (int i = 0; i < n_nu_; ++i) row[c++] = p.delta_nu[i];
        for (int i = 0; i < n_x_; ++i) row[c++] = p.delta_x[i];
        row[c] = p.d_tilde;
        w.row(row);
    }
}

Dataset Dataset::load_csv(const std::string& path, ProductNorm* norm_out) {
    CsvTable table = CsvTable::load(path);
    std::string v;
    if (!table.comment_value("n_nu", v)) throw ConfigError(path + ": missing n_nu in dataset header");
    int n_nu = std::stoi(v);
    if (!table.comment_value("n_x", v)) throw ConfigError(path + ": missing n_x in dataset header");
    int n_x = std::stoi(v);
    if (static_cast<int>(table.columns.size()) != 2 * n_nu + n_x + 1)
        throw ConfigError(path + ": column count does not match declared dimensions");

    if (norm_out) {
        if (table.comment_value("w_nu", v)) norm_out->w_nu = std::stod(v);
        if (table.comment_value("w_delta_nu", v)) norm_out->w_delta_nu = std::stod(v);
        if (table.comment_value("w_delta_x", v)) norm_out->w_delta_x = std::stod(v);
    }

    Dataset ds(n_nu, n_x);
    for (const auto& row : table.rows) {
        DataPoint p;
        p.nu.resize(n_nu);
        p.delta_nu.resize(n_nu);
        p.delta_x.resize(n_x);
        int c = 0;
        for (int i = 0; i < n_nu; ++i) p.nu[i] = row[c++];
        for (int i = 0; i < n_nu; ++i) p.delta_nu[i] = row[c++];
        for (int i = 0; i < n_x; ++i) p.delta_x[i] = row[c++];
        p.d_tilde = row[c];
        ds.append(std::move(p));
    }
    return ds;
}

} // namespace lrg
