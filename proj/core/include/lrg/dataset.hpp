#pragma once

#include "lrg/norms.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace lrg {

/// One measured training tuple: the pre-update reference nu, the applied
/// reference step delta_nu, the state deviation delta_x from the equilibrium
/// of nu, and the measured finite-horizon deviation bound d_tilde.
struct DataPoint {
    Eigen::VectorXd nu;
    Eigen::VectorXd delta_nu;
    Eigen::VectorXd delta_x;
    double d_tilde = 0.0;
};

/// Append-only collection of data points with fixed dimensions.
/// Non-finite coordinates and negative bounds are rejected at ingestion so
/// the max/min reductions downstream are total-order safe.
class Dataset {
public:
    Dataset(int n_nu, int n_x);

    int command_dim() const { return n_nu_; }
    int state_dim() const { return n_x_; }

    void append(DataPoint p);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const DataPoint& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<DataPoint>& points() const { return points_; }

    /// CSV schema: a comment header carrying dimensions and norm weights,
    /// then one row per point: nu..., delta_nu..., delta_x..., d_tilde.
    void save_csv(const std::string& path, const ProductNorm& norm) const;
    static Dataset load_csv(const std::string& path, ProductNorm* norm_out = nullptr);

private:
    int n_nu_;
    int n_x_;
    std::vector<DataPoint> points_;
};

} // namespace lrg
