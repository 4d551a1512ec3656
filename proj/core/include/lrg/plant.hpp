#pragma once

#include <Eigen/Core>

#include <memory>

namespace lrg {

/// Axis-aligned box, used for the admissible command set and the output
/// constraint set.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;

    /// Euclidean distance from an interior point to the box complement,
    /// i.e. the perpendicular distance to the nearest face; 0 on or
    /// outside the boundary.
    double distance_inside(const Eigen::VectorXd& v) const;

    Eigen::VectorXd clamp(const Eigen::VectorXd& v) const;
};

/// Behavioral contract of a pre-stabilized closed-loop system
///   xdot = f(x, nu),  y = g(x, nu)
/// with a unique globally asymptotically stable equilibrium per constant
/// command. Implementations must be deterministic: identical (x, nu) yield
/// identical derivatives and outputs.
class Plant {
public:
    virtual ~Plant() = default;

    virtual int state_dim() const = 0;
    virtual int command_dim() const = 0;
    virtual int output_dim() const = 0;

    virtual void derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                             Eigen::VectorXd& dxdt) const = 0;
    virtual void output(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                        Eigen::VectorXd& y) const = 0;

    /// Admissible command set V.
    virtual Box command_set() const = 0;
    /// Output constraint set Y.
    virtual Box constraint_set() const = 0;

    /// Nominal rest state used to seed equilibrium sweeps.
    virtual Eigen::VectorXd initial_state() const = 0;
};

/// Linear time-invariant plant xdot = A x + B nu, y = C x + F nu.
class LtiPlant : public Plant {
public:
    LtiPlant(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd F,
             Box command_set, Box constraint_set);

    int state_dim() const override { return static_cast<int>(A_.rows()); }
    int command_dim() const override { return static_cast<int>(B_.cols()); }
    int output_dim() const override { return static_cast<int>(C_.rows()); }

    void derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                     Eigen::VectorXd& dxdt) const override;
    void output(const Eigen::VectorXd& x, const Eigen::VectorXd& nu,
                Eigen::VectorXd& y) const override;

    Box command_set() const override { return command_; }
    Box constraint_set() const override { return constraint_; }
    Eigen::VectorXd initial_state() const override;

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& F() const { return F_; }

private:
    Eigen::MatrixXd A_, B_, C_, F_;
    Box command_, constraint_;
};

/// The canonical scalar test plant xdot = -x + nu, y = x with V = [-0.9, 0.9]
/// and Y = [-1, 1].
std::unique_ptr<LtiPlant> make_canonical_scalar_plant();

} // namespace lrg
