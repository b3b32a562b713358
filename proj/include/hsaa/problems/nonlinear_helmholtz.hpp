// Nonlinear Helmholtz recovery problem: frozen-nonlinearity Picard map for
// u'' + k0^2 (1 + eps(x) |u|^2) u = 0 on [0,1] with impedance boundaries
// u'(0) + i k0 u(0) = 2 i k0 and u'(1) - i k0 u(1) = 0.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "hsaa/fixed_point.hpp"

namespace hsaa {

class NonlinearHelmholtzProblem final : public FixedPointProblem<std::complex<double>> {
public:
    /// Default grid: 501 samples of [0,1] with spacing h = 0.002.
    explicit NonlinearHelmholtzProblem(double k0, Eigen::Index n = 501, double h = 0.002);

    /// Piecewise-constant Kerr profile taking values {0,1,2,3,4}.
    static double epsilon_profile(double x);

    Eigen::Index dim() const override { return n_; }
    double spacing() const override { return h_; }

    /// One frozen-coefficient solve: assemble the complex tridiagonal system
    /// for the linearized equation at |u_k|^2 and solve for u_{k+1}. Robin
    /// boundaries close with second-order ghost points.
    Eigen::VectorXcd apply_G(const Eigen::VectorXcd& u) const override;

    /// u0(x) = e^{i k0 x}.
    Eigen::VectorXcd initial_iterate() const override;

    double wavenumber() const { return k0_; }
    const Eigen::VectorXd& epsilon_samples() const { return eps_; }

private:
    double k0_;
    Eigen::Index n_;
    double h_;
    Eigen::VectorXd eps_;
};

}  // namespace hsaa
