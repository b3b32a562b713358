// 1D Poisson fixed-point maps on the Dirichlet finite-difference system
// M x = b: weighted Jacobi (contractive) and Richardson with step h^2
// (noncontractive; equivalently unit-step Richardson on the h^2-scaled
// second-difference system).
#pragma once

#include <Eigen/Dense>

#include "hsaa/band.hpp"
#include "hsaa/fixed_point.hpp"

namespace hsaa {

enum class PoissonVariant { WeightedJacobi, Richardson };

class PoissonProblem final : public FixedPointProblem<double> {
public:
    /// n interior points on (0,1), h = 1/(n+1); b holds samples of f at x_j = j h.
    PoissonProblem(PoissonVariant variant, Eigen::Index n, Eigen::VectorXd forcing_samples);

    /// Forcing f(x) = pi^2 sin(pi x), whose continuum solution is sin(pi x).
    static PoissonProblem with_default_forcing(PoissonVariant variant, Eigen::Index n = 63);

    /// The experiment's initial error: e0_j = sum_{i=1}^{20} sin(2 pi i x_j).
    static Eigen::VectorXd initial_error(Eigen::Index n);

    Eigen::Index dim() const override { return n_; }
    double spacing() const override { return h_; }
    Eigen::VectorXd apply_G(const Eigen::VectorXd& x) const override;
    bool is_linear() const override { return true; }
    std::optional<Eigen::VectorXd> exact_solution() const override { return solution_; }
    Eigen::VectorXd initial_iterate() const override { return solution_ + initial_error(n_); }

    PoissonVariant variant() const { return variant_; }
    const SymmetricBandMatrix& matrix() const { return m_; }
    const Eigen::VectorXd& forcing() const { return b_; }

    /// Closed-form eigenvalues of the weighted-Jacobi iteration matrix,
    /// lambda_j = 1/3 + (2/3) cos(j pi / (n+1)), j = 1..n.
    static double jacobi_eigenvalue(Eigen::Index j, Eigen::Index n);

private:
    PoissonVariant variant_;
    Eigen::Index n_;
    double h_;
    SymmetricBandMatrix m_;
    Eigen::VectorXd b_;
    Eigen::VectorXd solution_;
};

}  // namespace hsaa
