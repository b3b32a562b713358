#include "hsaa/problems/poisson.hpp"

#include <cmath>

namespace hsaa {

PoissonProblem::PoissonProblem(PoissonVariant variant, Eigen::Index n,
                               Eigen::VectorXd forcing_samples)
    : variant_(variant),
      n_(n),
      h_(1.0 / static_cast<double>(n + 1)),
      m_(laplacian_dirichlet(n, 1.0 / static_cast<double>(n + 1))),
      b_(std::move(forcing_samples)) {
    if (n < 2) throw std::invalid_argument("PoissonProblem: n must be >= 2");
    if (b_.size() != n_) throw std::invalid_argument("PoissonProblem: forcing length mismatch");
    // M is negative definite; factor -M and flip the sign of b.
    const BandFactor factor = spd_band_factor(band_scale(m_, -1.0));
    solution_ = factor.solve<double>(Eigen::VectorXd(-b_));
}

PoissonProblem PoissonProblem::with_default_forcing(PoissonVariant variant, Eigen::Index n) {
    const double h = 1.0 / static_cast<double>(n + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double x = static_cast<double>(j + 1) * h;
        b[j] = M_PI * M_PI * std::sin(M_PI * x);
    }
    return PoissonProblem(variant, n, std::move(b));
}

Eigen::VectorXd PoissonProblem::initial_error(Eigen::Index n) {
    const double h = 1.0 / static_cast<double>(n + 1);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double x = static_cast<double>(j + 1) * h;
        for (int i = 1; i <= 20; ++i) e0[j] += std::sin(2.0 * M_PI * i * x);
    }
    return e0;
}

Eigen::VectorXd PoissonProblem::apply_G(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("PoissonProblem: dimension mismatch");
    const Eigen::VectorXd residual = m_.multiply<double>(x) - b_;
    if (variant_ == PoissonVariant::WeightedJacobi) {
        // G = (I - (2/3) D_M^{-1} M) x + (2/3) D_M^{-1} b with D_M = -(2/h^2) I
        return x + (h_ * h_ / 3.0) * residual;
    }
    // Richardson with step h^2, i.e. unit-step Richardson on the h^2-scaled
    // system tridiag(1,-2,1) u = h^2 f. The iteration matrix I - h^2 M has
    // eigenvalues 3 - 2 cos(j pi/(n+1)) in (1, 5): noncontractive, and the
    // window sizes used in the experiments keep the divergent modes visible.
    return x - (h_ * h_) * residual;
}

double PoissonProblem::jacobi_eigenvalue(Eigen::Index j, Eigen::Index n) {
    return 1.0 / 3.0 +
           (2.0 / 3.0) * std::cos(static_cast<double>(j) * M_PI / static_cast<double>(n + 1));
}

}  // namespace hsaa
