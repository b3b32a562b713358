#include "hsaa/problems/nonlinear_helmholtz.hpp"

#include <cmath>

#include "hsaa/tridiag.hpp"

namespace hsaa {

using std::complex;

NonlinearHelmholtzProblem::NonlinearHelmholtzProblem(double k0, Eigen::Index n, double h)
    : k0_(k0), n_(n), h_(h) {
    if (!(k0 > 0.0)) throw std::invalid_argument("NonlinearHelmholtzProblem: k0 must be positive");
    if (n < 3) throw std::invalid_argument("NonlinearHelmholtzProblem: n must be >= 3");
    if (!(h > 0.0)) throw std::invalid_argument("NonlinearHelmholtzProblem: h must be positive");
    eps_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) eps_[j] = epsilon_profile(static_cast<double>(j) * h);
}

double NonlinearHelmholtzProblem::epsilon_profile(double x) {
    if (x <= 0.1) return 0.0;
    if (x <= 0.2) return 1.0;
    if (x <= 0.3) return 2.0;
    if (x <= 0.7) return 3.0;
    return 4.0;
}

Eigen::VectorXcd NonlinearHelmholtzProblem::initial_iterate() const {
    Eigen::VectorXcd u0(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
        const double x = static_cast<double>(j) * h_;
        u0[j] = std::polar(1.0, k0_ * x);
    }
    return u0;
}

Eigen::VectorXcd NonlinearHelmholtzProblem::apply_G(const Eigen::VectorXcd& u) const {
    if (u.size() != n_) throw std::invalid_argument("NonlinearHelmholtzProblem: bad dimension");

    // Rows are scaled by h^2: u_{j-1} + (-2 + h^2 c_j) u_j + u_{j+1} = 0 with
    // c_j = k0^2 (1 + eps_j |u_j|^2); the ghost-point eliminations at the two
    // Robin ends double the inner off-diagonal and shift the diagonal by
    // 2 i k0 h. Only the left boundary is forced (incoming wave of amplitude 2).
    Eigen::VectorXcd lower(n_ - 1), diag(n_), upper(n_ - 1);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n_);

    const complex<double> robin(0.0, 2.0 * k0_ * h_);
    for (Eigen::Index j = 0; j < n_; ++j) {
        const double cj = k0_ * k0_ * (1.0 + eps_[j] * std::norm(u[j]));
        diag[j] = complex<double>(-2.0 + h_ * h_ * cj, 0.0);
    }
    diag[0] += robin;
    diag[n_ - 1] += robin;
    for (Eigen::Index j = 0; j + 1 < n_; ++j) {
        lower[j] = 1.0;
        upper[j] = 1.0;
    }
    upper[0] = 2.0;
    lower[n_ - 2] = 2.0;
    rhs[0] = complex<double>(0.0, 4.0 * k0_ * h_);

    return tridiag_solve<complex<double>>(lower, diag, upper, rhs);
}

}  // namespace hsaa
