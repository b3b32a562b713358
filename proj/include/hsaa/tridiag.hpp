// Tridiagonal elimination with partial pivoting. The Helmholtz inner solves
// are complex and possibly indefinite, so the pivot-free recurrence is out.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "hsaa/errors.hpp"

namespace hsaa {

/// Solves the tridiagonal system with subdiagonal `lower` (length n-1),
/// diagonal `diag` (length n), superdiagonal `upper` (length n-1).
/// Row elimination with partial pivoting; throws SingularSystem.
template <typename Scalar>
Eigen::VectorX<Scalar> tridiag_solve(const Eigen::VectorX<Scalar>& lower,
                                     const Eigen::VectorX<Scalar>& diag,
                                     const Eigen::VectorX<Scalar>& upper,
                                     const Eigen::VectorX<Scalar>& rhs) {
    const Eigen::Index n = diag.size();
    if (n < 1) throw std::invalid_argument("tridiag_solve: empty system");
    if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n) {
        throw std::invalid_argument("tridiag_solve: inconsistent lengths");
    }

    // Pivoting between adjacent rows can introduce a second superdiagonal.
    Eigen::VectorX<Scalar> d = diag, u1(n), u2(n), b = rhs, l = lower;
    u1.setZero();
    u2.setZero();
    if (n > 1) u1.head(n - 1) = upper;

    for (Eigen::Index i = 0; i < n - 1; ++i) {
        if (std::abs(l[i]) > std::abs(d[i])) {
            std::swap(d[i], l[i]);
            std::swap(u1[i], d[i + 1]);
            std::swap(u2[i], u1[i + 1]);
            std::swap(b[i], b[i + 1]);
        }
        if (d[i] == Scalar(0)) throw SingularSystem("tridiag_solve: zero pivot");
        const Scalar m = l[i] / d[i];
        d[i + 1] -= m * u1[i];
        u1[i + 1] -= m * u2[i];
        b[i + 1] -= m * b[i];
    }
    if (d[n - 1] == Scalar(0)) throw SingularSystem("tridiag_solve: zero pivot");

    Eigen::VectorX<Scalar> x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Scalar s = b[i];
        if (i + 1 < n) s -= u1[i] * x[i + 1];
        if (i + 2 < n) s -= u2[i] * x[i + 2];
        x[i] = s / d[i];
    }
    return x;
}

/// Convenience alias for the complex instantiation.
inline Eigen::VectorXcd complex_tridiag_solve(const Eigen::VectorXcd& lower,
                                              const Eigen::VectorXcd& diag,
                                              const Eigen::VectorXcd& upper,
                                              const Eigen::VectorXcd& rhs) {
    return tridiag_solve<std::complex<double>>(lower, diag, upper, rhs);
}

}  // namespace hsaa
