// Symmetric banded matrices, banded Cholesky solves, and the finite-difference
// Laplacians used to assemble the H^{-s} weight operators and test problems.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hsaa/errors.hpp"

namespace hsaa {

/// Symmetric band matrix of order n with half-bandwidth bw.
/// Only the lower bands are stored: bands[d][i] = A(i+d, i) for d = 0..bw.
class SymmetricBandMatrix {
public:
    SymmetricBandMatrix(Eigen::Index n, int bw);

    Eigen::Index order() const { return n_; }
    int bandwidth() const { return bw_; }

    double& at(Eigen::Index i, Eigen::Index j);        // requires j <= i <= j + bw
    double coeff(Eigen::Index i, Eigen::Index j) const;  // 0 outside the band

    Eigen::VectorXd& band(int d) { return bands_[static_cast<size_t>(d)]; }
    const Eigen::VectorXd& band(int d) const { return bands_[static_cast<size_t>(d)]; }

    /// y = A x for real or complex x.
    template <typename Scalar>
    Eigen::VectorX<Scalar> multiply(const Eigen::VectorX<Scalar>& x) const;

    Eigen::MatrixXd to_dense() const;

private:
    Eigen::Index n_;
    int bw_;
    std::vector<Eigen::VectorXd> bands_;
};

/// Lower Cholesky factor of an SPD band matrix, same storage layout. The
/// factor is held and applied in extended precision: the weight matrices
/// W_s reach condition numbers near 1/eps_double for moderate n, and the
/// inner products built on these solves feed the Gram systems.
class BandFactor {
public:
    using Real = long double;
    using BandColumn = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

    Eigen::Index order() const { return n_; }
    int bandwidth() const { return bw_; }

    /// Solves L L^T y = rhs. A real factor applies to complex right-hand
    /// sides componentwise, which is what the complex-iterate norms need.
    template <typename Scalar>
    Eigen::VectorX<Scalar> solve(const Eigen::VectorX<Scalar>& rhs) const;

    /// Same solve without the final rounding back to the input precision.
    template <typename Scalar>
    auto solve_extended(const Eigen::VectorX<Scalar>& rhs) const;

private:
    friend BandFactor spd_band_factor(const SymmetricBandMatrix& mat);
    Eigen::Index n_ = 0;
    int bw_ = 0;
    std::vector<BandColumn> bands_;
};

/// Neumann Laplacian K_n (half-sample boundary closure): tridiagonal with
/// diagonal (-1,-2,...,-2,-1)/h^2 and off-diagonals 1/h^2. Rows sum to zero.
SymmetricBandMatrix laplacian_neumann(Eigen::Index n, double h);

/// Dirichlet Laplacian M: tridiagonal with constant diagonal -2/h^2 and
/// off-diagonals 1/h^2.
SymmetricBandMatrix laplacian_dirichlet(Eigen::Index n, double h);

SymmetricBandMatrix band_identity(Eigen::Index n);
SymmetricBandMatrix band_scale(const SymmetricBandMatrix& mat, double factor);

/// Sum of two symmetric band matrices (result bandwidth = max of the two).
SymmetricBandMatrix band_add(const SymmetricBandMatrix& a, const SymmetricBandMatrix& b);

/// Product of two commuting symmetric band matrices; only valid when the
/// algebraic product is itself symmetric (e.g. powers of one matrix).
SymmetricBandMatrix sym_band_product(const SymmetricBandMatrix& a, const SymmetricBandMatrix& b);

/// Cholesky factorization without pivoting; throws NotPositiveDefinite.
BandFactor spd_band_factor(const SymmetricBandMatrix& mat);

/// Convenience: solve B y = rhs through a fresh factorization of B.
Eigen::VectorXd spd_band_solve(const BandFactor& factor, const Eigen::VectorXd& rhs);

// --- template implementations ---

template <typename Scalar>
Eigen::VectorX<Scalar> SymmetricBandMatrix::multiply(const Eigen::VectorX<Scalar>& x) const {
    Eigen::VectorX<Scalar> y = Eigen::VectorX<Scalar>::Zero(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
        y[j] += bands_[0][j] * x[j];
        const int dmax = static_cast<int>(std::min<Eigen::Index>(bw_, n_ - 1 - j));
        for (int d = 1; d <= dmax; ++d) {
            y[j + d] += bands_[static_cast<size_t>(d)][j] * x[j];
            y[j] += bands_[static_cast<size_t>(d)][j] * x[j + d];
        }
    }
    return y;
}

template <typename Scalar>
auto BandFactor::solve_extended(const Eigen::VectorX<Scalar>& rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("BandFactor::solve: dimension mismatch");
    using Promoted = std::conditional_t<std::is_arithmetic_v<Scalar>, Real, std::complex<Real>>;
    Eigen::Matrix<Promoted, Eigen::Dynamic, 1> y(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        Promoted s = Promoted(rhs[i]);
        const int tmax = static_cast<int>(std::min<Eigen::Index>(bw_, i));
        for (int t = 1; t <= tmax; ++t) s -= bands_[static_cast<size_t>(t)][i - t] * y[i - t];
        y[i] = s / bands_[0][i];
    }
    for (Eigen::Index i = n_ - 1; i >= 0; --i) {
        Promoted s = y[i];
        const int tmax = static_cast<int>(std::min<Eigen::Index>(bw_, n_ - 1 - i));
        for (int t = 1; t <= tmax; ++t) s -= bands_[static_cast<size_t>(t)][i] * y[i + t];
        y[i] = s / bands_[0][i];
    }
    return y;
}

template <typename Scalar>
Eigen::VectorX<Scalar> BandFactor::solve(const Eigen::VectorX<Scalar>& rhs) const {
    const auto y = solve_extended<Scalar>(rhs);
    Eigen::VectorX<Scalar> out(n_);
    for (Eigen::Index i = 0; i < n_; ++i) out[i] = static_cast<Scalar>(y[i]);
    return out;
}

}  // namespace hsaa
