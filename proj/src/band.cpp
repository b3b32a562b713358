#include "hsaa/band.hpp"

#include <cmath>

namespace hsaa {

SymmetricBandMatrix::SymmetricBandMatrix(Eigen::Index n, int bw) : n_(n), bw_(bw) {
    if (n < 1) throw std::invalid_argument("SymmetricBandMatrix: order must be >= 1");
    if (bw < 0) throw std::invalid_argument("SymmetricBandMatrix: bandwidth must be >= 0");
    bands_.reserve(static_cast<size_t>(bw) + 1);
    for (int d = 0; d <= bw; ++d) {
        bands_.push_back(Eigen::VectorXd::Zero(std::max<Eigen::Index>(n - d, 0)));
    }
}

double& SymmetricBandMatrix::at(Eigen::Index i, Eigen::Index j) {
    const Eigen::Index d = i - j;
    if (d < 0 || d > bw_) throw std::invalid_argument("SymmetricBandMatrix::at: outside band");
    return bands_[static_cast<size_t>(d)][j];
}

double SymmetricBandMatrix::coeff(Eigen::Index i, Eigen::Index j) const {
    Eigen::Index lo = std::min(i, j), hi = std::max(i, j);
    const Eigen::Index d = hi - lo;
    if (d > bw_) return 0.0;
    return bands_[static_cast<size_t>(d)][lo];
}

Eigen::MatrixXd SymmetricBandMatrix::to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - bw_); j <= i; ++j) {
            out(i, j) = coeff(i, j);
            out(j, i) = out(i, j);
        }
    return out;
}

SymmetricBandMatrix laplacian_neumann(Eigen::Index n, double h) {
    if (n < 2) throw std::invalid_argument("laplacian_neumann: n must be >= 2");
    if (!(h > 0)) throw std::invalid_argument("laplacian_neumann: h must be positive");
    SymmetricBandMatrix k(n, 1);
    const double s = 1.0 / (h * h);
    k.band(0).setConstant(-2.0 * s);
    k.band(0)[0] = -s;
    k.band(0)[n - 1] = -s;
    k.band(1).setConstant(s);
    return k;
}

SymmetricBandMatrix laplacian_dirichlet(Eigen::Index n, double h) {
    if (n < 1) throw std::invalid_argument("laplacian_dirichlet: n must be >= 1");
    if (!(h > 0)) throw std::invalid_argument("laplacian_dirichlet: h must be positive");
    SymmetricBandMatrix m(n, 1);
    const double s = 1.0 / (h * h);
    m.band(0).setConstant(-2.0 * s);
    if (n > 1) m.band(1).setConstant(s);
    return m;
}

SymmetricBandMatrix band_identity(Eigen::Index n) {
    SymmetricBandMatrix eye(n, 0);
    eye.band(0).setOnes();
    return eye;
}

SymmetricBandMatrix band_scale(const SymmetricBandMatrix& mat, double factor) {
    SymmetricBandMatrix out = mat;
    for (int d = 0; d <= out.bandwidth(); ++d) out.band(d) *= factor;
    return out;
}

SymmetricBandMatrix band_add(const SymmetricBandMatrix& a, const SymmetricBandMatrix& b) {
    if (a.order() != b.order()) throw std::invalid_argument("band_add: order mismatch");
    const int bw = std::max(a.bandwidth(), b.bandwidth());
    SymmetricBandMatrix out(a.order(), bw);
    for (int d = 0; d <= bw; ++d) {
        if (d <= a.bandwidth()) out.band(d) += a.band(d);
        if (d <= b.bandwidth()) out.band(d) += b.band(d);
    }
    return out;
}

SymmetricBandMatrix sym_band_product(const SymmetricBandMatrix& a, const SymmetricBandMatrix& b) {
    if (a.order() != b.order()) throw std::invalid_argument("sym_band_product: order mismatch");
    const Eigen::Index n = a.order();
    const int bw = std::min<Eigen::Index>(a.bandwidth() + b.bandwidth(), n - 1);
    SymmetricBandMatrix out(n, bw);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index imax = std::min<Eigen::Index>(n - 1, j + bw);
        for (Eigen::Index i = j; i <= imax; ++i) {
            const Eigen::Index klo =
                std::max<Eigen::Index>({0, i - a.bandwidth(), j - b.bandwidth()});
            const Eigen::Index khi =
                std::min<Eigen::Index>({n - 1, i + a.bandwidth(), j + b.bandwidth()});
            double s = 0.0;
            for (Eigen::Index k = klo; k <= khi; ++k) s += a.coeff(i, k) * b.coeff(k, j);
            out.at(i, j) = s;
        }
    }
    return out;
}

BandFactor spd_band_factor(const SymmetricBandMatrix& mat) {
    using Real = BandFactor::Real;
    const Eigen::Index n = mat.order();
    const int bw = mat.bandwidth();
    BandFactor f;
    f.n_ = n;
    f.bw_ = bw;
    f.bands_.resize(static_cast<size_t>(bw) + 1);
    for (int d = 0; d <= bw; ++d) {
        f.bands_[static_cast<size_t>(d)] = mat.band(d).cast<Real>();
    }
    auto& L = f.bands_;
    for (Eigen::Index j = 0; j < n; ++j) {
        Real diag = L[0][j];
        const int tmax = static_cast<int>(std::min<Eigen::Index>(bw, j));
        for (int t = 1; t <= tmax; ++t) {
            const Real l = L[static_cast<size_t>(t)][j - t];
            diag -= l * l;
        }
        if (!(diag > 0.0L) || !std::isfinite(static_cast<double>(diag))) {
            throw NotPositiveDefinite("spd_band_factor: nonpositive pivot at column " +
                                      std::to_string(j));
        }
        const Real pivot = std::sqrt(diag);
        L[0][j] = pivot;
        const int dmax = static_cast<int>(std::min<Eigen::Index>(bw, n - 1 - j));
        for (int d = 1; d <= dmax; ++d) {
            Real v = L[static_cast<size_t>(d)][j];
            // L(j+d, j-t) exists only while d + t <= bw
            const int smax = static_cast<int>(std::min<Eigen::Index>(bw - d, j));
            for (int t = 1; t <= smax; ++t) {
                v -= L[static_cast<size_t>(d + t)][j - t] * L[static_cast<size_t>(t)][j - t];
            }
            L[static_cast<size_t>(d)][j] = v / pivot;
        }
    }
    return f;
}

Eigen::VectorXd spd_band_solve(const BandFactor& factor, const Eigen::VectorXd& rhs) {
    return factor.solve<double>(rhs);
}

}  // namespace hsaa
