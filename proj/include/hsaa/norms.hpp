// Discrete H^{-s} weight operators and the weighted inner products behind the
// Anderson least-squares step. The squared weight P^2 = W_s^{-1} is applied
// through band solves; no matrix square root is ever formed.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>

#include "hsaa/band.hpp"
#include "hsaa/detail/extended.hpp"

namespace hsaa {

using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using VectorXcld = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;

/// Sobolev order of the distance used in the least-squares step.
/// s = 0 is the plain L^2 metric, s = 1 is H^{-1}, s = 2 is H^{-2}, ...
struct NormKind {
    int s = 0;
};

/// Interface for the weighted metric <u,v> = scale * u^* P^2 v with a real
/// symmetric positive definite P^2. Real weights act on complex data
/// componentwise (independently on real and imaginary parts).
///
/// P^2 applications feed the Gram systems of the least-squares step, whose
/// conditioning squares that of the window; they are exposed in extended
/// precision so inner products can be accumulated without an intermediate
/// rounding.
class Weighting {
public:
    virtual ~Weighting() = default;

    virtual Eigen::Index dim() const = 0;
    virtual double scale() const { return 1.0; }
    virtual Eigen::VectorXd apply_psq(const Eigen::VectorXd& v) const {
        return apply_psq_extended(v).cast<double>();
    }
    virtual VectorXld apply_psq_extended(const Eigen::VectorXd& v) const = 0;

    Eigen::VectorXcd apply_psq(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(v.size());
        out.real() = apply_psq(Eigen::VectorXd(v.real()));
        out.imag() = apply_psq(Eigen::VectorXd(v.imag()));
        return out;
    }

    VectorXcld apply_psq_extended(const Eigen::VectorXcd& v) const {
        const VectorXld re = apply_psq_extended(Eigen::VectorXd(v.real()));
        const VectorXld im = apply_psq_extended(Eigen::VectorXd(v.imag()));
        VectorXcld out(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = {re[i], im[i]};
        return out;
    }

    /// <u,v>; conjugate-linear in the first argument for complex scalars.
    template <typename Scalar>
    Scalar inner(const Eigen::VectorX<Scalar>& u, const Eigen::VectorX<Scalar>& v) const {
        if (u.size() != dim() || v.size() != dim()) {
            throw std::invalid_argument("Weighting::inner: dimension mismatch");
        }
        const auto pv = apply_psq_extended(v);
        return static_cast<Scalar>(detail::promoted_t<Scalar>(scale()) *
                                   detail::dot_ext<Scalar>(u, pv));
    }

    template <typename Scalar>
    double norm(const Eigen::VectorX<Scalar>& u) const {
        const auto q = inner<Scalar>(u, u);
        return std::sqrt(std::max(0.0, static_cast<double>(std::real(std::complex<double>(q)))));
    }
};

/// W_s = sum_{r=0}^{s} (-K_n)^r factorized once; bandwidth of W_s equals s.
class WeightOperator final : public Weighting {
public:
    WeightOperator(NormKind kind, Eigen::Index n, double h);

    NormKind kind() const { return kind_; }
    double spacing() const { return h_; }
    const SymmetricBandMatrix& matrix() const { return w_; }

    Eigen::Index dim() const override { return w_.order(); }
    double scale() const override { return h_; }
    Eigen::VectorXd apply_psq(const Eigen::VectorXd& v) const override {
        return factor_.solve<double>(v);
    }
    VectorXld apply_psq_extended(const Eigen::VectorXd& v) const override {
        return factor_.solve_extended<double>(v);
    }

private:
    NormKind kind_;
    double h_;
    SymmetricBandMatrix w_;
    BandFactor factor_;
};

/// P = W diag(sigma) W^T for the commuting-weight theory checks.
class SpectralWeight final : public Weighting {
public:
    SpectralWeight(Eigen::MatrixXd basis, Eigen::VectorXd sigma);

    Eigen::Index dim() const override { return n_; }
    VectorXld apply_psq_extended(const Eigen::VectorXd& v) const override;

private:
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> basis_;
    VectorXld sigma_sq_;
    Eigen::Index n_;
};

WeightOperator build_weight(NormKind kind, Eigen::Index n, double h);

template <typename Scalar>
Scalar weighted_inner(const Weighting& wop, const Eigen::VectorX<Scalar>& u,
                      const Eigen::VectorX<Scalar>& v) {
    return wop.inner<Scalar>(u, v);
}

template <typename Scalar>
double weighted_norm(const Weighting& wop, const Eigen::VectorX<Scalar>& u) {
    return wop.norm<Scalar>(u);
}

/// Gram system of a column set against the weighted metric:
/// G_ij = <d_i, d_j>, g_i = <d_i, f>. G is Hermitian positive semidefinite.
template <typename Scalar>
std::pair<Eigen::MatrixX<Scalar>, Eigen::VectorX<Scalar>> gram_system(
    const Weighting& wop, const Eigen::MatrixX<Scalar>& cols, const Eigen::VectorX<Scalar>& f) {
    using P = detail::promoted_t<Scalar>;
    const Eigen::Index m = cols.cols();
    if (m < 1) throw std::invalid_argument("gram_system: need at least one column");
    if (cols.rows() != wop.dim() || f.size() != wop.dim()) {
        throw std::invalid_argument("gram_system: dimension mismatch");
    }
    std::vector<Eigen::Matrix<P, Eigen::Dynamic, 1>> z;
    z.reserve(static_cast<size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        z.push_back(wop.apply_psq_extended(Eigen::VectorX<Scalar>(cols.col(j))));
    }
    Eigen::MatrixX<Scalar> gram(m, m);
    Eigen::VectorX<Scalar> rhs(m);
    const P h(wop.scale());
    for (Eigen::Index i = 0; i < m; ++i) {
        // conj(z_i) . f = d_i^* P^2 f since P^2 is real symmetric
        P g(0);
        for (Eigen::Index r = 0; r < f.size(); ++r) {
            g += detail::conj_value(z[static_cast<size_t>(i)][r]) * P(f[r]);
        }
        rhs[i] = static_cast<Scalar>(h * g);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::VectorX<Scalar> di = cols.col(i);
            gram(i, j) = static_cast<Scalar>(
                h * detail::dot_ext<Scalar>(di, z[static_cast<size_t>(j)]));
        }
    }
    return {gram, rhs};
}

}  // namespace hsaa
