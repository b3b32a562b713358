#include "hsaa/norms.hpp"

namespace hsaa {

namespace {

SymmetricBandMatrix assemble_weight_matrix(int s, Eigen::Index n, double h) {
    if (s < 0) throw std::invalid_argument("build_weight: Sobolev order must be >= 0");
    if (n < 2) throw std::invalid_argument("build_weight: n must be >= 2");
    if (!(h > 0)) throw std::invalid_argument("build_weight: h must be positive");
    SymmetricBandMatrix w = band_identity(n);
    if (s == 0) return w;
    const SymmetricBandMatrix minus_k = band_scale(laplacian_neumann(n, h), -1.0);
    SymmetricBandMatrix power = minus_k;
    w = band_add(w, power);
    for (int r = 2; r <= s; ++r) {
        power = sym_band_product(power, minus_k);
        w = band_add(w, power);
    }
    return w;
}

}  // namespace

WeightOperator::WeightOperator(NormKind kind, Eigen::Index n, double h)
    : kind_(kind), h_(h), w_(assemble_weight_matrix(kind.s, n, h)), factor_(spd_band_factor(w_)) {}

WeightOperator build_weight(NormKind kind, Eigen::Index n, double h) {
    return WeightOperator(kind, n, h);
}

SpectralWeight::SpectralWeight(Eigen::MatrixXd basis, Eigen::VectorXd sigma) {
    if (basis.rows() != sigma.size() || basis.cols() != sigma.size()) {
        throw std::invalid_argument("SpectralWeight: dimension mismatch");
    }
    if ((sigma.array() <= 0.0).any()) {
        throw std::invalid_argument("SpectralWeight: sigma must be positive");
    }
    n_ = sigma.size();
    basis_ = basis.cast<long double>();
    sigma_sq_ = sigma.cast<long double>().array().square();
}

VectorXld SpectralWeight::apply_psq_extended(const Eigen::VectorXd& v) const {
    VectorXld coeffs = basis_.transpose() * v.cast<long double>();
    coeffs.array() *= sigma_sq_.array();
    return basis_ * coeffs;
}

}  // namespace hsaa
