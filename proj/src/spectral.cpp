#include "hsaa/spectral.hpp"

#include <random>

namespace hsaa {

Eigen::VectorXd random_normal_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_orthogonal: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) = gauss(rng);

    // Modified Gram-Schmidt with one reorthogonalization pass.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < j; ++i) {
                w.col(j) -= w.col(i).dot(w.col(j)) * w.col(i);
            }
        }
        const double norm = w.col(j).norm();
        if (!(norm > 1e-12)) {
            throw std::runtime_error("random_orthogonal: rank-deficient draw");
        }
        w.col(j) /= norm;
    }
    return w;
}

Eigen::VectorXd spectral_apply(const SpectralOperator& op, const Eigen::VectorXd& v) {
    if (v.size() != op.order()) throw std::invalid_argument("spectral_apply: dimension mismatch");
    return op.basis * op.eigenvalues.cwiseProduct(op.basis.transpose() * v);
}

}  // namespace hsaa
