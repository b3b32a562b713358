// Krylov matrices, seeded orthogonal matrices, and synthetic spectral
// operators A = W diag(lambda) W^T for the one-step convergence harness.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace hsaa {

/// Columns b, Ab, ..., A^{m-1} b.
template <typename ApplyA>
Eigen::MatrixXd krylov_matrix(ApplyA&& apply, const Eigen::VectorXd& b, int m) {
    if (m < 1) throw std::invalid_argument("krylov_matrix: m must be >= 1");
    Eigen::MatrixXd k(b.size(), m);
    k.col(0) = b;
    for (int j = 1; j < m; ++j) k.col(j) = apply(k.col(j - 1));
    return k;
}

/// Deterministic random orthogonal matrix: seeded standard-normal entries
/// orthonormalized by modified Gram-Schmidt.
Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed);

/// Seeded standard-normal vector (shared by the theory harness and tests).
Eigen::VectorXd random_normal_vector(Eigen::Index n, std::uint64_t seed);

/// A = W diag(lambda) W^T with orthogonal W.
struct SpectralOperator {
    Eigen::MatrixXd basis;        // W
    Eigen::VectorXd eigenvalues;  // lambda

    Eigen::Index order() const { return eigenvalues.size(); }
};

Eigen::VectorXd spectral_apply(const SpectralOperator& op, const Eigen::VectorXd& v);

}  // namespace hsaa
