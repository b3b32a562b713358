#include "hsaa/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hsaa/errors.hpp"

namespace hsaa {

double chebyshev_T(int m, double x) {
    if (m < 0) throw std::invalid_argument("chebyshev_T: degree must be >= 0");
    if (std::abs(x) <= 1.0) return std::cos(m * std::acos(x));
    const double t = std::cosh(m * std::acosh(std::abs(x)));
    return (x > 0.0 || m % 2 == 0) ? t : -t;
}

double bound_C(double a, double b, int m) {
    if (m < 0) throw std::invalid_argument("bound_C: degree must be >= 0");
    if (!(a < b)) throw std::invalid_argument("bound_C: need a < b");
    if (a <= 0.0 && b >= 0.0) throw std::invalid_argument("bound_C: interval must exclude 0");
    if (a <= 1.0 && b >= 1.0) throw std::invalid_argument("bound_C: interval must exclude 1");
    const double arg = (2.0 * a * b - a - b) / (b - a);
    return 1.0 / std::abs(chebyshev_T(m, arg));
}

SyntheticOperator realize_spectrum(const SpectrumSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("realize_spectrum: n must be >= 1");
    if (!(spec.a < spec.b)) throw std::invalid_argument("realize_spectrum: need a < b");
    if ((spec.a <= 0.0 && spec.b >= 0.0) || (spec.a <= 1.0 && spec.b >= 1.0)) {
        throw std::invalid_argument("realize_spectrum: interval must exclude 0 and 1");
    }

    SyntheticOperator op;
    op.eigenvalues.resize(spec.n);
    switch (spec.placement) {
        case EigenvaluePlacement::Equispaced:
            if (spec.n == 1) {
                op.eigenvalues[0] = 0.5 * (spec.a + spec.b);
            } else {
                for (Eigen::Index i = 0; i < spec.n; ++i) {
                    op.eigenvalues[i] =
                        spec.a + (spec.b - spec.a) * static_cast<double>(i) /
                                     static_cast<double>(spec.n - 1);
                }
            }
            break;
        case EigenvaluePlacement::ChebyshevPoints: {
            const double mid = 0.5 * (spec.a + spec.b);
            const double half = 0.5 * (spec.b - spec.a);
            for (Eigen::Index i = 0; i < spec.n; ++i) {
                op.eigenvalues[i] =
                    mid + half * std::cos(M_PI * (2.0 * static_cast<double>(i) + 1.0) /
                                          (2.0 * static_cast<double>(spec.n)));
            }
            std::sort(op.eigenvalues.begin(), op.eigenvalues.end());
            break;
        }
        case EigenvaluePlacement::SeededRandom: {
            std::mt19937_64 rng(spec.placement_seed);
            std::uniform_real_distribution<double> uni(spec.a, spec.b);
            for (Eigen::Index i = 0; i < spec.n; ++i) op.eigenvalues[i] = uni(rng);
            std::sort(op.eigenvalues.begin(), op.eigenvalues.end());
            break;
        }
    }

    op.basis = spec.basis_seed ? random_orthogonal(spec.n, *spec.basis_seed)
                               : Eigen::MatrixXd::Identity(spec.n, spec.n);
    op.initial_error = random_normal_vector(spec.n, spec.e0_seed);
    return op;
}

SyntheticLinearProblem::SyntheticLinearProblem(SyntheticOperator op) : op_(std::move(op)) {}

Eigen::VectorXd SyntheticLinearProblem::apply_G(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw std::invalid_argument("SyntheticLinearProblem: bad dimension");
    return op_.basis * op_.eigenvalues.cwiseProduct(op_.basis.transpose() * x);
}

Eigen::VectorXd predicted_one_step_error(const SyntheticOperator& op, int k, int m,
                                         const std::optional<Eigen::VectorXd>& sigma) {
    if (m < 1 || k < m) throw std::invalid_argument("predicted_one_step_error: need k >= m >= 1");
    const Eigen::Index n = op.eigenvalues.size();
    if (sigma && (sigma->size() != n || (sigma->array() <= 0.0).any())) {
        throw std::invalid_argument("predicted_one_step_error: sigma must be positive, size n");
    }

    const Eigen::ArrayXd lam = op.eigenvalues.array();
    const Eigen::VectorXd z = op.basis.transpose() * op.initial_error;

    // K_H = K_m(Lambda, H W^T e0) with H = (Lambda - I)^2 Lambda^{k-m};
    // columns are scaled to unit norm (projections are span-invariant).
    Eigen::ArrayXd hvec = (lam - 1.0).square();
    for (int p = 0; p < k - m; ++p) hvec *= lam;
    Eigen::MatrixXd krylov(n, m);
    krylov.col(0) = (hvec * z.array()).matrix();
    for (int j = 1; j < m; ++j) krylov.col(j) = (lam * krylov.col(j - 1).array()).matrix();
    for (int j = 0; j < m; ++j) {
        const double norm = krylov.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw DegenerateKrylov("predicted_one_step_error: vanishing Krylov column");
        }
        krylov.col(j) /= norm;
    }

    // u1 = D_mu^{-1} W^T A e_k = (Lambda - I) Lambda^k W^T e0
    Eigen::ArrayXd powk = Eigen::ArrayXd::Ones(n);
    for (int p = 0; p < k; ++p) powk *= lam;
    const Eigen::VectorXd u1 = ((lam - 1.0) * powk * z.array()).matrix();

    Eigen::MatrixXd lsq = krylov;
    Eigen::VectorXd target = u1;
    if (sigma) {
        lsq.array().colwise() *= sigma->array();
        target.array() *= sigma->array();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lsq);
    if (qr.rank() < m) {
        throw DegenerateKrylov("predicted_one_step_error: rank-deficient Krylov matrix");
    }
    const Eigen::VectorXd coeffs = qr.solve(target);
    const Eigen::VectorXd u2 = u1 - krylov * coeffs;

    return op.basis * ((lam / (lam - 1.0)) * u2.array()).matrix();
}

Eigen::VectorXd predicted_one_step_error(const SpectrumSpec& spec, int k, int m,
                                         const std::optional<Eigen::VectorXd>& sigma) {
    return predicted_one_step_error(realize_spectrum(spec), k, m, sigma);
}

std::vector<BoundReport> verify_one_step_bound(const SpectrumSpec& spec, int k, int m, int trials,
                                               const std::optional<Eigen::VectorXd>& sigma) {
    if (trials < 1) throw std::invalid_argument("verify_one_step_bound: trials must be >= 1");
    const double bound = bound_C(spec.a, spec.b, m);

    std::vector<BoundReport> reports;
    reports.reserve(static_cast<size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        SpectrumSpec trial = spec;
        trial.e0_seed = spec.e0_seed + static_cast<std::uint64_t>(t);
        if (trial.basis_seed) *trial.basis_seed += static_cast<std::uint64_t>(t);
        trial.placement_seed = spec.placement_seed + static_cast<std::uint64_t>(t);
        const SyntheticOperator op = realize_spectrum(trial);

        const Eigen::ArrayXd lam = op.eigenvalues.array();
        const Eigen::VectorXd z = op.basis.transpose() * op.initial_error;
        Eigen::ArrayXd powk = Eigen::ArrayXd::Ones(spec.n);
        for (int p = 0; p < k; ++p) powk *= lam;
        const double rhs_norm = (((lam - 1.0) * powk * z.array()).matrix()).norm();

        const Eigen::VectorXd e_next = predicted_one_step_error(op, k, m, sigma);
        Eigen::VectorXd lhs = (((lam - 1.0) / lam) *
                               (op.basis.transpose() * e_next).array()).matrix();
        double lhs_norm;
        if (sigma) {
            lhs_norm = (sigma->array() * lhs.array()).matrix().norm() / sigma->maxCoeff();
        } else {
            lhs_norm = lhs.norm();
        }

        BoundReport report;
        report.trial = trial.e0_seed;
        report.ratio = lhs_norm / rhs_norm;
        report.bound = bound;
        report.pass = report.ratio <= bound * (1.0 + 1e-10);
        reports.push_back(report);
    }
    return reports;
}

double waveholtz_beta(double lambda, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("waveholtz_beta: omega must be positive");
    if (lambda < 0.0) throw std::invalid_argument("waveholtz_beta: lambda must be >= 0");
    if (lambda == 0.0) return -0.5;
    if (lambda == omega) return 1.0;
    const double period = 2.0 * M_PI / omega;
    const double diff = omega - lambda;
    const double sum = omega + lambda;
    const double cross =
        0.5 * (std::sin(diff * period) / diff + std::sin(sum * period) / sum);
    const double mean = 0.25 * std::sin(lambda * period) / lambda;
    return (2.0 / period) * (cross - mean);
}

}  // namespace hsaa
