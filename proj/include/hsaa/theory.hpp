// Closed-form machinery of the one-step convergence analysis: the Chebyshev
// improvement bound C(a,b,m), the projection formulas predicting the error
// after one Anderson step on a symmetric linear map, the bound-verification
// harness, and the WaveHoltz filter transfer function.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "hsaa/fixed_point.hpp"
#include "hsaa/spectral.hpp"

namespace hsaa {

/// T_m(x) via the cosine form on [-1,1] and the cosh form outside.
double chebyshev_T(int m, double x);

/// One-step improvement bound C(a,b,m) = |T_m((2ab-a-b)/(b-a))|^{-1} for a
/// spectrum inside [a,b] with 0,1 outside the interval. Nonincreasing in m.
double bound_C(double a, double b, int m);

enum class EigenvaluePlacement { Equispaced, ChebyshevPoints, SeededRandom };

/// Recipe for a synthetic symmetric operator A = W diag(lambda) W^T together
/// with an initial error vector.
struct SpectrumSpec {
    Eigen::Index n = 16;
    double a = 0.3;
    double b = 0.9;
    EigenvaluePlacement placement = EigenvaluePlacement::Equispaced;
    std::optional<std::uint64_t> basis_seed;  // nullopt -> W = I
    std::uint64_t placement_seed = 0;         // used by SeededRandom placement
    std::uint64_t e0_seed = 1;
};

struct SyntheticOperator {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd basis;
    Eigen::VectorXd initial_error;
};

SyntheticOperator realize_spectrum(const SpectrumSpec& spec);

/// Fixed-point map G(x) = A x with A = W diag(lambda) W^T; the fixed point is
/// the origin, so iterates coincide with errors.
class SyntheticLinearProblem final : public FixedPointProblem<double> {
public:
    explicit SyntheticLinearProblem(SyntheticOperator op);

    Eigen::Index dim() const override { return op_.eigenvalues.size(); }
    double spacing() const override { return 1.0; }
    Eigen::VectorXd apply_G(const Eigen::VectorXd& x) const override;
    bool is_linear() const override { return true; }
    std::optional<Eigen::VectorXd> exact_solution() const override {
        return Eigen::VectorXd::Zero(dim());
    }
    Eigen::VectorXd initial_iterate() const override { return op_.initial_error; }

    const SyntheticOperator& op() const { return op_; }

private:
    SyntheticOperator op_;
};

/// Error after k Picard iterations and one Anderson step with memory m,
/// evaluated from the closed-form projection (no iteration is run). With
/// sigma absent this is the unweighted formula; with sigma present the weight
/// is P = W diag(sigma) W^T, which commutes with A by construction.
Eigen::VectorXd predicted_one_step_error(const SyntheticOperator& op, int k, int m,
                                         const std::optional<Eigen::VectorXd>& sigma = {});
Eigen::VectorXd predicted_one_step_error(const SpectrumSpec& spec, int k, int m,
                                         const std::optional<Eigen::VectorXd>& sigma = {});

struct BoundReport {
    std::uint64_t trial = 0;
    double ratio = 0.0;  // measured one-step improvement in the D_mu^{-1} coordinates
    double bound = 0.0;  // C(a,b,m)
    bool pass = false;   // ratio <= bound * (1 + 1e-10)
};

/// Seeded trials of the one-step bound; each trial draws a fresh basis and
/// initial error from offset seeds. With sigma the weighted inequality
/// (left side divided by max sigma) is checked instead.
std::vector<BoundReport> verify_one_step_bound(const SpectrumSpec& spec, int k, int m, int trials,
                                               const std::optional<Eigen::VectorXd>& sigma = {});

/// WaveHoltz filter transfer function
/// beta(lambda) = (2/T) \int_0^T (cos(omega t) - 1/4) cos(lambda t) dt,
/// T = 2 pi / omega, with the limits at lambda = 0 and lambda = omega taken
/// exactly. lambda is a frequency (square root of an operator eigenvalue).
double waveholtz_beta(double lambda, double omega);

}  // namespace hsaa
