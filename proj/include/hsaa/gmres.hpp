// Restarted GMRES on the affine system (I - A) x = b hiding behind a linear
// fixed-point map, used as the comparison baseline for the WaveHoltz runs.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsaa/fixed_point.hpp"
#include "hsaa/norms.hpp"
#include "hsaa/record.hpp"

namespace hsaa {

/// Wraps an affine G as the linear system (I - A) x = b with b = G(0).
/// G(0) is evaluated once and cached, so one matvec costs one G evaluation.
class AffineSystem {
public:
    explicit AffineSystem(const FixedPointProblem<double>& problem);

    Eigen::Index dim() const { return problem_->dim(); }
    const Eigen::VectorXd& rhs() const { return rhs_; }

    /// (I - A) v = v - (G(v) - G(0)).
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

private:
    const FixedPointProblem<double>* problem_;
    Eigen::VectorXd rhs_;
};

struct GmresOptions {
    int restart = 10;
    double tol = 1e-8;    // relative to the initial residual
    int max_outer = 100;  // number of restart cycles
    bool store_iterates = false;
    bool track_basis_defect = false;
};

struct GmresResult {
    ConvergenceRecord record;
    Eigen::VectorXd solution;
    std::vector<Eigen::VectorXd> iterates;  // one per recorded row when requested
    double max_basis_defect = 0.0;
};

/// Arnoldi with modified Gram-Schmidt and plane rotations, restarted from the
/// current iterate every `restart` inner steps. The recorded residual is the
/// true residual ||b - (I-A)x||_2, recomputed once per inner iteration.
GmresResult gmres_restarted(const AffineSystem& system, const Eigen::VectorXd& x0,
                            const GmresOptions& options,
                            const Weighting* record_weight = nullptr,
                            const Eigen::VectorXd* reference = nullptr);

}  // namespace hsaa
