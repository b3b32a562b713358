#include "hsaa/gmres.hpp"

#include <cmath>
#include <stdexcept>

namespace hsaa {

AffineSystem::AffineSystem(const FixedPointProblem<double>& problem) : problem_(&problem) {
    if (!problem.is_linear()) {
        throw std::invalid_argument("AffineSystem: fixed-point map must be affine");
    }
    rhs_ = problem.apply_G(Eigen::VectorXd::Zero(problem.dim()));
}

Eigen::VectorXd AffineSystem::apply(const Eigen::VectorXd& v) const {
    return v - (problem_->apply_G(v) - rhs_);
}

namespace {

void record_point(GmresResult& out, int iter, const AffineSystem& system,
                  const Eigen::VectorXd& x, const Eigen::VectorXd& residual,
                  const Weighting* weight, const Eigen::VectorXd* reference,
                  bool store_iterates) {
    ConvergenceRow row;
    row.iter = iter;
    row.res_l2 = residual.norm();
    row.res_weighted = weight ? weight->norm<double>(residual) : row.res_l2;
    if (reference) row.err_l2 = (x - *reference).norm();
    out.record.rows.push_back(row);
    if (store_iterates) out.iterates.push_back(x);
    (void)system;
}

}  // namespace

GmresResult gmres_restarted(const AffineSystem& system, const Eigen::VectorXd& x0,
                            const GmresOptions& options, const Weighting* record_weight,
                            const Eigen::VectorXd* reference) {
    if (options.restart < 1) throw std::invalid_argument("gmres_restarted: restart must be >= 1");
    if (x0.size() != system.dim()) throw std::invalid_argument("gmres_restarted: bad x0 size");

    const Eigen::Index n = system.dim();
    const int m = options.restart;

    GmresResult out;
    out.record.status = RunStatus::MaxIterations;
    out.solution = x0;

    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = system.rhs() - system.apply(x);
    if (!r.allFinite()) {
        out.record.status = RunStatus::Diverged;
        return out;
    }
    record_point(out, 0, system, x, r, record_weight, reference, options.store_iterates);
    const double res0 = r.norm();
    const double target = options.tol * res0;
    if (res0 <= target || res0 == 0.0) {
        out.record.status = RunStatus::Converged;
        return out;
    }

    Eigen::MatrixXd basis(n, m + 1);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd g(m + 1), cs(m), sn(m), y(m);

    int iter = 0;
    for (int outer = 0; outer < options.max_outer; ++outer) {
        r = system.rhs() - system.apply(x);
        const double beta = r.norm();
        if (!std::isfinite(beta)) {
            out.record.status = RunStatus::Diverged;
            break;
        }
        if (beta <= target) {
            out.record.status = RunStatus::Converged;
            break;
        }
        basis.col(0) = r / beta;
        g.setZero();
        g[0] = beta;
        hess.setZero();

        bool happy = false;
        int inner = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = system.apply(basis.col(j));
            for (int i = 0; i <= j; ++i) {
                hess(i, j) = basis.col(i).dot(w);
                w -= hess(i, j) * basis.col(i);
            }
            hess(j + 1, j) = w.norm();
            happy = hess(j + 1, j) <= 1e-14 * beta;
            if (!happy) basis.col(j + 1) = w / hess(j + 1, j);

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
                hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
                hess(i, j) = t;
            }
            const double denom = std::hypot(hess(j, j), hess(j + 1, j));
            if (denom == 0.0) {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = hess(j, j) / denom;
                sn[j] = hess(j + 1, j) / denom;
            }
            hess(j, j) = denom;
            hess(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            // current iterate from the triangular least-squares system
            for (int i = j; i >= 0; --i) {
                double s = g[i];
                for (int k2 = i + 1; k2 <= j; ++k2) s -= hess(i, k2) * y[k2];
                y[i] = s / hess(i, i);
            }
            Eigen::VectorXd xj = x + basis.leftCols(j + 1) * y.head(j + 1);
            Eigen::VectorXd rtrue = system.rhs() - system.apply(xj);
            if (!rtrue.allFinite()) {
                out.record.status = RunStatus::Diverged;
                out.solution = x;
                return out;
            }
            ++iter;
            record_point(out, iter, system, xj, rtrue, record_weight, reference,
                         options.store_iterates);
            inner = j + 1;

            if (rtrue.norm() <= target || happy) {
                out.record.status = RunStatus::Converged;  // happy breakdown == convergence
                out.solution = xj;
                if (options.track_basis_defect) {
                    const auto v = basis.leftCols(inner);
                    out.max_basis_defect =
                        std::max(out.max_basis_defect,
                                 (v.transpose() * v -
                                  Eigen::MatrixXd::Identity(inner, inner)).cwiseAbs().maxCoeff());
                }
                return out;
            }
            if (j + 1 == m) x = xj;  // restart from the end-of-cycle iterate
        }
        if (options.track_basis_defect) {
            const auto v = basis.leftCols(inner + 1);
            out.max_basis_defect = std::max(
                out.max_basis_defect,
                (v.transpose() * v -
                 Eigen::MatrixXd::Identity(inner + 1, inner + 1)).cwiseAbs().maxCoeff());
        }
    }
    out.solution = x;
    return out;
}

}  // namespace hsaa
