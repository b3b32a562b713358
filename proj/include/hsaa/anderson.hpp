// Anderson acceleration with a configurable weighted metric in the inner
// least-squares problem, plus the Picard driver, the constrained-form
// cross-check, the one-step-AA harness, and the multisecant operator.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "hsaa/detail/extended.hpp"
#include "hsaa/errors.hpp"
#include "hsaa/fixed_point.hpp"
#include "hsaa/norms.hpp"
#include "hsaa/record.hpp"

namespace hsaa {

constexpr int kUnboundedMemory = -1;

struct AAConfig {
    int memory = 10;                  // window size m; kUnboundedMemory keeps everything
    double beta = 1.0;                // mixing parameter in (0, 1]
    NormKind norm{};                  // metric of the least-squares step
    double tol = 1e-10;               // stop at tol * (initial l2 residual)
    int max_iters = 1000;
    double reg = 1e-12;               // relative ridge for the Gram solve fallback
    double divergence_factor = 1e12;  // residual growth that flags divergence
};

template <typename Scalar>
struct RunResult {
    ConvergenceRecord record;
    Eigen::VectorX<Scalar> final_iterate;
};

namespace detail {

/// In-place lower Cholesky of a Hermitian matrix in extended precision.
/// Returns false on a nonpositive or nonfinite pivot.
template <typename P>
bool cholesky_in_place(Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic>& a) {
    const Eigen::Index m = a.rows();
    for (Eigen::Index j = 0; j < m; ++j) {
        long double d = real_part(a(j, j));
        for (Eigen::Index k = 0; k < j; ++k) {
            const P l = a(j, k);
            d -= real_part(l * conj_value(l));
        }
        if (!(d > 0.0L) || !std::isfinite(static_cast<double>(d))) return false;
        const long double pivot = std::sqrt(d);
        a(j, j) = P(pivot);
        for (Eigen::Index i = j + 1; i < m; ++i) {
            P v = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= a(i, k) * conj_value(a(j, k));
            a(i, j) = v / P(pivot);
        }
    }
    return true;
}

template <typename P>
void cholesky_solve_in_place(const Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic>& l,
                             Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic>& rhs) {
    const Eigen::Index m = l.rows();
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        for (Eigen::Index i = 0; i < m; ++i) {
            P s = rhs(i, c);
            for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * rhs(k, c);
            rhs(i, c) = s / l(i, i);
        }
        for (Eigen::Index i = m - 1; i >= 0; --i) {
            P s = rhs(i, c);
            for (Eigen::Index k = i + 1; k < m; ++k) s -= conj_value(l(k, i)) * rhs(k, c);
            rhs(i, c) = s / l(i, i);
        }
    }
}

/// Solves the (Hermitian PSD) Gram system G gamma = rhs with unit column
/// scaling, plain Cholesky first, a relative ridge when the factorization
/// fails, and oldest-column dropping as the last resort. Dropped entries of
/// gamma are zero; std::nullopt means every column was dropped. The Gram
/// matrix arrives in extended precision and stays there through the solve:
/// its conditioning is the square of the window's.
template <typename Scalar>
std::optional<Eigen::VectorX<Scalar>> solve_gamma_core(
    const Eigen::Matrix<promoted_t<Scalar>, Eigen::Dynamic, Eigen::Dynamic>& gram,
    const Eigen::Matrix<promoted_t<Scalar>, Eigen::Dynamic, 1>& rhs, double reg) {
    using P = promoted_t<Scalar>;
    using PMatrix = Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = gram.rows();

    VectorXld col_scale(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const long double d = real_part(gram(i, i));
        col_scale[i] =
            (d > 0.0L && std::isfinite(static_cast<double>(d))) ? 1.0L / std::sqrt(d) : 1.0L;
    }

    for (Eigen::Index start = 0; start < m; ++start) {
        const Eigen::Index mm = m - start;
        PMatrix a(mm, mm);
        PMatrix b(mm, 1);
        for (Eigen::Index i = 0; i < mm; ++i) {
            b(i, 0) = rhs[start + i] * P(col_scale[start + i]);
            for (Eigen::Index j = 0; j < mm; ++j) {
                a(i, j) = gram(start + i, start + j) * P(col_scale[start + i] * col_scale[start + j]);
            }
        }

        PMatrix l = a;
        bool ok = cholesky_in_place(l);
        if (!ok && reg > 0.0) {
            long double trace = 0.0L;
            for (Eigen::Index i = 0; i < mm; ++i) trace += real_part(a(i, i));
            const long double ridge =
                static_cast<long double>(reg) * trace / static_cast<long double>(mm);
            l = a;
            for (Eigen::Index i = 0; i < mm; ++i) l(i, i) += P(ridge);
            a = l;  // refine against the ridged system
            ok = cholesky_in_place(l);
        }
        if (!ok) continue;

        PMatrix y = b;
        cholesky_solve_in_place(l, y);
        PMatrix resid = b - a * y;  // one refinement pass
        cholesky_solve_in_place(l, resid);
        y += resid;

        Eigen::VectorX<Scalar> gamma = Eigen::VectorX<Scalar>::Zero(m);
        bool finite = true;
        for (Eigen::Index i = 0; i < mm; ++i) {
            const Scalar sv = static_cast<Scalar>(y(i, 0) * P(col_scale[start + i]));
            if (!std::isfinite(std::abs(sv))) finite = false;
            gamma[start + i] = sv;
        }
        if (!finite) continue;
        return gamma;
    }
    return std::nullopt;
}

/// Extended-precision Gram system of a window against the weighted metric.
template <typename Scalar>
std::pair<Eigen::Matrix<promoted_t<Scalar>, Eigen::Dynamic, Eigen::Dynamic>,
          Eigen::Matrix<promoted_t<Scalar>, Eigen::Dynamic, 1>>
extended_gram(const Weighting& weight, const Eigen::MatrixX<Scalar>& cols,
              const Eigen::VectorX<Scalar>& f) {
    using P = promoted_t<Scalar>;
    const Eigen::Index m = cols.cols();
    if (m < 1) throw std::invalid_argument("gram system: need at least one column");
    if (cols.rows() != weight.dim() || f.size() != weight.dim()) {
        throw std::invalid_argument("gram system: dimension mismatch");
    }
    std::vector<Eigen::Matrix<P, Eigen::Dynamic, 1>> z;
    z.reserve(static_cast<size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        z.push_back(weight.apply_psq_extended(Eigen::VectorX<Scalar>(cols.col(j))));
    }
    Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic> gram(m, m);
    Eigen::Matrix<P, Eigen::Dynamic, 1> rhs(m);
    const P h(weight.scale());
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorX<Scalar> di = cols.col(i);
        for (Eigen::Index j = 0; j < m; ++j) {
            gram(i, j) = h * dot_ext<Scalar>(di, z[static_cast<size_t>(j)]);
        }
        P g(0);
        for (Eigen::Index r = 0; r < f.size(); ++r) {
            g += conj_value(z[static_cast<size_t>(i)][r]) * P(f[r]);
        }
        rhs[i] = h * g;  // conj(z_i) . f = <d_i, f> since P^2 is real symmetric
    }
    return {std::move(gram), std::move(rhs)};
}

}  // namespace detail

/// Least-squares coefficients of the Anderson update: minimizes the weighted
/// distance between f and the span of the window columns.
template <typename Scalar>
std::optional<Eigen::VectorX<Scalar>> solve_gamma(const Eigen::MatrixX<Scalar>& cols,
                                                  const Eigen::VectorX<Scalar>& f,
                                                  const Weighting& weight, double reg = 1e-12) {
    auto [gram, rhs] = detail::extended_gram<Scalar>(weight, cols, f);
    return detail::solve_gamma_core<Scalar>(gram, rhs, reg);
}

/// Rolling window of iterate/residual differences plus the incremental Gram
/// matrix of the residual-difference columns in the weighted metric.
template <typename Scalar>
class AndersonAccelerator {
public:
    using Vector = Eigen::VectorX<Scalar>;
    using Promoted = detail::promoted_t<Scalar>;
    using PVector = Eigen::Matrix<Promoted, Eigen::Dynamic, 1>;
    using PMatrix = Eigen::Matrix<Promoted, Eigen::Dynamic, Eigen::Dynamic>;

    AndersonAccelerator(const Weighting& weight, int memory, double reg = 1e-12)
        : weight_(&weight), capacity_(memory), reg_(reg) {
        if (memory < 0 && memory != kUnboundedMemory) {
            throw std::invalid_argument("AndersonAccelerator: bad memory parameter");
        }
    }

    void reset() {
        dx_.clear();
        df_.clear();
        zf_.clear();
        gram_.resize(0, 0);
        has_prev_ = false;
    }

    /// Feed the pair (x_k, G(x_k)); pushes the new difference columns and
    /// evicts the oldest when the window is at capacity.
    void register_iterate(const Vector& x, const Vector& gx) {
        Vector f = gx - x;
        if (has_prev_ && capacity_ != 0) {
            Vector dx = x - prev_x_;
            Vector df = f - prev_f_;
            PVector zf = weight_->apply_psq_extended(df);
            if (capacity_ > 0 && static_cast<int>(df_.size()) == capacity_) evict_oldest();
            const Eigen::Index m = static_cast<Eigen::Index>(df_.size());
            PMatrix grown(m + 1, m + 1);
            grown.topLeftCorner(m, m) = gram_;
            const Promoted h(weight_->scale());
            for (Eigen::Index i = 0; i < m; ++i) {
                const Promoted gij = h * detail::dot_ext<Scalar>(df_[static_cast<size_t>(i)], zf);
                grown(i, m) = gij;
                grown(m, i) = detail::conj_value(gij);
            }
            grown(m, m) = h * detail::dot_ext<Scalar>(df, zf);
            gram_ = std::move(grown);
            dx_.push_back(std::move(dx));
            df_.push_back(std::move(df));
            zf_.push_back(std::move(zf));
        }
        prev_x_ = x;
        prev_f_ = std::move(f);
        prev_gx_ = gx;
        has_prev_ = true;
    }

    /// The Anderson update from the registered state; a plain Picard step
    /// (G(x_k) verbatim) when the window is empty or the Gram solve fails.
    Vector accelerated() {
        if (!has_prev_) throw std::logic_error("AndersonAccelerator: no iterate registered");
        const Eigen::Index m = static_cast<Eigen::Index>(df_.size());
        last_was_picard_ = true;
        if (m == 0) return prev_gx_;

        PVector rhs(m);
        const Promoted h(weight_->scale());
        for (Eigen::Index i = 0; i < m; ++i) {
            rhs[i] = h * detail::dot_ext<Scalar>(prev_f_, zf_[static_cast<size_t>(i)]);
        }
        // dot_ext conjugates its first argument; the Gram right-hand side is
        // <d_i, f> = conj(<f, d_i>).
        for (Eigen::Index i = 0; i < m; ++i) rhs[i] = detail::conj_value(rhs[i]);
        auto gamma = detail::solve_gamma_core<Scalar>(gram_, rhs, reg_);
        if (!gamma) return prev_gx_;

        last_was_picard_ = false;
        last_gamma_ = *gamma;
        Vector next = prev_gx_;
        for (Eigen::Index i = 0; i < m; ++i) {
            next -= (*gamma)[i] * (dx_[static_cast<size_t>(i)] + df_[static_cast<size_t>(i)]);
        }
        return next;
    }

    Vector step(const Vector& x, const Vector& gx) {
        register_iterate(x, gx);
        return accelerated();
    }

    int window_size() const { return static_cast<int>(df_.size()); }
    const std::vector<Vector>& dx_columns() const { return dx_; }
    const std::vector<Vector>& df_columns() const { return df_; }
    const Vector& residual() const { return prev_f_; }
    const Vector& last_gamma() const { return last_gamma_; }
    bool last_step_was_picard() const { return last_was_picard_; }

private:
    void evict_oldest() {
        dx_.erase(dx_.begin());
        df_.erase(df_.begin());
        zf_.erase(zf_.begin());
        const Eigen::Index m = gram_.rows();
        gram_ = gram_.bottomRightCorner(m - 1, m - 1).eval();
    }

    const Weighting* weight_;
    int capacity_;
    double reg_;
    std::vector<Vector> dx_, df_;
    std::vector<PVector> zf_;  // P^2 df columns, kept in extended precision
    PMatrix gram_;
    Vector prev_x_, prev_f_, prev_gx_;
    Vector last_gamma_;
    bool has_prev_ = false;
    bool last_was_picard_ = true;
};

namespace detail {

enum class RowOutcome { Keep, NonFinite, Diverged };

template <typename Scalar>
RowOutcome append_row(ConvergenceRecord& record, int iter, const Eigen::VectorX<Scalar>& x,
                      const Eigen::VectorX<Scalar>& f, const Weighting* weight, double h,
                      const std::optional<Eigen::VectorX<Scalar>>& exact,
                      double divergence_factor) {
    const double res = f.norm();
    if (!std::isfinite(res) || !x.allFinite()) return RowOutcome::NonFinite;
    ConvergenceRow row;
    row.iter = iter;
    row.res_l2 = res;
    row.res_weighted = weight ? weight->template norm<Scalar>(f) : std::sqrt(h) * res;
    if (exact) row.err_l2 = (x - *exact).norm();
    record.rows.push_back(row);
    const double res0 = record.rows.front().res_l2;
    if (iter > 0 && res > divergence_factor * std::max(res0, 1e-300)) return RowOutcome::Diverged;
    return RowOutcome::Keep;
}

}  // namespace detail

/// Plain Picard iteration x_{k+1} = G(x_k); residual/error history recorded.
/// tol = 0 runs all `iters` iterations.
template <typename Scalar>
RunResult<Scalar> picard_run(const FixedPointProblem<Scalar>& problem,
                             const Eigen::VectorX<Scalar>& x0, int iters, double tol = 0.0,
                             const Weighting* record_weight = nullptr) {
    if (x0.size() != problem.dim()) throw std::invalid_argument("picard_run: dimension mismatch");
    RunResult<Scalar> out;
    out.record.status = RunStatus::MaxIterations;
    const auto exact = problem.exact_solution();
    Eigen::VectorX<Scalar> x = x0;
    for (int k = 0; k <= iters; ++k) {
        Eigen::VectorX<Scalar> gx;
        try {
            gx = problem.apply_G(x);
        } catch (const SingularSystem&) {
            out.record.status = RunStatus::InnerSolveFailure;
            break;
        }
        const Eigen::VectorX<Scalar> f = gx - x;
        const auto outcome = detail::append_row<Scalar>(out.record, k, x, f, record_weight,
                                                        problem.spacing(), exact, 1e12);
        if (outcome != detail::RowOutcome::Keep) {
            out.record.status = RunStatus::Diverged;
            break;
        }
        if (tol > 0.0 && f.norm() <= tol * out.record.initial_residual()) {
            out.record.status = RunStatus::Converged;
            break;
        }
        if (k == iters) break;
        x = gx;
    }
    out.final_iterate = std::move(x);
    return out;
}

/// Full Anderson acceleration loop (unconstrained form): x_1 = G(x_0), then
/// one weighted least-squares update per iteration, oldest column evicted at
/// capacity. beta < 1 applies the scheme to G_beta(x) = (1-beta) x + beta G(x).
template <typename Scalar>
RunResult<Scalar> aa_run(const FixedPointProblem<Scalar>& problem, const AAConfig& config,
                         const Eigen::VectorX<Scalar>& x0, const Weighting& weight) {
    if (x0.size() != problem.dim()) throw std::invalid_argument("aa_run: dimension mismatch");
    if (!(config.beta > 0.0) || config.beta > 1.0) {
        throw std::invalid_argument("aa_run: beta must lie in (0, 1]");
    }
    if (!(config.tol >= 0.0)) throw std::invalid_argument("aa_run: tol must be >= 0");

    RunResult<Scalar> out;
    out.record.status = RunStatus::MaxIterations;
    const auto exact = problem.exact_solution();
    AndersonAccelerator<Scalar> accelerator(weight, config.memory, config.reg);

    Eigen::VectorX<Scalar> x = x0;
    for (int k = 0; k <= config.max_iters; ++k) {
        Eigen::VectorX<Scalar> gx;
        try {
            gx = problem.apply_G(x);
        } catch (const SingularSystem&) {
            out.record.status = RunStatus::InnerSolveFailure;
            break;
        }
        if (config.beta < 1.0) gx = (1.0 - config.beta) * x + config.beta * gx;
        const Eigen::VectorX<Scalar> f = gx - x;
        const auto outcome = detail::append_row<Scalar>(out.record, k, x, f, &weight,
                                                        problem.spacing(), exact,
                                                        config.divergence_factor);
        if (outcome != detail::RowOutcome::Keep) {
            out.record.status = RunStatus::Diverged;
            break;
        }
        if (config.tol > 0.0 && f.norm() <= config.tol * out.record.initial_residual()) {
            out.record.status = RunStatus::Converged;
            break;
        }
        if (k == config.max_iters) break;
        accelerator.register_iterate(x, gx);
        x = accelerator.accelerated();
    }
    out.final_iterate = std::move(x);
    return out;
}

template <typename Scalar>
RunResult<Scalar> aa_run(const FixedPointProblem<Scalar>& problem, const AAConfig& config,
                         const Eigen::VectorX<Scalar>& x0) {
    const WeightOperator weight = build_weight(config.norm, problem.dim(), problem.spacing());
    return aa_run<Scalar>(problem, config, x0, weight);
}

/// Coefficients of the constrained (original) form: minimizes the weighted
/// norm of F v subject to sum(v) = 1, via the partial-sum substitution that
/// reduces it to the unconstrained gamma problem.
template <typename Scalar>
Eigen::VectorX<Scalar> constrained_alpha(const Eigen::MatrixX<Scalar>& residual_cols,
                                         const Weighting& weight, double reg = 1e-12) {
    const Eigen::Index p = residual_cols.cols();
    if (p < 1) throw std::invalid_argument("constrained_alpha: need at least one column");
    Eigen::VectorX<Scalar> alpha = Eigen::VectorX<Scalar>::Zero(p);
    if (p == 1) {
        alpha[0] = Scalar(1);
        return alpha;
    }
    Eigen::MatrixX<Scalar> diffs(residual_cols.rows(), p - 1);
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        diffs.col(i) = residual_cols.col(i + 1) - residual_cols.col(i);
    }
    const Eigen::VectorX<Scalar> f = residual_cols.col(p - 1);
    const auto gamma = solve_gamma<Scalar>(diffs, f, weight, reg);
    if (!gamma) {
        alpha[p - 1] = Scalar(1);  // degenerate window: plain Picard combination
        return alpha;
    }
    alpha[0] = (*gamma)[0];
    for (Eigen::Index i = 1; i + 1 < p; ++i) alpha[i] = (*gamma)[i] - (*gamma)[i - 1];
    alpha[p - 1] = Scalar(1) - (*gamma)[p - 2];
    return alpha;
}

/// k Picard iterations followed by exactly one Anderson step with memory m.
/// Returns the error x_{k+1} - x*; the problem must be affine with a known
/// fixed point.
template <typename Scalar>
Eigen::VectorX<Scalar> one_step_aa(const FixedPointProblem<Scalar>& problem,
                                   const Eigen::VectorX<Scalar>& x0, int k, int m,
                                   const Weighting& weight, double reg = 1e-12) {
    if (m < 1 || k < m) throw std::invalid_argument("one_step_aa: need k >= m >= 1");
    const auto exact = problem.exact_solution();
    if (!exact) throw std::invalid_argument("one_step_aa: problem must expose its fixed point");

    AndersonAccelerator<Scalar> accelerator(weight, m, reg);
    Eigen::VectorX<Scalar> x = x0;
    for (int j = 0; j < k; ++j) {
        Eigen::VectorX<Scalar> gx = problem.apply_G(x);
        accelerator.register_iterate(x, gx);
        x = std::move(gx);
    }
    accelerator.register_iterate(x, problem.apply_G(x));
    return accelerator.accelerated() - *exact;
}

/// Dense multisecant operator of the weighted update:
/// S = (X + D) (D^* P^2 D)^{-1} D^* P^2. Test-scale only.
template <typename Scalar>
Eigen::MatrixX<Scalar> multisecant_operator(const Eigen::MatrixX<Scalar>& x_cols,
                                            const Eigen::MatrixX<Scalar>& d_cols,
                                            const Weighting& weight) {
    using P = detail::promoted_t<Scalar>;
    using PMatrix = Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = d_cols.rows();
    const Eigen::Index m = d_cols.cols();
    if (x_cols.rows() != n || x_cols.cols() != m || m < 1) {
        throw std::invalid_argument("multisecant_operator: column sets must match");
    }

    std::vector<Eigen::Matrix<P, Eigen::Dynamic, 1>> z;
    z.reserve(static_cast<size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        z.push_back(weight.apply_psq_extended(Eigen::VectorX<Scalar>(d_cols.col(j))));
    }
    const P h(weight.scale());
    PMatrix gram(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorX<Scalar> di = d_cols.col(i);
        for (Eigen::Index j = 0; j < m; ++j) {
            gram(i, j) = h * detail::dot_ext<Scalar>(di, z[static_cast<size_t>(j)]);
        }
    }

    VectorXld scale(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const long double d = detail::real_part(gram(i, i));
        if (!(d > 0.0L) || !std::isfinite(static_cast<double>(d))) {
            throw SingularGram("multisecant_operator: zero-norm window column");
        }
        scale[i] = 1.0L / std::sqrt(d);
    }

    PMatrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = gram(i, j) * P(scale[i] * scale[j]);
    PMatrix l = a;
    if (!detail::cholesky_in_place(l)) {
        throw SingularGram("multisecant_operator: rank-deficient window");
    }

    // rows of h D^* P^2 = h conj(Z)^T, scaled consistently with the Gram
    PMatrix rhs(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index c = 0; c < n; ++c) {
            rhs(i, c) = detail::conj_value(z[static_cast<size_t>(i)][c]) * h * P(scale[i]);
        }
    detail::cholesky_solve_in_place(l, rhs);

    Eigen::MatrixX<Scalar> y(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index c = 0; c < n; ++c) {
            y(i, c) = static_cast<Scalar>(rhs(i, c) * P(scale[i]));
        }
    return (x_cols + d_cols) * y;
}

}  // namespace hsaa
