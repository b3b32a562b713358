// Per-iteration convergence histories shared by the Picard, Anderson, and
// GMRES drivers, plus the CSV emitter used by the experiment runner.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hsaa {

enum class RunStatus {
    Converged,
    MaxIterations,
    Diverged,
    InnerSolveFailure,
};

const char* to_string(RunStatus status);

struct ConvergenceRow {
    int iter = 0;
    double res_l2 = 0.0;                // ||f_k||_2
    double res_weighted = 0.0;          // weighted norm of f_k
    std::optional<double> err_l2;       // ||x_k - x*||_2 when the fixed point is known
};

struct ConvergenceRecord {
    std::vector<ConvergenceRow> rows;
    RunStatus status = RunStatus::MaxIterations;

    /// First iteration index whose residual is <= rel_tol * initial residual.
    std::optional<int> iterations_to(double rel_tol) const;

    double initial_residual() const { return rows.empty() ? 0.0 : rows.front().res_l2; }
    double final_residual() const { return rows.empty() ? 0.0 : rows.back().res_l2; }
};

/// CSV with header `iter,res_l2,res_w,err_l2`, one row per iteration starting
/// at 0, LF line endings, shortest round-trip decimal floats. err_l2 is left
/// blank when no reference solution is available.
void write_csv(const ConvergenceRecord& record, std::ostream& out);
void write_csv_file(const ConvergenceRecord& record, const std::string& path);

}  // namespace hsaa
