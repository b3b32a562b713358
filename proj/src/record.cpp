#include "hsaa/record.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace hsaa {

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "CONVERGED";
        case RunStatus::MaxIterations: return "MAXITER";
        case RunStatus::Diverged: return "DIVERGED";
        case RunStatus::InnerSolveFailure: return "INNER-SOLVE-FAILURE";
    }
    return "UNKNOWN";
}

std::optional<int> ConvergenceRecord::iterations_to(double rel_tol) const {
    if (rows.empty()) return std::nullopt;
    const double target = rel_tol * rows.front().res_l2;
    for (const auto& row : rows) {
        if (row.res_l2 <= target) return row.iter;
    }
    return std::nullopt;
}

namespace {

// Shortest decimal representation that round-trips; locale independent.
std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const ConvergenceRecord& record, std::ostream& out) {
    out << "iter,res_l2,res_w,err_l2\n";
    for (const auto& row : record.rows) {
        out << row.iter << ',' << format_double(row.res_l2) << ','
            << format_double(row.res_weighted) << ',';
        if (row.err_l2) out << format_double(*row.err_l2);
        out << '\n';
    }
}

void write_csv_file(const ConvergenceRecord& record, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv_file: cannot open " + path);
    write_csv(record, out);
}

}  // namespace hsaa
