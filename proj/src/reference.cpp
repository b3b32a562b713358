#include "hsaa/problems/reference.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace hsaa {

GridFunction<double> reference_solution(const FixedPointProblem<double>& problem) {
    if (!problem.is_linear()) {
        throw std::invalid_argument("reference_solution: unsupported for nonlinear problems");
    }
    const Eigen::Index n = problem.dim();
    const Eigen::VectorXd b = problem.apply_G(Eigen::VectorXd::Zero(n));
    Eigen::MatrixXd system(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[j] = 1.0;
        system.col(j) = e - (problem.apply_G(e) - b);
    }
    GridFunction<double> out;
    out.values = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(b);
    out.h = problem.spacing();
    return out;
}

}  // namespace hsaa
