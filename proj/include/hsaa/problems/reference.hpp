// Direct reference solutions for affine fixed-point problems.
#pragma once

#include "hsaa/fixed_point.hpp"

namespace hsaa {

/// Fixed point of an affine map by dense elimination on (I - A), assembled
/// column by column from G. Intended for error reporting at moderate sizes;
/// throws std::invalid_argument for nonlinear problems.
GridFunction<double> reference_solution(const FixedPointProblem<double>& problem);

}  // namespace hsaa
