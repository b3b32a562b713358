// Fixed-point problem interface and the sampled-function iterate type.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace hsaa {

/// A function sampled on an equispaced grid with spacing h.
template <typename Scalar>
struct GridFunction {
    Eigen::VectorX<Scalar> values;
    double h = 1.0;

    Eigen::Index size() const { return values.size(); }
};

/// The operator G of a fixed-point iteration x_{k+1} = G(x_k), together with
/// the grid metadata the norms need. apply_G must be pure: no state visible
/// to the solver may change between calls.
template <typename Scalar>
class FixedPointProblem {
public:
    virtual ~FixedPointProblem() = default;

    virtual Eigen::Index dim() const = 0;
    virtual double spacing() const = 0;
    virtual Eigen::VectorX<Scalar> apply_G(const Eigen::VectorX<Scalar>& x) const = 0;

    /// True when G is affine: G(u+v) - G(v) is linear in u.
    virtual bool is_linear() const { return false; }

    /// Fixed point x*, when the problem can produce one directly.
    virtual std::optional<Eigen::VectorX<Scalar>> exact_solution() const { return std::nullopt; }

    /// The experiment's starting iterate.
    virtual Eigen::VectorX<Scalar> initial_iterate() const {
        return Eigen::VectorX<Scalar>::Zero(dim());
    }
};

}  // namespace hsaa
