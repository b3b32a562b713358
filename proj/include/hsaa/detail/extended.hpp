// Extended-precision helpers for the Gram systems: the window matrices the
// Anderson step solves become severely ill-conditioned as the iteration
// converges, so inner products are accumulated in long double end to end.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <type_traits>

namespace hsaa::detail {

template <typename T>
struct promoted {
    using type = long double;
};
template <typename R>
struct promoted<std::complex<R>> {
    using type = std::complex<long double>;
};

template <typename T>
using promoted_t = typename promoted<T>::type;

template <typename T>
long double real_part(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return static_cast<long double>(v);
    } else {
        return static_cast<long double>(v.real());
    }
}

template <typename T>
T conj_value(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return v;
    } else {
        return std::conj(v);
    }
}

/// conj(a) . b accumulated in the promoted scalar type.
template <typename Scalar>
promoted_t<Scalar> dot_ext(const Eigen::VectorX<Scalar>& a,
                           const Eigen::Matrix<promoted_t<Scalar>, Eigen::Dynamic, 1>& b) {
    using P = promoted_t<Scalar>;
    P sum(0);
    for (Eigen::Index i = 0; i < a.size(); ++i) sum += conj_value(P(a[i])) * b[i];
    return sum;
}

}  // namespace hsaa::detail
