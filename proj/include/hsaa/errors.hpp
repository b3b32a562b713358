// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace hsaa {

/// Cholesky-type factorization hit a nonpositive pivot.
struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

/// A linear system turned out singular (zero pivot after pivoting).
struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

/// The Gram matrix of a window is numerically rank deficient beyond repair.
struct SingularGram : std::runtime_error {
    explicit SingularGram(const std::string& what) : std::runtime_error(what) {}
};

/// A Krylov matrix required by the one-step error formulas lost rank.
struct DegenerateKrylov : std::runtime_error {
    explicit DegenerateKrylov(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsaa
