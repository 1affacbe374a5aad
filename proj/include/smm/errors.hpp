#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smm {

/// Operand shapes disagree (N, Q or P).
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a solver does not hold (e.g. R + V0 not positive definite).
class PreconditionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The iterate left the finite range or exceeded the divergence bound.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(std::int64_t iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}
    std::int64_t iteration() const noexcept { return iteration_; }

  private:
    std::int64_t iteration_;
};

inline void require_dim(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace smm
