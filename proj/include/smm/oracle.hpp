#pragma once

#include <stdexcept>
#include <vector>

#include "smm/moments.hpp"
#include "smm/regularizer.hpp"

namespace smm {

struct BatchSolution {
    VectorXd h_star;
    double objective = 0.0;
    double grad_norm = 0.0;
    Index iterations = 0;
    /// F(h_k) for k = 0..iterations.
    std::vector<double> objective_history;
};

/// Raised when the batch solver runs out of iterations; carries the last iterate.
class OracleNotConverged : public std::runtime_error {
  public:
    OracleNotConverged(const std::string& what, BatchSolution last)
        : std::runtime_error(what), last_(std::move(last)) {}
    const BatchSolution& last() const noexcept { return last_; }

  private:
    BatchSolution last_;
};

/// Smallest eigenvalue of R + V0.
double min_eigenvalue_R_plus_V0(const MomentState& moments, const Regularizer& reg);

/// Full-space half-quadratic MM on frozen statistics:
///   h_{k+1} = A(h_k)^{-1} c(h_k)
/// until ||grad F(h_k)|| <= tol. Requires R + V0 positive definite
/// (PreconditionError otherwise). For nonconvex penalties the result is a
/// critical point, not a certified global minimizer.
BatchSolution batch_half_quadratic(const MomentState& moments, const Regularizer& reg,
                                   const VectorXd& h0, double tol = 1e-10,
                                   Index max_iter = 100000);

/// Solves (R + V0) h = r + v0 densely. Throws PreconditionError when the
/// system is not positive definite.
VectorXd quadratic_closed_form(const MomentState& moments, const ElasticNet& quadratic);

}  // namespace smm
