#pragma once

#include "smm/types.hpp"

namespace smm {

/// Eigenvalues below kRankCutoff * (largest eigenvalue) are treated as zero.
inline constexpr double kRankCutoff = 1e-12;
/// Relative asymmetry of B tolerated before it is reported as an internal error.
inline constexpr double kSymmetryTolerance = 1e-8;

struct ReducedSolution {
    VectorXd u;
    Index rank = 0;
};

/// Minimum-norm solution u = B^+ rhs of a small symmetric PSD system, via a
/// symmetric eigendecomposition. Throws std::logic_error if B is not symmetric
/// to kSymmetryTolerance.
ReducedSolution reduced_solve_ranked(const MatrixXd& B, const VectorXd& rhs);
VectorXd reduced_solve(const MatrixXd& B, const VectorXd& rhs);

/// Pseudo-inverse solve after symmetric diagonal scaling S B S with
/// S = diag(B_ii^{-1/2}) (unit scale for zero diagonal entries), so that the
/// rank cutoff compares directions rather than raw column magnitudes. The
/// symmetry check applies to B itself, before scaling. For
/// B = D'AD with A positive definite, D u is identical to the unscaled solve.
ReducedSolution reduced_solve_equilibrated(const MatrixXd& B, const VectorXd& rhs);

}  // namespace smm
