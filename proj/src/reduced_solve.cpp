#include "smm/reduced_solve.hpp"

#include <cmath>
#include <stdexcept>

#include "smm/errors.hpp"

namespace smm {

namespace {

// Symmetrized copy of B; throws if B is visibly asymmetric. Empty when B is zero.
MatrixXd checked_symmetric(const MatrixXd& B, const VectorXd& rhs) {
    require_dim(B.rows() == B.cols() && B.rows() == rhs.size(), "reduced_solve: shape mismatch");
    if (B.size() == 0) return MatrixXd();
    const double scale = B.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return MatrixXd();
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
        throw std::logic_error("reduced_solve: B is not symmetric (cache incoherence)");
    }
    return 0.5 * (B + B.transpose());
}

ReducedSolution pinv_solve(const MatrixXd& sym, const VectorXd& rhs) {
    const Index m = rhs.size();
    ReducedSolution out{VectorXd::Zero(m), 0};
    if (sym.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
    const VectorXd& lambda = eig.eigenvalues();
    const double cutoff = kRankCutoff * lambda.maxCoeff();
    const VectorXd proj = eig.eigenvectors().transpose() * rhs;
    VectorXd coef = VectorXd::Zero(m);
    for (Index i = 0; i < m; ++i) {
        if (lambda(i) > cutoff && lambda(i) > 0.0) {
            coef(i) = proj(i) / lambda(i);
            ++out.rank;
        }
    }
    out.u = eig.eigenvectors() * coef;
    return out;
}

}  // namespace

ReducedSolution reduced_solve_ranked(const MatrixXd& B, const VectorXd& rhs) {
    return pinv_solve(checked_symmetric(B, rhs), rhs);
}

VectorXd reduced_solve(const MatrixXd& B, const VectorXd& rhs) {
    return reduced_solve_ranked(B, rhs).u;
}

ReducedSolution reduced_solve_equilibrated(const MatrixXd& B, const VectorXd& rhs) {
    const MatrixXd sym = checked_symmetric(B, rhs);
    if (sym.size() == 0) return ReducedSolution{VectorXd::Zero(rhs.size()), 0};
    VectorXd s(sym.rows());
    for (Index i = 0; i < sym.rows(); ++i) {
        s(i) = sym(i, i) > 0.0 ? 1.0 / std::sqrt(sym(i, i)) : 1.0;
    }
    ReducedSolution out = pinv_solve(s.asDiagonal() * sym * s.asDiagonal(), s.cwiseProduct(rhs));
    out.u = s.cwiseProduct(out.u);
    return out;
}

}  // namespace smm
