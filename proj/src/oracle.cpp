#include "smm/oracle.hpp"

#include <sstream>

#include "smm/errors.hpp"

namespace smm {

double min_eigenvalue_R_plus_V0(const MomentState& moments, const Regularizer& reg) {
    require_dim(moments.dim() == reg.dim(), "oracle: dimension mismatch");
    const MatrixXd M = moments.R() + reg.quadratic().matrix();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(M, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

BatchSolution batch_half_quadratic(const MomentState& moments, const Regularizer& reg,
                                   const VectorXd& h0, double tol, Index max_iter) {
    require_dim(h0.size() == reg.dim() && moments.dim() == reg.dim(), "batch_half_quadratic: dimension mismatch");
    if (!(min_eigenvalue_R_plus_V0(moments, reg) > 0.0)) {
        throw PreconditionError("batch_half_quadratic: R + V0 is not positive definite");
    }
    BatchSolution sol;
    sol.h_star = h0;
    sol.objective = objective_eval(moments, reg, h0);
    sol.objective_history.push_back(sol.objective);
    for (Index k = 0;; ++k) {
        sol.grad_norm = gradient_direct(moments, reg, sol.h_star).norm();
        sol.iterations = k;
        if (sol.grad_norm <= tol) return sol;
        if (k >= max_iter) break;
        const MatrixXd A = metric_matrix(moments, reg, sol.h_star);
        const VectorXd c = c_vector(moments, reg, sol.h_star);
        Eigen::LLT<MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) {
            throw PreconditionError("batch_half_quadratic: majorant metric is not positive definite");
        }
        sol.h_star = llt.solve(c);
        sol.objective = objective_eval(moments, reg, sol.h_star);
        sol.objective_history.push_back(sol.objective);
    }
    std::ostringstream os;
    os << "batch_half_quadratic: gradient norm " << sol.grad_norm << " above " << tol << " after "
       << max_iter << " iterations";
    throw OracleNotConverged(os.str(), sol);
}

VectorXd quadratic_closed_form(const MomentState& moments, const ElasticNet& quadratic) {
    require_dim(moments.dim() == quadratic.dim(), "quadratic_closed_form: dimension mismatch");
    const MatrixXd M = moments.R() + quadratic.matrix();
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) {
        throw PreconditionError("quadratic_closed_form: R + V0 is not positive definite");
    }
    VectorXd h = llt.solve(moments.r() + quadratic.v0());
    // One step of iterative refinement.
    h += llt.solve(moments.r() + quadratic.v0() - M * h);
    return h;
}

}  // namespace smm
