#pragma once

#include <limits>
#include <string_view>

#include "smm/moments.hpp"
#include "smm/regularizer.hpp"
#include "smm/types.hpp"

namespace smm {

/// How the search subspace D_n is built from the current gradient and iterates.
enum class SubspaceStrategy {
    GradientOnly,    // [-grad, h]
    MemoryGradient,  // [-grad, h, h - h_prev]  ([-grad, h] on the first step)
    FullSpace,       // identity basis: online half-quadratic, O(N^3) per step
};

std::string_view strategy_name(SubspaceStrategy s);
SubspaceStrategy parse_strategy(std::string_view name);

/// Columns in the fixed order listed on SubspaceStrategy; n is the 1-based step index.
MatrixXd build_subspace(SubspaceStrategy strategy, const VectorXd& grad, const VectorXd& h,
                        const VectorXd& h_prev, Index n);

/// Products of the current subspace with the problem operators.
struct SubspaceCaches {
    MatrixXd DR;   // R_n D_n      (N x M)
    MatrixXd DV0;  // V0 D_n       (N x M)
    MatrixXd DV;   // V D_n        (P x M)
    VectorXd hR;   // R_n h_n
};

/// Engine state between two steps. Before step n it holds
///   h = h_n, h_prev = h_{n-1}, u_prev = u_{n-1}, D = D_{n-1},
///   caches.DR = R_{n-1} D_{n-1}, caches.DV0 = V0 D_{n-1}, caches.DV = V D_{n-1},
///   caches.hR = R_{n-1} h_{n-1}, grad = grad F_{n-1}(h_{n-1}),
/// so that h = D u_prev always holds.
struct EngineState {
    Index n = 1;
    VectorXd h;
    VectorXd h_prev;
    VectorXd u_prev;
    MatrixXd D;
    SubspaceCaches caches;
    VectorXd grad;
};

/// h_1 = D_0 u_0 with D_0 = [0], u_0 = (0) when h1 is empty, else D_0 = [h1], u_0 = (1).
EngineState initial_state(const Regularizer& reg, const VectorXd& h1 = VectorXd());

struct IterationReport {
    Index n = 0;
    double objective = std::numeric_limits<double>::quiet_NaN();       // F_n(h_n)
    double objective_next = std::numeric_limits<double>::quiet_NaN();  // F_n(h_{n+1})
    double grad_norm = 0.0;       // ||grad F_n(h_n)||
    double step_quadratic = 0.0;  // (h_{n+1}-h_n)' A_n(h_n) (h_{n+1}-h_n)
    Index subspace_dim = 0;
    Index rank_B = 0;
};

struct StepOptions {
    /// Evaluate F_n(h_n) and F_n(h_{n+1}) for the report (O(N^2) extra).
    bool compute_objective = false;
    double divergence_bound = 1e12;
};

/// Gradient grad F_n(h_n) = D^A_{n-1} u_{n-1} - c_n(h_n) from the caches, with
/// D^A_{n-1} = (1 - 1/vbar_n) R_{n-1}D_{n-1} + (1/vbar_n) X_n (X_n' D_{n-1})
///           + V0 D_{n-1} + V' Diag(b(h_n)) V D_{n-1}.
/// `moments` must have had update_first_order() applied for `sample` but not yet
/// update_second_order(); no N x N product is formed.
VectorXd gradient_recursive(const EngineState& state, const MomentState& moments,
                            const Regularizer& reg, const Sample& sample);

/// Caches for D_new. `state` is the pre-step state, `moments` is fully advanced
/// to step n. Under MemoryGradient only the gradient column needs fresh
/// products; the iterate and memory columns come from the previous caches,
/// except that a memory column shorter than 1e-4 ||h_n|| is multiplied
/// directly. The other strategies use direct products.
SubspaceCaches cache_refresh(const EngineState& state, const MomentState& moments,
                             const Regularizer& reg, const Sample& sample, const MatrixXd& D_new,
                             SubspaceStrategy strategy);

/// B = D'(DR + DV0) + DV' Diag(b) DV.
MatrixXd reduced_matrix(const MatrixXd& D, const SubspaceCaches& caches, const VectorXd& b);

/// One step of the stochastic MM subspace recursion. `moments` is the state
/// before `sample` and is advanced by it. Throws DivergenceError when the new
/// iterate is non-finite or exceeds options.divergence_bound; `state` is then
/// left at the pre-step value while `moments` has already absorbed the sample.
IterationReport mm_step(EngineState& state, MomentState& moments, const Regularizer& reg,
                        const Sample& sample, SubspaceStrategy strategy,
                        const StepOptions& options = {});

/// The same subspace MM iteration on fixed statistics (no new sample): a
/// deterministic MM memory-gradient method for min F. A state fresh from
/// initial_state (n == 1) gets its R products recomputed from `moments`.
IterationReport mm_step_frozen(EngineState& state, const MomentState& moments,
                               const Regularizer& reg, SubspaceStrategy strategy,
                               const StepOptions& options = {});

/// Tangent majorant Theta_n(h, anchor) = F(anchor) + grad F(anchor)'(h - anchor)
///                                     + 1/2 (h - anchor)' A_n(anchor) (h - anchor).
double majorant_eval(const MomentState& moments, const Regularizer& reg, const VectorXd& anchor,
                     const VectorXd& h);

/// Owns statistics, regularizer and engine state for a single stream.
class OnlineEstimator {
  public:
    OnlineEstimator(Regularizer reg, Index q, double vartheta, SubspaceStrategy strategy,
                    const VectorXd& h1 = VectorXd());

    IterationReport step(const Sample& sample, const StepOptions& options = {});

    const VectorXd& estimate() const { return state_.h; }
    const EngineState& state() const { return state_; }
    const MomentState& moments() const { return moments_; }
    const Regularizer& regularizer() const { return reg_; }
    SubspaceStrategy strategy() const { return strategy_; }

  private:
    Regularizer reg_;
    MomentState moments_;
    EngineState state_;
    SubspaceStrategy strategy_;
};

}  // namespace smm
