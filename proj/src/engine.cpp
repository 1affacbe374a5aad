#include "smm/engine.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "smm/errors.hpp"
#include "smm/reduced_solve.hpp"

namespace smm {

std::string_view strategy_name(SubspaceStrategy s) {
    switch (s) {
        case SubspaceStrategy::GradientOnly: return "gradient";
        case SubspaceStrategy::MemoryGradient: return "memory-gradient";
        case SubspaceStrategy::FullSpace: return "full";
    }
    return "unknown";
}

SubspaceStrategy parse_strategy(std::string_view name) {
    for (SubspaceStrategy s : {SubspaceStrategy::GradientOnly, SubspaceStrategy::MemoryGradient,
                               SubspaceStrategy::FullSpace}) {
        if (strategy_name(s) == name) return s;
    }
    throw std::invalid_argument("unknown subspace strategy '" + std::string(name) + "'");
}

MatrixXd build_subspace(SubspaceStrategy strategy, const VectorXd& grad, const VectorXd& h,
                        const VectorXd& h_prev, Index n) {
    const Index N = h.size();
    require_dim(grad.size() == N, "build_subspace: gradient length differs from N");
    switch (strategy) {
        case SubspaceStrategy::FullSpace:
            return MatrixXd::Identity(N, N);
        case SubspaceStrategy::GradientOnly: {
            MatrixXd D(N, 2);
            D.col(0) = -grad;
            D.col(1) = h;
            return D;
        }
        case SubspaceStrategy::MemoryGradient: {
            if (n <= 1) {
                MatrixXd D(N, 2);
                D.col(0) = -grad;
                D.col(1) = h;
                return D;
            }
            require_dim(h_prev.size() == N, "build_subspace: previous iterate length differs from N");
            MatrixXd D(N, 3);
            D.col(0) = -grad;
            D.col(1) = h;
            D.col(2) = h - h_prev;
            return D;
        }
    }
    throw std::logic_error("build_subspace: unknown strategy");
}

EngineState initial_state(const Regularizer& reg, const VectorXd& h1) {
    const Index N = reg.dim();
    EngineState st;
    st.n = 1;
    if (h1.size() == 0) {
        st.h = VectorXd::Zero(N);
        st.D = MatrixXd::Zero(N, 1);
        st.u_prev = VectorXd::Zero(1);
    } else {
        require_dim(h1.size() == N, "initial_state: h1 length differs from N");
        st.h = h1;
        st.D = h1;
        st.u_prev = VectorXd::Ones(1);
    }
    st.h_prev = st.h;
    // R_0 = 0, so R_0 D_0 and R_0 h_0 vanish.
    st.caches.DR = MatrixXd::Zero(N, 1);
    st.caches.DV0 = reg.quadratic().apply(st.D);
    st.caches.DV = reg.V() * st.D;
    st.caches.hR = VectorXd::Zero(N);
    st.grad = VectorXd::Zero(N);
    return st;
}

namespace {

// Memory columns shorter than this fraction of the iterate get direct products.
constexpr double kDirectMemoryRatio = 1e-4;

// Weights of the convex moment recursion at the current step:
// R_n = decay R_{n-1} + gain X_n X_n'. A frozen step has decay 1, gain 0.
struct Blend {
    double decay = 1.0;
    double gain = 0.0;
    const MatrixXd* X = nullptr;
};

Blend blend_for(const MomentState& m, const Sample& sample) {
    const double g = m.gain();
    return Blend{1.0 - g, g, &sample.X};
}

struct GradientPieces {
    VectorXd z;     // V h_n - v
    VectorXd b;     // b(h_n)
    VectorXd c;     // c_n(h_n)
    VectorXd grad;  // grad F_n(h_n)
    MatrixXd XXtD;  // X_n X_n' D_{n-1}  (empty when frozen)
    VectorXd XXth;  // X_n X_n' h_n      (empty when frozen)
};

GradientPieces recursive_gradient(const EngineState& st, const MomentState& m,
                                  const Regularizer& reg, const Blend& blend) {
    const Index N = reg.dim();
    require_dim(st.h.size() == N && m.dim() == N, "engine: state dimension differs from N");
    GradientPieces out;
    // V h_n = (V D_{n-1}) u_{n-1}
    out.z = st.caches.DV * st.u_prev - reg.v();
    out.b = weights_from_residual(reg, out.z);
    out.c = m.r() + reg.quadratic().v0();
    out.c.noalias() += reg.V().transpose() * out.b.cwiseProduct(reg.v());

    MatrixXd DA = blend.decay * st.caches.DR + st.caches.DV0;
    if (blend.X != nullptr) {
        const MatrixXd& X = *blend.X;
        const MatrixXd XtD = X.transpose() * st.D;
        out.XXtD = X * XtD;
        out.XXth = X * (XtD * st.u_prev);
        DA.noalias() += blend.gain * out.XXtD;
    }
    DA.noalias() += reg.V().transpose() * (out.b.asDiagonal() * st.caches.DV);
    out.grad = DA * st.u_prev - out.c;
    return out;
}

// XXth: X_n X_n' h_n; XXth_prev: X_n X_n' h_{n-1}. Both empty for a frozen step.
SubspaceCaches refresh(const EngineState& st, const MomentState& m, const Regularizer& reg,
                       const MatrixXd& D, SubspaceStrategy strategy, const Blend& blend,
                       const VectorXd& XXth, const std::optional<VectorXd>& XXth_prev) {
    const Index N = reg.dim();
    SubspaceCaches out;
    if (strategy == SubspaceStrategy::FullSpace) {
        out.DR = m.R();
        out.DV0 = reg.quadratic().matrix();
        out.DV = MatrixXd(reg.V());
        out.hR = m.R() * st.h;
        return out;
    }
    if (strategy == SubspaceStrategy::GradientOnly) {
        out.DR = m.R() * D;
        out.DV0 = reg.quadratic().apply(D);
        out.DV = reg.V() * D;
        out.hR = out.DR.col(1);
        return out;
    }

    const Index M = D.cols();
    const bool has_memory = M == 3;
    out.DR.resize(N, M);
    out.DV0.resize(N, M);
    out.DV.resize(reg.penalty_rows(), M);

    // Gradient column: the only fresh products.
    out.DR.col(0).noalias() = m.R() * D.col(0);
    out.DV0.col(0) = reg.quadratic().apply(VectorXd(D.col(0)));
    out.DV.col(0).noalias() = reg.V() * D.col(0);

    // Iterate column: h_n = D_{n-1} u_{n-1}.
    out.hR = blend.decay * (st.caches.DR * st.u_prev);
    if (blend.X != nullptr) out.hR += blend.gain * XXth;
    out.DR.col(1) = out.hR;
    out.DV0.col(1).noalias() = st.caches.DV0 * st.u_prev;
    out.DV.col(1).noalias() = st.caches.DV * st.u_prev;

    if (has_memory) {
        if (D.col(2).norm() <= kDirectMemoryRatio * D.col(1).norm()) {
            // The difference of two nearly equal products would be mostly rounding.
            out.DR.col(2).noalias() = m.R() * D.col(2);
            out.DV0.col(2) = reg.quadratic().apply(VectorXd(D.col(2)));
            out.DV.col(2).noalias() = reg.V() * D.col(2);
        } else {
            // Previous subspace carries h_{n-1} in its second column.
            VectorXd Rh_prev = blend.decay * st.caches.hR;
            if (blend.X != nullptr) Rh_prev += blend.gain * (*XXth_prev);
            out.DR.col(2) = out.hR - Rh_prev;
            out.DV0.col(2) = out.DV0.col(1) - st.caches.DV0.col(1);
            out.DV.col(2) = out.DV.col(1) - st.caches.DV.col(1);
        }
    }
    return out;
}

MatrixXd reduced_matrix_for(SubspaceStrategy strategy, const MatrixXd& D,
                            const SubspaceCaches& caches, const VectorXd& b) {
    if (strategy == SubspaceStrategy::FullSpace) {
        MatrixXd B = caches.DR + caches.DV0;
        B.noalias() += caches.DV.transpose() * b.asDiagonal() * caches.DV;
        return B;
    }
    return reduced_matrix(D, caches, b);
}

// `m` is advanced through `updatable` (the same object) when a sample is given.
IterationReport advance(EngineState& st, const MomentState& m, MomentState* updatable,
                        const Regularizer& reg, const Sample* sample, SubspaceStrategy strategy,
                        const StepOptions& options) {
    const Index N = reg.dim();
    require_dim(m.dim() == N && st.h.size() == N, "mm_step: dimension mismatch");
    IterationReport report;
    report.n = st.n;

    // Steps 1-4: r_n, c_n(h_n), D^A_{n-1}, grad F_n(h_n).
    Blend blend;
    if (sample != nullptr) {
        updatable->update_first_order(*sample);
        blend = blend_for(m, *sample);
    }
    const GradientPieces gp = recursive_gradient(st, m, reg, blend);
    // Step 5: R_n.
    if (sample != nullptr) updatable->update_second_order(*sample);

    // Step 6.
    const MatrixXd D = build_subspace(strategy, gp.grad, st.h, st.h_prev, st.n);

    // Step 7.
    std::optional<VectorXd> XXth_prev;
    if (sample != nullptr && strategy == SubspaceStrategy::MemoryGradient && D.cols() == 3) {
        XXth_prev = gp.XXtD.col(1);
    }
    SubspaceCaches caches = refresh(st, m, reg, D, strategy, blend, gp.XXth, XXth_prev);

    // Step 8.
    const MatrixXd B = reduced_matrix_for(strategy, D, caches, gp.b);

    // Coordinates of h_n in D_n.
    VectorXd e_h;
    if (strategy == SubspaceStrategy::FullSpace) {
        e_h = st.h;
    } else {
        e_h = VectorXd::Unit(D.cols(), 1);
    }

    // Step 9. An exactly stationary point is kept as is.
    VectorXd u;
    if (gp.grad.isZero(0.0)) {
        u = e_h;
        report.rank_B = reduced_solve_ranked(B, VectorXd::Zero(B.rows())).rank;
    } else {
        ReducedSolution sol = reduced_solve_equilibrated(B, D.transpose() * gp.c);
        u = std::move(sol.u);
        report.rank_B = sol.rank;
    }

    // Step 10.
    VectorXd h_next = D * u;
    if (!h_next.allFinite() || h_next.norm() > options.divergence_bound) {
        std::ostringstream os;
        os << "iterate diverged at step " << st.n << " (norm " << h_next.norm() << ")";
        throw DivergenceError(st.n, os.str());
    }

    const VectorXd delta = u - e_h;
    report.step_quadratic = delta.dot(B * delta);
    report.grad_norm = gp.grad.norm();
    report.subspace_dim = D.cols();
    if (options.compute_objective) {
        report.objective = objective_eval(m, reg, st.h);
        report.objective_next = objective_eval(m, reg, h_next);
    }

    st.h_prev = std::move(st.h);
    st.h = std::move(h_next);
    st.u_prev = std::move(u);
    st.D = D;
    st.caches = std::move(caches);
    st.grad = gp.grad;
    ++st.n;
    return report;
}

}  // namespace

VectorXd gradient_recursive(const EngineState& state, const MomentState& moments,
                            const Regularizer& reg, const Sample& sample) {
    if (!moments.second_order_pending()) {
        throw std::logic_error("gradient_recursive: moments must be advanced by the first-order half only");
    }
    return recursive_gradient(state, moments, reg, blend_for(moments, sample)).grad;
}

SubspaceCaches cache_refresh(const EngineState& state, const MomentState& moments,
                             const Regularizer& reg, const Sample& sample, const MatrixXd& D_new,
                             SubspaceStrategy strategy) {
    require_dim(D_new.rows() == reg.dim(), "cache_refresh: D rows differ from N");
    const Blend blend = blend_for(moments, sample);
    const MatrixXd& X = sample.X;
    const VectorXd XXth = X * (X.transpose() * state.h);
    std::optional<VectorXd> XXth_prev;
    if (strategy == SubspaceStrategy::MemoryGradient && D_new.cols() == 3) {
        XXth_prev = X * (X.transpose() * state.h_prev);
    }
    return refresh(state, moments, reg, D_new, strategy, blend, XXth, XXth_prev);
}

MatrixXd reduced_matrix(const MatrixXd& D, const SubspaceCaches& caches, const VectorXd& b) {
    require_dim(caches.DR.cols() == D.cols() && caches.DV.cols() == D.cols(),
                "reduced_matrix: cache width differs from subspace dimension");
    require_dim(b.size() == caches.DV.rows(), "reduced_matrix: weight length differs from P");
    MatrixXd B = D.transpose() * (caches.DR + caches.DV0);
    B.noalias() += caches.DV.transpose() * b.asDiagonal() * caches.DV;
    return B;
}

IterationReport mm_step(EngineState& state, MomentState& moments, const Regularizer& reg,
                        const Sample& sample, SubspaceStrategy strategy,
                        const StepOptions& options) {
    return advance(state, moments, &moments, reg, &sample, strategy, options);
}

IterationReport mm_step_frozen(EngineState& state, const MomentState& moments,
                               const Regularizer& reg, SubspaceStrategy strategy,
                               const StepOptions& options) {
    // initial_state assumes R_0 = 0; here R is fixed from the start.
    if (state.n == 1) {
        require_dim(moments.dim() == state.h.size(), "mm_step_frozen: dimension mismatch");
        state.caches.DR = moments.R() * state.D;
        state.caches.hR = moments.R() * state.h;
    }
    return advance(state, moments, nullptr, reg, nullptr, strategy, options);
}

double majorant_eval(const MomentState& moments, const Regularizer& reg, const VectorXd& anchor,
                     const VectorXd& h) {
    require_dim(anchor.size() == reg.dim() && h.size() == reg.dim(), "majorant_eval: dimension mismatch");
    const VectorXd d = h - anchor;
    const MatrixXd A = metric_matrix(moments, reg, anchor);
    return objective_eval(moments, reg, anchor) + gradient_direct(moments, reg, anchor).dot(d) +
           0.5 * d.dot(A * d);
}

OnlineEstimator::OnlineEstimator(Regularizer reg, Index q, double vartheta,
                                 SubspaceStrategy strategy, const VectorXd& h1)
    : reg_(std::move(reg)),
      moments_(reg_.dim(), q, vartheta),
      state_(initial_state(reg_, h1)),
      strategy_(strategy) {}

IterationReport OnlineEstimator::step(const Sample& sample, const StepOptions& options) {
    return mm_step(state_, moments_, reg_, sample, strategy_, options);
}

}  // namespace smm
