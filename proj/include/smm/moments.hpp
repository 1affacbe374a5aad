#pragma once

#include "smm/regularizer.hpp"
#include "smm/types.hpp"

namespace smm {

/// One observation block: X is N x Q, y has length Q.
struct Sample {
    MatrixXd X;
    VectorXd y;
};

/// Exponentially weighted second-order statistics of the sample stream:
///
///   rho_n = sum_k w_k ||y_k||^2,  r_n = sum_k w_k X_k y_k,  R_n = sum_k w_k X_k X_k'
///
/// with w_k = vartheta^(n-k) / vbar_n and vbar_n = sum_{k<n} vartheta^k. Updates
/// use the convex recursion s <- s + (new - s) / vbar_n, which starts from zero
/// statistics and keeps R symmetric PSD.
///
/// An update is split in two halves so that a caller can read r_n before R_n
/// moves: update_first_order() advances n, vbar, rho and r; the matching
/// update_second_order() then advances R. update() does both.
class MomentState {
  public:
    MomentState(Index n, Index q, double vartheta = 1.0);

    /// Statistics supplied directly (e.g. a frozen batch problem). R must be
    /// symmetric to 1e-12 relative; count >= 1.
    static MomentState from_statistics(double rho, VectorXd r, MatrixXd R, Index count = 1,
                                       double vartheta = 1.0);

    void update(const Sample& sample);
    void update_first_order(const Sample& sample);
    void update_second_order(const Sample& sample);

    Index dim() const { return r_.size(); }
    Index block_size() const { return q_; }
    Index count() const { return count_; }
    double vartheta() const { return vartheta_; }
    double vartheta_bar() const { return vartheta_bar_; }
    /// 1 / vbar_n: weight of the newest sample.
    double gain() const { return count_ == 0 ? 0.0 : 1.0 / vartheta_bar_; }
    double rho() const { return rho_; }
    const VectorXd& r() const { return r_; }
    /// Dense symmetric; both triangles are kept in sync.
    const MatrixXd& R() const { return R_; }
    bool second_order_pending() const { return pending_; }

  private:
    void check_sample(const Sample& sample) const;

    Index q_;
    double vartheta_;
    Index count_ = 0;
    double vartheta_bar_ = 0.0;
    double rho_ = 0.0;
    VectorXd r_;
    MatrixXd R_;
    bool pending_ = false;
};

/// F_n(h) = 1/2 rho_n - r_n'h + 1/2 h'R_n h + Psi(h).
double objective_eval(const MomentState& m, const Regularizer& reg, const VectorXd& h);

/// c_n(h) = r_n + v0 + V' Diag(b(h)) v.
VectorXd c_vector(const MomentState& m, const Regularizer& reg, const VectorXd& h);

/// A_n(h) = R_n + V0 + V' Diag(b(h)) V, materialized densely. O(N^2) memory.
MatrixXd metric_matrix(const MomentState& m, const Regularizer& reg, const VectorXd& h);

/// grad F_n(h) = A_n(h) h - c_n(h), assembled from R_n without any caches.
VectorXd gradient_direct(const MomentState& m, const Regularizer& reg, const VectorXd& h);

}  // namespace smm
