#pragma once

#include <variant>
#include <vector>

#include "smm/penalties.hpp"
#include "smm/types.hpp"

namespace smm {

/// Quadratic-plus-linear part 1/2 h'V0 h - v0'h of the regularizer.
///
/// V0 is either a scaled identity tau*I or a dense symmetric PSD matrix. The
/// dense form is checked at construction: symmetric to 1e-12 relative and
/// with smallest eigenvalue >= -1e-10 * ||V0||.
class ElasticNet {
  public:
    static ElasticNet zero(Index n);
    static ElasticNet scaled_identity(Index n, double tau, VectorXd v0 = VectorXd());
    static ElasticNet dense(MatrixXd V0, VectorXd v0 = VectorXd());

    Index dim() const { return n_; }
    bool is_scaled_identity() const { return std::holds_alternative<double>(V0_); }
    /// Only meaningful when is_scaled_identity().
    double tau() const;
    const VectorXd& v0() const { return v0_; }

    VectorXd apply(const VectorXd& x) const;
    MatrixXd apply(const MatrixXd& x) const;
    MatrixXd matrix() const;
    double value(const VectorXd& h) const;

  private:
    ElasticNet(Index n, std::variant<double, MatrixXd> V0, VectorXd v0);

    Index n_ = 0;
    std::variant<double, MatrixXd> V0_;
    VectorXd v0_;
};

/// One term psi_s(||V_s h - v_s||).
struct PenaltyBlock {
    SparseRowMatrix V;  // P_s x N
    VectorXd v;         // P_s
    PenaltySpec spec;

    static PenaltyBlock dense(const MatrixXd& V, VectorXd v, PenaltySpec spec);
};

/// Psi(h) = 1/2 h'V0 h - v0'h + sum_s psi_s(||V_s h - v_s||).
///
/// The block operators are stacked row-wise into V (P x N) and v (P) in block
/// order; block s occupies rows [offset(s), offset(s) + P_s).
class Regularizer {
  public:
    Regularizer(ElasticNet quadratic, std::vector<PenaltyBlock> blocks);
    static Regularizer zero(Index n) { return Regularizer(ElasticNet::zero(n), {}); }

    Index dim() const { return quadratic_.dim(); }
    Index num_blocks() const { return static_cast<Index>(specs_.size()); }
    Index penalty_rows() const { return V_.rows(); }

    const ElasticNet& quadratic() const { return quadratic_; }
    const SparseRowMatrix& V() const { return V_; }
    const VectorXd& v() const { return v_; }
    const PenaltySpec& spec(Index s) const { return specs_[s]; }
    Index block_offset(Index s) const { return offsets_[s]; }
    Index block_rows(Index s) const { return offsets_[s + 1] - offsets_[s]; }

  private:
    ElasticNet quadratic_;
    SparseRowMatrix V_;
    VectorXd v_;
    std::vector<PenaltySpec> specs_;
    std::vector<Index> offsets_;
};

/// b(h): nu_s(||V_s h - v_s||) replicated P_s times, concatenated in block order.
VectorXd weight_vector(const Regularizer& reg, const VectorXd& h);

/// Same as weight_vector but from a precomputed stacked residual z = V h - v.
VectorXd weights_from_residual(const Regularizer& reg, const VectorXd& z);

double regularizer_value(const Regularizer& reg, const VectorXd& h);

/// grad Psi(h) = V0 h - v0 + V' Diag(b(h)) (V h - v).
VectorXd regularizer_gradient(const Regularizer& reg, const VectorXd& h);

}  // namespace smm
