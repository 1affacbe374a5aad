#include "smm/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "smm/errors.hpp"

namespace smm {

MomentState::MomentState(Index n, Index q, double vartheta)
    : q_(q), vartheta_(vartheta), r_(VectorXd::Zero(n)), R_(MatrixXd::Zero(n, n)) {
    if (n <= 0 || q <= 0) throw std::invalid_argument("moments: N and Q must be positive");
    if (!(vartheta > 0.0 && vartheta <= 1.0)) {
        throw std::invalid_argument("moments: forgetting factor must lie in (0, 1]");
    }
}

MomentState MomentState::from_statistics(double rho, VectorXd r, MatrixXd R, Index count,
                                         double vartheta) {
    require_dim(R.rows() == r.size() && R.cols() == r.size(), "moments: R must be N x N");
    if (count < 1) throw std::invalid_argument("moments: count must be at least 1");
    if ((R - R.transpose()).norm() > 1e-12 * (1.0 + R.norm())) {
        throw std::invalid_argument("moments: R is not symmetric");
    }
    MomentState m(r.size(), 1, vartheta);
    m.count_ = count;
    m.vartheta_bar_ = 0.0;
    for (Index k = 0; k < count; ++k) m.vartheta_bar_ = 1.0 + vartheta * m.vartheta_bar_;
    m.rho_ = rho;
    m.r_ = std::move(r);
    m.R_ = 0.5 * (R + R.transpose());
    return m;
}

void MomentState::check_sample(const Sample& sample) const {
    require_dim(sample.X.rows() == dim(), "moments: sample X has wrong row count (N)");
    require_dim(sample.X.cols() == q_, "moments: sample X has wrong column count (Q)");
    require_dim(sample.y.size() == q_, "moments: sample y has wrong length (Q)");
}

void MomentState::update_first_order(const Sample& sample) {
    check_sample(sample);
    if (pending_) throw std::logic_error("moments: second-order update still pending");
    ++count_;
    // Running form of vbar_n = (1 - vartheta^n) / (1 - vartheta); avoids vartheta^n underflow.
    vartheta_bar_ = 1.0 + vartheta_ * vartheta_bar_;
    const double g = 1.0 / vartheta_bar_;
    rho_ += g * (sample.y.squaredNorm() - rho_);
    r_ += g * (sample.X * sample.y - r_);
    pending_ = true;
}

void MomentState::update_second_order(const Sample& sample) {
    check_sample(sample);
    if (!pending_) throw std::logic_error("moments: second-order update without first-order half");
    const double g = 1.0 / vartheta_bar_;
    const Index n = dim();
    R_.triangularView<Eigen::Lower>() *= (1.0 - g);
    R_.selfadjointView<Eigen::Lower>().rankUpdate(sample.X, g);
    for (Index j = 1; j < n; ++j) {
        R_.col(j).head(j) = R_.row(j).head(j).transpose();
    }
    pending_ = false;
}

void MomentState::update(const Sample& sample) {
    update_first_order(sample);
    update_second_order(sample);
}

double objective_eval(const MomentState& m, const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == m.dim() && reg.dim() == m.dim(), "objective_eval: dimension mismatch");
    return 0.5 * m.rho() - m.r().dot(h) + 0.5 * h.dot(m.R() * h) + regularizer_value(reg, h);
}

VectorXd c_vector(const MomentState& m, const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == m.dim() && reg.dim() == m.dim(), "c_vector: dimension mismatch");
    const VectorXd b = weight_vector(reg, h);
    VectorXd c = m.r() + reg.quadratic().v0();
    c.noalias() += reg.V().transpose() * b.cwiseProduct(reg.v());
    return c;
}

MatrixXd metric_matrix(const MomentState& m, const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == m.dim() && reg.dim() == m.dim(), "metric_matrix: dimension mismatch");
    const VectorXd b = weight_vector(reg, h);
    MatrixXd A = m.R() + reg.quadratic().matrix();
    const SparseRowMatrix weighted = b.asDiagonal() * reg.V();
    A += MatrixXd(SparseRowMatrix(reg.V().transpose()) * weighted);
    return 0.5 * (A + A.transpose());
}

VectorXd gradient_direct(const MomentState& m, const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == m.dim() && reg.dim() == m.dim(), "gradient_direct: dimension mismatch");
    const VectorXd b = weight_vector(reg, h);
    VectorXd g = m.R() * h - m.r() + reg.quadratic().apply(h) - reg.quadratic().v0();
    g.noalias() += reg.V().transpose() * b.cwiseProduct(reg.V() * h - reg.v());
    return g;
}

}  // namespace smm
