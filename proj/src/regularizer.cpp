#include "smm/regularizer.hpp"

#include <cmath>
#include <string>

#include "smm/errors.hpp"

namespace smm {

ElasticNet::ElasticNet(Index n, std::variant<double, MatrixXd> V0, VectorXd v0)
    : n_(n), V0_(std::move(V0)), v0_(std::move(v0)) {
    if (v0_.size() == 0) v0_ = VectorXd::Zero(n_);
    require_dim(v0_.size() == n_, "elastic net: v0 length differs from N");
}

ElasticNet ElasticNet::zero(Index n) { return ElasticNet(n, 0.0, VectorXd::Zero(n)); }

ElasticNet ElasticNet::scaled_identity(Index n, double tau, VectorXd v0) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("elastic net: tau must be finite and nonnegative");
    }
    return ElasticNet(n, tau, std::move(v0));
}

ElasticNet ElasticNet::dense(MatrixXd V0, VectorXd v0) {
    require_dim(V0.rows() == V0.cols(), "elastic net: V0 must be square");
    const double scale = V0.norm();
    if ((V0 - V0.transpose()).norm() > 1e-12 * (1.0 + scale)) {
        throw std::invalid_argument("elastic net: V0 is not symmetric");
    }
    if (V0.size() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(V0, Eigen::EigenvaluesOnly);
        const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
        if (eig.eigenvalues().minCoeff() < -1e-10 * largest) {
            throw std::invalid_argument("elastic net: V0 is not positive semidefinite");
        }
    }
    const Index n = V0.rows();
    return ElasticNet(n, std::move(V0), std::move(v0));
}

double ElasticNet::tau() const {
    if (const double* t = std::get_if<double>(&V0_)) return *t;
    return 0.0;
}

VectorXd ElasticNet::apply(const VectorXd& x) const {
    require_dim(x.size() == n_, "elastic net: operand length differs from N");
    if (const double* t = std::get_if<double>(&V0_)) return *t * x;
    return std::get<MatrixXd>(V0_) * x;
}

MatrixXd ElasticNet::apply(const MatrixXd& x) const {
    require_dim(x.rows() == n_, "elastic net: operand rows differ from N");
    if (const double* t = std::get_if<double>(&V0_)) return *t * x;
    return std::get<MatrixXd>(V0_) * x;
}

MatrixXd ElasticNet::matrix() const {
    if (const double* t = std::get_if<double>(&V0_)) return *t * MatrixXd::Identity(n_, n_);
    return std::get<MatrixXd>(V0_);
}

double ElasticNet::value(const VectorXd& h) const {
    return 0.5 * h.dot(apply(h)) - v0_.dot(h);
}

PenaltyBlock PenaltyBlock::dense(const MatrixXd& V, VectorXd v, PenaltySpec spec) {
    return PenaltyBlock{V.sparseView(), std::move(v), spec};
}

Regularizer::Regularizer(ElasticNet quadratic, std::vector<PenaltyBlock> blocks)
    : quadratic_(std::move(quadratic)) {
    const Index n = quadratic_.dim();
    offsets_.reserve(blocks.size() + 1);
    offsets_.push_back(0);
    Index p = 0;
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t s = 0; s < blocks.size(); ++s) {
        const PenaltyBlock& b = blocks[s];
        const std::string tag = "regularizer block " + std::to_string(s);
        require_dim(b.V.cols() == n, tag + ": V_s column count differs from N");
        require_dim(b.v.size() == b.V.rows(), tag + ": v_s length differs from P_s");
        b.spec.validate();
        for (Index i = 0; i < b.V.outerSize(); ++i) {
            for (SparseRowMatrix::InnerIterator it(b.V, i); it; ++it) {
                triplets.emplace_back(p + it.row(), it.col(), it.value());
            }
        }
        p += b.V.rows();
        offsets_.push_back(p);
        specs_.push_back(b.spec);
    }
    V_.resize(p, n);
    V_.setFromTriplets(triplets.begin(), triplets.end());
    V_.makeCompressed();
    v_.resize(p);
    for (std::size_t s = 0; s < blocks.size(); ++s) {
        v_.segment(offsets_[s], blocks[s].v.size()) = blocks[s].v;
    }
}

VectorXd weights_from_residual(const Regularizer& reg, const VectorXd& z) {
    require_dim(z.size() == reg.penalty_rows(), "weights: residual length differs from P");
    VectorXd b(z.size());
    for (Index s = 0; s < reg.num_blocks(); ++s) {
        const Index off = reg.block_offset(s);
        const Index rows = reg.block_rows(s);
        const double t = z.segment(off, rows).norm();
        b.segment(off, rows).setConstant(nu_eval(reg.spec(s), t));
    }
    return b;
}

VectorXd weight_vector(const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == reg.dim(), "weight_vector: h length differs from N");
    return weights_from_residual(reg, reg.V() * h - reg.v());
}

double regularizer_value(const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == reg.dim(), "regularizer_value: h length differs from N");
    double value = reg.quadratic().value(h);
    const VectorXd z = reg.V() * h - reg.v();
    for (Index s = 0; s < reg.num_blocks(); ++s) {
        value += psi_eval(reg.spec(s), z.segment(reg.block_offset(s), reg.block_rows(s)).norm());
    }
    return value;
}

VectorXd regularizer_gradient(const Regularizer& reg, const VectorXd& h) {
    require_dim(h.size() == reg.dim(), "regularizer_gradient: h length differs from N");
    const VectorXd z = reg.V() * h - reg.v();
    const VectorXd b = weights_from_residual(reg, z);
    VectorXd g = reg.quadratic().apply(h) - reg.quadratic().v0();
    g.noalias() += reg.V().transpose() * b.cwiseProduct(z);
    return g;
}

}  // namespace smm
