#include "smm/harness/sgd.hpp"

#include <cmath>
#include <stdexcept>

#include "smm/errors.hpp"

namespace smm::harness {

VectorXd instantaneous_gradient(const Regularizer& reg, const Sample& sample, const VectorXd& h) {
    require_dim(sample.X.rows() == h.size() && sample.y.size() == sample.X.cols(),
                "instantaneous_gradient: sample shape mismatch");
    const VectorXd residual = sample.y - sample.X.transpose() * h;
    return regularizer_gradient(reg, h) - sample.X * residual;
}

VectorXd sgd_step(const VectorXd& h, const VectorXd& grad_sample, double step_scale, Index n) {
    require_dim(h.size() == grad_sample.size(), "sgd_step: gradient length differs from N");
    if (!(step_scale > 0.0)) throw std::invalid_argument("sgd_step: step scale must be positive");
    if (n < 1) throw std::invalid_argument("sgd_step: n must be at least 1");
    return h - (step_scale / std::sqrt(static_cast<double>(n))) * grad_sample;
}

double metric_nrmse(const VectorXd& h_est, const VectorXd& h_true) {
    require_dim(h_est.size() == h_true.size(), "metric_nrmse: length mismatch");
    const double scale = h_true.norm();
    if (!(scale > 0.0)) throw std::invalid_argument("metric_nrmse: ground truth has zero norm");
    return (h_est - h_true).norm() / scale;
}

}  // namespace smm::harness
