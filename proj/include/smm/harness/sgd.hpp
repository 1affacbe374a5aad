#pragma once

#include "smm/moments.hpp"
#include "smm/regularizer.hpp"

namespace smm::harness {

/// Gradient of 1/2 ||y - X'h||^2 + Psi(h) at h for one sample block.
VectorXd instantaneous_gradient(const Regularizer& reg, const Sample& sample, const VectorXd& h);

/// h - (step_scale / sqrt(n)) g, n >= 1.
VectorXd sgd_step(const VectorXd& h, const VectorXd& grad_sample, double step_scale, Index n);

/// ||h_est - h_true|| / ||h_true||. Throws std::invalid_argument on a zero truth.
double metric_nrmse(const VectorXd& h_est, const VectorXd& h_true);

}  // namespace smm::harness
