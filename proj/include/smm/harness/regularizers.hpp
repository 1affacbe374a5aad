#pragma once

#include "smm/regularizer.hpp"

namespace smm::harness {

/// Isotropic smoothness prior on a rows x cols kernel stored row-major
/// (index i*cols + j). One block per pixel with P_s = 2:
///   V_s h = [h(i, j+1) - h(i, j), h(i+1, j) - h(i, j)]',
/// where a difference leaving the kernel is an all-zero row. Every block uses
/// the L2Lkappa-power penalty with the given kappa; V0 = tau I, v0 = 0.
Regularizer build_isotropic_tv_regularizer(Index rows, Index cols, double lambda, double delta,
                                           double tau = 1e-10, double kappa = 1.0);

/// Coordinatewise Welsch penalty sum_s lambda (1 - exp(-h_s^2 / (2 delta^2))), V0 = 0.
Regularizer build_sparsity_regularizer(Index n, double lambda, double delta);

/// One scalar block per coordinate with an arbitrary penalty, V0 = tau I.
Regularizer build_coordinate_regularizer(Index n, const PenaltySpec& spec, double tau = 0.0);

}  // namespace smm::harness
