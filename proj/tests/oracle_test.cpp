#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "smm/errors.hpp"
#include "smm/oracle.hpp"
#include "test_support.hpp"

namespace smm {
namespace {

using testing::random_vector;

MomentState moments_for(std::mt19937_64& rng, Index N, Index count, double noise = 0.2) {
    const VectorXd truth = random_vector(rng, N);
    MomentState m(N, 2);
    for (const Sample& s : testing::random_stream(rng, N, 2, count, truth, noise)) m.update(s);
    return m;
}

TEST(Oracle, ClosedFormSolvesNormalEquations) {
    std::mt19937_64 rng(51);
    const MomentState m = moments_for(rng, 7, 20);
    const ElasticNet en = ElasticNet::scaled_identity(7, 0.1, random_vector(rng, 7));
    const VectorXd h = quadratic_closed_form(m, en);
    const VectorXd residual = m.R() * h + 0.1 * h - m.r() - en.v0();
    EXPECT_LT(residual.norm(), 1e-13 * (1 + m.r().norm()));
}

TEST(Oracle, ClosedFormNeedsPositiveDefinite) {
    std::mt19937_64 rng(52);
    const MomentState m = moments_for(rng, 8, 2);  // rank 4 at most
    EXPECT_THROW(quadratic_closed_form(m, ElasticNet::zero(8)), PreconditionError);
    EXPECT_LT(min_eigenvalue_R_plus_V0(m, Regularizer::zero(8)), 1e-10);
}

TEST(Oracle, HalfQuadraticReachesStationaryPoint) {
    std::mt19937_64 rng(53);
    for (PenaltyKind kind : kAllPenaltyKinds) {
        SCOPED_TRACE(penalty_name(kind));
        const MomentState m = moments_for(rng, 6, 30);
        const Regularizer reg = testing::random_regularizer(rng, 6, kind, 0.01);
        const BatchSolution sol = batch_half_quadratic(m, reg, VectorXd::Zero(6), 1e-10);
        EXPECT_LE(sol.grad_norm, 1e-10);
        EXPECT_LE(gradient_direct(m, reg, sol.h_star).norm(), 1e-10);
        EXPECT_EQ(sol.objective_history.size(), static_cast<std::size_t>(sol.iterations + 1));
        for (std::size_t k = 1; k < sol.objective_history.size(); ++k) {
            EXPECT_LE(sol.objective_history[k],
                      sol.objective_history[k - 1] + 1e-13 * (1 + std::abs(sol.objective_history[k - 1])));
        }
    }
}

// Convex objective in one dimension: compare with a bisection on the derivative.
TEST(Oracle, ScalarConvexMinimizer) {
    const MomentState m = MomentState::from_statistics(4.0, VectorXd::Constant(1, 1.7), MatrixXd::Constant(1, 1, 0.9));
    std::vector<PenaltyBlock> blocks{PenaltyBlock::dense(MatrixXd::Ones(1, 1), VectorXd::Constant(1, 0.4),
                                                         make_penalty(PenaltyKind::L2L1Log, 0.6, 0.2))};
    const Regularizer reg(ElasticNet::scaled_identity(1, 0.05), blocks);
    auto deriv = [&](double x) { return gradient_direct(m, reg, VectorXd::Constant(1, x))(0); };
    double lo = -10.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0 ? hi : lo) = mid;
    }
    const BatchSolution sol = batch_half_quadratic(m, reg, VectorXd::Zero(1), 1e-12);
    EXPECT_NEAR(sol.h_star(0), 0.5 * (lo + hi), 1e-11);
}

TEST(Oracle, ConvexMinimizerIndependentOfStart) {
    std::mt19937_64 rng(54);
    const MomentState m = moments_for(rng, 10, 40);
    const Regularizer reg = testing::random_regularizer(rng, 10, PenaltyKind::Huber, 1e-3);
    const VectorXd a = batch_half_quadratic(m, reg, VectorXd::Zero(10)).h_star;
    const VectorXd b = batch_half_quadratic(m, reg, random_vector(rng, 10, 5.0)).h_star;
    EXPECT_LT((a - b).norm(), 1e-9 * (1 + a.norm()));
}

TEST(Oracle, ReportsNonConvergence) {
    std::mt19937_64 rng(55);
    const MomentState m = moments_for(rng, 6, 30);
    const Regularizer reg = testing::random_regularizer(rng, 6, PenaltyKind::Welsch, 1e-3);
    try {
        batch_half_quadratic(m, reg, random_vector(rng, 6, 3.0), 1e-14, 1);
        FAIL() << "expected OracleNotConverged";
    } catch (const OracleNotConverged& e) {
        EXPECT_EQ(e.last().iterations, 1);
        EXPECT_EQ(e.last().objective_history.size(), 2u);
    }
}

TEST(Oracle, RequiresPositiveDefiniteQuadraticPart) {
    std::mt19937_64 rng(56);
    const MomentState m = moments_for(rng, 8, 1);
    EXPECT_THROW(batch_half_quadratic(m, testing::random_regularizer(rng, 8, PenaltyKind::Huber, 0.0),
                                      VectorXd::Zero(8)),
                 PreconditionError);
    EXPECT_THROW(batch_half_quadratic(m, Regularizer::zero(8), VectorXd::Zero(7)), DimensionError);
}

}  // namespace
}  // namespace smm
