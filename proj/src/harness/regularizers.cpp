#include "smm/harness/regularizers.hpp"

#include <stdexcept>
#include <vector>

namespace smm::harness {

Regularizer build_isotropic_tv_regularizer(Index rows, Index cols, double lambda, double delta,
                                           double tau, double kappa) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("tv regularizer: sizes must be positive");
    if (!(tau >= 0.0)) throw std::invalid_argument("tv regularizer: tau must be nonnegative");
    const PenaltySpec spec = make_penalty(PenaltyKind::L2LkappaPower, lambda, delta, kappa);
    const Index n = rows * cols;
    std::vector<PenaltyBlock> blocks;
    blocks.reserve(n);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const Index s = i * cols + j;
            std::vector<Eigen::Triplet<double>> t;
            if (j + 1 < cols) {
                t.emplace_back(0, s + 1, 1.0);
                t.emplace_back(0, s, -1.0);
            }
            if (i + 1 < rows) {
                t.emplace_back(1, s + cols, 1.0);
                t.emplace_back(1, s, -1.0);
            }
            SparseRowMatrix V(2, n);
            V.setFromTriplets(t.begin(), t.end());
            blocks.push_back(PenaltyBlock{std::move(V), VectorXd::Zero(2), spec});
        }
    }
    return Regularizer(ElasticNet::scaled_identity(n, tau), std::move(blocks));
}

Regularizer build_sparsity_regularizer(Index n, double lambda, double delta) {
    return build_coordinate_regularizer(n, make_penalty(PenaltyKind::Welsch, lambda, delta), 0.0);
}

Regularizer build_coordinate_regularizer(Index n, const PenaltySpec& spec, double tau) {
    if (n <= 0) throw std::invalid_argument("coordinate regularizer: size must be positive");
    if (!(tau >= 0.0)) throw std::invalid_argument("coordinate regularizer: tau must be nonnegative");
    spec.validate();
    std::vector<PenaltyBlock> blocks;
    blocks.reserve(n);
    for (Index s = 0; s < n; ++s) {
        SparseRowMatrix V(1, n);
        V.insert(0, s) = 1.0;
        V.makeCompressed();
        blocks.push_back(PenaltyBlock{std::move(V), VectorXd::Zero(1), spec});
    }
    return Regularizer(ElasticNet::scaled_identity(n, tau), std::move(blocks));
}

}  // namespace smm::harness
