#include "smm/harness/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "smm/errors.hpp"

namespace smm::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Separable Gaussian smoothing with zero padding.
MatrixXd gaussian_smooth(const MatrixXd& in, double sigma_px) {
    const Index radius = static_cast<Index>(std::ceil(3.0 * sigma_px));
    VectorXd taps(2 * radius + 1);
    for (Index t = -radius; t <= radius; ++t) {
        taps(t + radius) = std::exp(-0.5 * (t * t) / (sigma_px * sigma_px));
    }
    taps /= taps.sum();
    const Index rows = in.rows();
    const Index cols = in.cols();
    MatrixXd tmp = MatrixXd::Zero(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (Index t = -radius; t <= radius; ++t) {
                const Index jj = j + t;
                if (jj >= 0 && jj < cols) acc += taps(t + radius) * in(i, jj);
            }
            tmp(i, j) = acc;
        }
    }
    MatrixXd out = MatrixXd::Zero(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (Index t = -radius; t <= radius; ++t) {
                const Index ii = i + t;
                if (ii >= 0 && ii < rows) acc += taps(t + radius) * tmp(ii, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace

Deconv2dProblem Deconv2dProblem::generate(std::uint64_t seed, Index image_size, Index kernel_size,
                                          double sigma, Index block_size) {
    if (kernel_size <= 0 || kernel_size % 2 == 0) {
        throw std::invalid_argument("deconv2d: kernel size must be odd and positive");
    }
    if (image_size < kernel_size) {
        throw std::invalid_argument("deconv2d: image size must be at least the kernel size");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MatrixXd raw(image_size, image_size);
    for (Index i = 0; i < image_size; ++i) {
        for (Index j = 0; j < image_size; ++j) raw(i, j) = unit(rng);
    }
    MatrixXd image = gaussian_smooth(raw, 1.0);
    const double lo = image.minCoeff();
    const double hi = image.maxCoeff();
    image = (image.array() - lo) / (hi - lo);

    // Rotated anisotropic Gaussian kernel.
    const double s1 = (0.15 + 0.15 * unit(rng)) * kernel_size;
    const double s2 = (0.15 + 0.15 * unit(rng)) * kernel_size;
    const double theta = kPi * unit(rng);
    const Index c = kernel_size / 2;
    MatrixXd kernel(kernel_size, kernel_size);
    for (Index a = 0; a < kernel_size; ++a) {
        for (Index b = 0; b < kernel_size; ++b) {
            const double dx = static_cast<double>(a - c);
            const double dy = static_cast<double>(b - c);
            const double p = std::cos(theta) * dx + std::sin(theta) * dy;
            const double q = -std::sin(theta) * dx + std::cos(theta) * dy;
            kernel(a, b) = std::exp(-0.5 * (p * p / (s1 * s1) + q * q / (s2 * s2)));
        }
    }
    kernel /= kernel.sum();
    return Deconv2dProblem(std::move(image), std::move(kernel), sigma, block_size, rng());
}

Deconv2dProblem::Deconv2dProblem(MatrixXd image, MatrixXd kernel, double sigma, Index block_size,
                                 std::uint64_t seed)
    : image_(std::move(image)), kernel_(std::move(kernel)), block_size_(block_size) {
    const Index K = kernel_.rows();
    if (K != kernel_.cols() || K % 2 == 0) throw std::invalid_argument("deconv2d: kernel must be square with odd size");
    if (image_.rows() < K || image_.cols() < K) {
        throw std::invalid_argument("deconv2d: image smaller than kernel");
    }
    if (block_size_ <= 0 || block_size_ > image_.size()) {
        throw std::invalid_argument("deconv2d: block size must lie in [1, number of pixels]");
    }
    if (!(sigma >= 0.0)) throw std::invalid_argument("deconv2d: noise level must be nonnegative");
    const Index rows = image_.rows();
    const Index cols = image_.cols();
    const Index c = K / 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    observed_.resize(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (Index a = 0; a < K; ++a) {
                const Index ii = i - a + c;
                if (ii < 0 || ii >= rows) continue;
                for (Index b = 0; b < K; ++b) {
                    const Index jj = j - b + c;
                    if (jj < 0 || jj >= cols) continue;
                    acc += kernel_(a, b) * image_(ii, jj);
                }
            }
            observed_(i, j) = acc;
        }
    }
    if (sigma > 0.0) {
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) observed_(i, j) += sigma * normal(rng);
        }
    }
}

VectorXd Deconv2dProblem::kernel_vector() const {
    const Index K = kernel_.rows();
    VectorXd h(K * K);
    for (Index a = 0; a < K; ++a) {
        for (Index b = 0; b < K; ++b) h(a * K + b) = kernel_(a, b);
    }
    return h;
}

VectorXd Deconv2dProblem::patch(Index i, Index j) const {
    const Index K = kernel_.rows();
    const Index c = K / 2;
    VectorXd p = VectorXd::Zero(K * K);
    for (Index a = 0; a < K; ++a) {
        const Index ii = i - a + c;
        if (ii < 0 || ii >= image_.rows()) continue;
        for (Index b = 0; b < K; ++b) {
            const Index jj = j - b + c;
            if (jj < 0 || jj >= image_.cols()) continue;
            p(a * K + b) = image_(ii, jj);
        }
    }
    return p;
}

Sample Deconv2dProblem::sample(Index k) const {
    if (k < 0 || k >= size()) throw std::out_of_range("deconv2d: sample index out of range");
    Sample s{MatrixXd(dim(), block_size_), VectorXd(block_size_)};
    const Index cols = image_.cols();
    for (Index q = 0; q < block_size_; ++q) {
        const Index pixel = k * block_size_ + q;
        const Index i = pixel / cols;
        const Index j = pixel % cols;
        s.X.col(q) = patch(i, j);
        s.y(q) = observed_(i, j);
    }
    return s;
}

AdaptiveFilterProblem AdaptiveFilterProblem::generate(std::uint64_t seed, Index N, Index L,
                                                      double noise_var, Index change_point,
                                                      Index nonzero_taps) {
    if (N <= 0 || L <= 0 || N > L) throw std::invalid_argument("adaptive: need 0 < N <= L");
    if (!(noise_var >= 0.0)) throw std::invalid_argument("adaptive: noise variance must be nonnegative");
    if (nonzero_taps <= 0 || nonzero_taps > N) {
        throw std::invalid_argument("adaptive: nonzero tap count must lie in [1, N]");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto sparse_filter = [&]() {
        std::vector<Index> positions(N);
        std::iota(positions.begin(), positions.end(), Index{0});
        std::shuffle(positions.begin(), positions.end(), rng);
        VectorXd h = VectorXd::Zero(N);
        for (Index t = 0; t < nonzero_taps; ++t) {
            const double magnitude = 0.1 + 0.9 * unit(rng);
            h(positions[t]) = coin(rng) ? magnitude : -magnitude;
        }
        return h;
    };

    AdaptiveFilterProblem p;
    p.h_first_ = sparse_filter();
    p.h_second_ = sparse_filter();
    p.change_point_ = change_point;
    p.x_.resize(L + N - 1);
    for (Index t = 0; t < p.x_.size(); ++t) p.x_(t) = coin(rng) ? 1.0 : -1.0;
    p.y_.resize(L);
    const double noise_sd = std::sqrt(noise_var);
    for (Index k = 0; k < L; ++k) {
        const VectorXd& h = (k + 1 <= change_point) ? p.h_first_ : p.h_second_;
        p.y_(k) = p.x_.segment(k, N).dot(h) + noise_sd * normal(rng);
    }
    return p;
}

Sample AdaptiveFilterProblem::sample(Index k) const {
    if (k < 0 || k >= size()) throw std::out_of_range("adaptive: sample index out of range");
    Sample s{MatrixXd(dim(), 1), VectorXd(1)};
    s.X.col(0) = x_.segment(k, dim());
    s.y(0) = y_(k);
    return s;
}

VectorXd AdaptiveFilterProblem::truth(Index k) const {
    return (k + 1 <= change_point_) ? h_first_ : h_second_;
}

SyntheticProblem SyntheticProblem::generate(std::uint64_t seed, Index N, Index Q, Index L,
                                            double noise_sigma) {
    if (N <= 0 || Q <= 0 || L <= 0) throw std::invalid_argument("synthetic: sizes must be positive");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("synthetic: noise level must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SyntheticProblem p;
    p.truth_.resize(N);
    for (Index i = 0; i < N; ++i) p.truth_(i) = normal(rng);
    p.samples_.reserve(L);
    for (Index k = 0; k < L; ++k) {
        Sample s{MatrixXd(N, Q), VectorXd(Q)};
        for (Index q = 0; q < Q; ++q) {
            for (Index i = 0; i < N; ++i) s.X(i, q) = normal(rng);
        }
        s.y = s.X.transpose() * p.truth_;
        for (Index q = 0; q < Q; ++q) s.y(q) += noise_sigma * normal(rng);
        p.samples_.push_back(std::move(s));
    }
    return p;
}

RecordedStream::RecordedStream(std::vector<Sample> samples, VectorXd truth)
    : samples_(std::move(samples)), truth_(std::move(truth)) {
    if (samples_.empty()) throw std::invalid_argument("recorded stream: no samples");
    const Index N = samples_.front().X.rows();
    const Index Q = samples_.front().X.cols();
    for (const Sample& s : samples_) {
        require_dim(s.X.rows() == N && s.X.cols() == Q && s.y.size() == Q,
                    "recorded stream: inconsistent sample shapes");
    }
    require_dim(truth_.size() == 0 || truth_.size() == N, "recorded stream: truth length differs from N");
}

}  // namespace smm::harness
