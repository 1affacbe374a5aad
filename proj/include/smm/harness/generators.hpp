#pragma once

#include <cstdint>
#include <vector>

#include "smm/moments.hpp"
#include "smm/types.hpp"

namespace smm::harness {

/// Random-access stream of observation blocks with (optional) ground truth.
class SampleStream {
  public:
    virtual ~SampleStream() = default;
    virtual Index dim() const = 0;
    virtual Index block_size() const = 0;
    virtual Index size() const = 0;
    /// k is 0-based; sample k is the (k+1)-th observation block.
    virtual Sample sample(Index k) const = 0;
    /// Truth in force at sample k; empty when unknown.
    virtual VectorXd truth(Index k) const = 0;
};

/// 2D blur-kernel identification: y = x * h + w with zero-padded "same"
/// convolution on a rows x cols image and a K x K kernel (K odd).
///
/// Output pixel (i, j) contributes the row
///   X'(i,j)[a*K + b] = x(i - a + c, j - b + c),  c = K / 2,
/// (zero outside the image), so y(i, j) = X'(i,j) h + w(i, j). Blocks take Q
/// consecutive output pixels in raster order; a trailing partial block is dropped.
class Deconv2dProblem : public SampleStream {
  public:
    /// Smooth random image and smooth nonnegative unit-sum kernel from `seed`.
    static Deconv2dProblem generate(std::uint64_t seed, Index image_size, Index kernel_size,
                                    double sigma, Index block_size);

    /// Explicit image and kernel; noise is drawn from `seed`.
    Deconv2dProblem(MatrixXd image, MatrixXd kernel, double sigma, Index block_size,
                    std::uint64_t seed);

    Index dim() const override { return kernel_.size(); }
    Index block_size() const override { return block_size_; }
    Index size() const override { return image_.size() / block_size_; }
    Sample sample(Index k) const override;
    VectorXd truth(Index) const override { return kernel_vector(); }

    const MatrixXd& image() const { return image_; }
    const MatrixXd& kernel() const { return kernel_; }
    const MatrixXd& observed() const { return observed_; }
    /// Row-major vectorization of the kernel: index a*K + b.
    VectorXd kernel_vector() const;
    /// Row of the convolution matrix producing output pixel (i, j).
    VectorXd patch(Index i, Index j) const;

  private:
    MatrixXd image_;
    MatrixXd kernel_;
    MatrixXd observed_;
    Index block_size_;
};

/// Sparse time-varying FIR identification driven by a +/-1 input sequence:
///   y_n = X_n' h_n + w_n,  X_n = [x(n-N+1), ..., x(n)]',
/// with h_n = h_first for n <= change_point and h_second afterwards (Q = 1).
class AdaptiveFilterProblem : public SampleStream {
  public:
    static AdaptiveFilterProblem generate(std::uint64_t seed, Index N, Index L, double noise_var,
                                          Index change_point, Index nonzero_taps = 16);

    Index dim() const override { return h_first_.size(); }
    Index block_size() const override { return 1; }
    Index size() const override { return y_.size(); }
    Sample sample(Index k) const override;
    VectorXd truth(Index k) const override;

    Index change_point() const { return change_point_; }
    const VectorXd& first_filter() const { return h_first_; }
    const VectorXd& second_filter() const { return h_second_; }
    /// x(n) for n = -N+2, ..., L (index n + N - 2).
    const VectorXd& input_signal() const { return x_; }
    const VectorXd& observations() const { return y_; }

  private:
    VectorXd x_;
    VectorXd y_;
    VectorXd h_first_;
    VectorXd h_second_;
    Index change_point_ = 0;
};

/// Stationary Gaussian regression: X_n has i.i.d. N(0, 1) entries,
/// y_n = X_n' h + sigma w_n.
class SyntheticProblem : public SampleStream {
  public:
    static SyntheticProblem generate(std::uint64_t seed, Index N, Index Q, Index L,
                                     double noise_sigma);

    Index dim() const override { return truth_.size(); }
    Index block_size() const override { return samples_.front().y.size(); }
    Index size() const override { return static_cast<Index>(samples_.size()); }
    Sample sample(Index k) const override { return samples_[k]; }
    VectorXd truth(Index) const override { return truth_; }

  private:
    std::vector<Sample> samples_;
    VectorXd truth_;
};

/// Samples held in memory, e.g. read from disk.
class RecordedStream : public SampleStream {
  public:
    RecordedStream(std::vector<Sample> samples, VectorXd truth = VectorXd());

    Index dim() const override { return samples_.front().X.rows(); }
    Index block_size() const override { return samples_.front().X.cols(); }
    Index size() const override { return static_cast<Index>(samples_.size()); }
    Sample sample(Index k) const override { return samples_[k]; }
    VectorXd truth(Index) const override { return truth_; }

  private:
    std::vector<Sample> samples_;
    VectorXd truth_;
};

}  // namespace smm::harness
