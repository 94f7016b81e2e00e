#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace idrlab {

inline constexpr const char* kVersion = "0.1.0";

// Default clamping floor for latent channel standard deviations.
inline constexpr double kSigmaFloor = 1e-6;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A latent sequence is a T x D matrix: rows are frames, columns are channels.
using LatentSequence = Eigen::MatrixXd;

// Per-channel mean and standard deviation of a diagonal Gaussian or an
// empirical latent sequence.
template <typename Scalar = double>
struct ChannelMoments {
  VecX<Scalar> mean;
  VecX<Scalar> std;

  ChannelMoments() = default;
  ChannelMoments(VecX<Scalar> m, VecX<Scalar> s)
      : mean(std::move(m)), std(std::move(s)) {
    validate();
  }

  Eigen::Index dim() const { return mean.size(); }

  void validate() const {
    if (mean.size() != std.size())
      throw std::invalid_argument("ChannelMoments: mean/std length mismatch (" +
                                  std::to_string(mean.size()) + " vs " +
                                  std::to_string(std.size()) + ")");
    if (mean.size() < 1)
      throw std::invalid_argument("ChannelMoments: need at least one channel");
    for (Eigen::Index d = 0; d < std.size(); ++d) {
      if (!std::isfinite(mean[d]) || !std::isfinite(std[d]))
        throw std::invalid_argument("ChannelMoments: non-finite entry at channel " +
                                    std::to_string(d));
      if (std[d] < Scalar(0))
        throw std::invalid_argument("ChannelMoments: negative std at channel " +
                                    std::to_string(d));
    }
  }
};

using ChannelMomentsd = ChannelMoments<double>;

// Diagonal Gaussian distribution; std entries must be strictly positive when
// the value is used for sampling.
template <typename Scalar = double>
struct DiagonalGaussian {
  ChannelMoments<Scalar> moments;
};

using DiagonalGaussiand = DiagonalGaussian<double>;

// Channel-wise mean and population (divide by T) standard deviation of a
// latent sequence, with the std clamped to sigma_floor from below.
template <typename Derived>
ChannelMoments<typename Derived::Scalar> compute_moments(
    const Eigen::MatrixBase<Derived>& frames,
    typename Derived::Scalar sigma_floor =
        typename Derived::Scalar(kSigmaFloor)) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index T = frames.rows();
  const Eigen::Index D = frames.cols();
  if (T < 1 || D < 1)
    throw std::invalid_argument("compute_moments: sequence must be at least 1x1");
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index d = 0; d < D; ++d)
      if (!std::isfinite(frames(t, d)))
        throw std::invalid_argument("compute_moments: non-finite value at frame " +
                                    std::to_string(t) + ", channel " +
                                    std::to_string(d));

  ChannelMoments<Scalar> out;
  out.mean = frames.colwise().mean().transpose();
  VecX<Scalar> var = (frames.rowwise() - out.mean.transpose())
                         .array()
                         .square()
                         .colwise()
                         .mean()
                         .transpose();
  out.std = var.array().sqrt().max(sigma_floor);
  return out;
}

}  // namespace idrlab
