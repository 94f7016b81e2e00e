#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "idrlab/moments.hpp"

namespace idrlab {

// Set of latent channel indices a correction is allowed to touch.
struct ChannelSubset {
  std::vector<Eigen::Index> indices;

  static ChannelSubset all(Eigen::Index dim) {
    ChannelSubset s;
    s.indices.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index d = 0; d < dim; ++d) s.indices[static_cast<std::size_t>(d)] = d;
    return s;
  }

  void validate(Eigen::Index dim) const {
    std::vector<Eigen::Index> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] < 0 || sorted[i] >= dim)
        throw std::invalid_argument("ChannelSubset: index " + std::to_string(sorted[i]) +
                                    " out of range [0," + std::to_string(dim) + ")");
      if (i > 0 && sorted[i] == sorted[i - 1])
        throw std::invalid_argument("ChannelSubset: duplicate index " +
                                    std::to_string(sorted[i]));
    }
  }
};

namespace detail {
template <typename Scalar>
void check_same_dim(const ChannelMoments<Scalar>& p, const ChannelMoments<Scalar>& q,
                    const char* where) {
  if (p.dim() != q.dim())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(p.dim()) + " vs " +
                                std::to_string(q.dim()) + ")");
}
}  // namespace detail

// Squared Wasserstein-2 distance between diagonal Gaussians:
// ||mu_P - mu_Q||^2 + ||sigma_P - sigma_Q||^2.
template <typename Scalar>
Scalar diag_w2_squared(const ChannelMoments<Scalar>& p, const ChannelMoments<Scalar>& q) {
  detail::check_same_dim(p, q, "diag_w2_squared");
  return (p.mean - q.mean).squaredNorm() + (p.std - q.std).squaredNorm();
}

template <typename Scalar>
Scalar diag_w2(const ChannelMoments<Scalar>& p, const ChannelMoments<Scalar>& q) {
  return std::sqrt(diag_w2_squared(p, q));
}

// Optimal transport map between diagonal Gaussians, applied frame-wise:
// T*(z) = mu_Q + (sigma_Q / sigma_P) * (z - mu_P), channel by channel.
template <typename Scalar>
MatX<Scalar> transport_map_apply(const MatX<Scalar>& z, const ChannelMoments<Scalar>& p,
                                 const ChannelMoments<Scalar>& q) {
  detail::check_same_dim(p, q, "transport_map_apply");
  if (z.cols() != p.dim())
    throw std::invalid_argument("transport_map_apply: sequence has " +
                                std::to_string(z.cols()) + " channels, moments have " +
                                std::to_string(p.dim()));
  for (Eigen::Index d = 0; d < p.dim(); ++d)
    if (p.std[d] <= Scalar(0))
      throw std::runtime_error("transport_map_apply: internal error, source std not "
                               "clamped at channel " + std::to_string(d));
  VecX<Scalar> scale = q.std.array() / p.std.array();
  MatX<Scalar> out = (z.rowwise() - p.mean.transpose());
  out = out.array().rowwise() * scale.transpose().array();
  out.rowwise() += q.mean.transpose();
  return out;
}

// Interpolated distribution rectification: compute the generated moments,
// transport toward the reference moments, and blend with weight alpha.
// alpha = 0 returns zhat unchanged; alpha = 1 is the full transport.
template <typename Scalar>
MatX<Scalar> idr_rectify(const MatX<Scalar>& zhat, const ChannelMoments<Scalar>& ref,
                         Scalar alpha, Scalar sigma_floor = Scalar(kSigmaFloor)) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1)))
    throw std::invalid_argument("idr_rectify: alpha must lie in [0,1]");
  if (alpha == Scalar(0)) return zhat;
  ChannelMoments<Scalar> gen = compute_moments(zhat, sigma_floor);
  MatX<Scalar> transported = transport_map_apply(zhat, gen, ref);
  if (alpha == Scalar(1)) return transported;
  return (Scalar(1) - alpha) * zhat + alpha * transported;
}

// W2 distance between the alpha-interpolated pushforward of P and Q.
// Closed form: (1 - alpha) * W2(P, Q).
template <typename Scalar>
Scalar contraction_w2(const ChannelMoments<Scalar>& p, const ChannelMoments<Scalar>& q,
                      Scalar alpha) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1)))
    throw std::invalid_argument("contraction_w2: alpha must lie in [0,1]");
  return (Scalar(1) - alpha) * diag_w2(p, q);
}

// Moments of the alpha-interpolated pushforward: linear interpolation of both
// mean and std vectors.
template <typename Scalar>
ChannelMoments<Scalar> interpolate_moments(const ChannelMoments<Scalar>& p,
                                           const ChannelMoments<Scalar>& q, Scalar alpha) {
  detail::check_same_dim(p, q, "interpolate_moments");
  ChannelMoments<Scalar> out;
  out.mean = (Scalar(1) - alpha) * p.mean + alpha * q.mean;
  out.std = (Scalar(1) - alpha) * p.std + alpha * q.std;
  return out;
}

// Squared-W2 floor left by the channels outside `touchable`: the complement's
// per-channel mean and std gaps cannot be reduced by any admissible map.
template <typename Scalar>
Scalar subset_lower_bound(const ChannelMoments<Scalar>& p, const ChannelMoments<Scalar>& q,
                          const ChannelSubset& touchable) {
  detail::check_same_dim(p, q, "subset_lower_bound");
  touchable.validate(p.dim());
  std::vector<bool> touched(static_cast<std::size_t>(p.dim()), false);
  for (Eigen::Index d : touchable.indices) touched[static_cast<std::size_t>(d)] = true;
  Scalar sum = 0;
  for (Eigen::Index d = 0; d < p.dim(); ++d) {
    if (touched[static_cast<std::size_t>(d)]) continue;
    const Scalar dm = p.mean[d] - q.mean[d];
    const Scalar ds = p.std[d] - q.std[d];
    sum += dm * dm + ds * ds;
  }
  return sum;
}

}  // namespace idrlab
