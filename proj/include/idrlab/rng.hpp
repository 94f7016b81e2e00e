#pragma once

#include <cstdint>
#include <random>

#include "idrlab/moments.hpp"

namespace idrlab {

// splitmix64 step; used to derive independent per-trial seeds from a base
// seed so parallel trials never share generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

// T i.i.d. frames from a diagonal Gaussian; deterministic under the seed.
inline LatentSequence sample_latents(const DiagonalGaussiand& g, Eigen::Index T,
                                     std::uint64_t seed) {
  g.moments.validate();
  if (T < 1) throw std::invalid_argument("sample_latents: need T >= 1");
  for (Eigen::Index d = 0; d < g.moments.dim(); ++d)
    if (!(g.moments.std[d] > 0.0))
      throw std::invalid_argument("sample_latents: std must be strictly positive");
  auto rng = make_engine(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::Index D = g.moments.dim();
  LatentSequence out(T, D);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index d = 0; d < D; ++d)
      out(t, d) = g.moments.mean[d] + g.moments.std[d] * unit(rng);
  return out;
}

}  // namespace idrlab
