#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "idrlab/report.hpp"
#include "idrlab/rng.hpp"

namespace idrlab {

// Tiny fixed-weight denoiser: dense tanh backbone layers, each followed by a
// gated single-head cross-attention residual over a small memory matrix.
// All weights are frozen at construction; only the gate vector varies.
struct ToyDenoiser {
  int layers = 3;
  int width = 8;
  int mem_rows = 4;
  std::vector<Eigen::MatrixXd> w_backbone;  // width x width per layer
  std::vector<Eigen::VectorXd> b_backbone;  // width per layer
  std::vector<Eigen::MatrixXd> w_query;     // width x width
  std::vector<Eigen::MatrixXd> w_key;       // width x width
  std::vector<Eigen::MatrixXd> w_value;     // width x width
  Eigen::MatrixXd memory;                   // mem_rows x width

  static ToyDenoiser random(std::uint64_t seed, int layers = 3, int width = 8,
                            int mem_rows = 4) {
    if (layers < 1 || width < 1 || mem_rows < 1)
      throw std::invalid_argument("ToyDenoiser: layers, width, mem_rows must be >= 1");
    auto rng = make_engine(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    auto mat = [&](int r, int c) {
      Eigen::MatrixXd m(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = unit(rng) / std::sqrt(double(c));
      return m;
    };
    ToyDenoiser net;
    net.layers = layers;
    net.width = width;
    net.mem_rows = mem_rows;
    for (int l = 0; l < layers; ++l) {
      net.w_backbone.push_back(mat(width, width));
      Eigen::VectorXd b(width);
      for (int i = 0; i < width; ++i) b[i] = 0.1 * unit(rng);
      net.b_backbone.push_back(b);
      net.w_query.push_back(mat(width, width));
      net.w_key.push_back(mat(width, width));
      net.w_value.push_back(mat(width, width));
    }
    net.memory = mat(mem_rows, width);
    return net;
  }
};

namespace detail {

// Single-head softmax attention of a hidden vector over the memory rows.
inline Eigen::VectorXd cross_attention(const ToyDenoiser& net, int layer,
                                       const Eigen::VectorXd& h) {
  Eigen::VectorXd query = net.w_query[layer] * h;
  Eigen::MatrixXd keys = net.memory * net.w_key[layer];    // mem_rows x width
  Eigen::MatrixXd values = net.memory * net.w_value[layer];
  Eigen::VectorXd logits = keys * query / std::sqrt(double(net.width));
  Eigen::VectorXd weights = (logits.array() - logits.maxCoeff()).exp();
  weights /= weights.sum();
  return values.transpose() * weights;
}

}  // namespace detail

// Layered forward pass with the gated residual h <- h + gamma_l * attn(h).
// A zero gate skips the attention branch entirely, so the gamma = 0 network
// is bit-identical to the plain backbone.
inline Eigen::VectorXd toy_forward(const ToyDenoiser& net, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& gamma) {
  if (x.size() != net.width)
    throw std::invalid_argument("toy_forward: input size mismatch");
  if (gamma.size() != net.layers)
    throw std::invalid_argument("toy_forward: gamma must have one entry per layer");
  Eigen::VectorXd h = x;
  for (int l = 0; l < net.layers; ++l) {
    h = (net.w_backbone[l] * h + net.b_backbone[l]).array().tanh();
    if (gamma[l] != 0.0) h += gamma[l] * detail::cross_attention(net, l, h);
  }
  return h;
}

struct FirstOrderCheck {
  std::vector<double> scales;
  std::vector<double> remainders;  // ||f(eps u) - f(0) - eps J_u|| per scale
  double slope = 0.0;              // log-log fit; 2.0 for a quadratic remainder
};

// Remainder scaling of the gate-space Taylor expansion at gamma = 0.
// J_u is the central finite-difference directional derivative.
inline FirstOrderCheck verify_first_order(const ToyDenoiser& net, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& direction,
                                          const std::vector<double>& scales,
                                          double fd_step = 1e-5) {
  if (direction.size() != net.layers)
    throw std::invalid_argument("verify_first_order: direction size mismatch");
  const double norm = direction.norm();
  if (norm == 0.0)
    throw std::invalid_argument("verify_first_order: direction must be nonzero");
  if (scales.size() < 2)
    throw std::invalid_argument("verify_first_order: need at least two scales");
  Eigen::VectorXd u = direction / norm;

  Eigen::VectorXd base = toy_forward(net, x, Eigen::VectorXd::Zero(net.layers));
  Eigen::VectorXd jac_u =
      (toy_forward(net, x, fd_step * u) - toy_forward(net, x, -fd_step * u)) /
      (2.0 * fd_step);

  FirstOrderCheck out;
  out.scales = scales;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double eps : scales) {
    Eigen::VectorXd f = toy_forward(net, x, eps * u);
    double r = (f - base - eps * jac_u).norm();
    out.remainders.push_back(r);
    const double lx = std::log(eps);
    const double ly = std::log(std::max(r, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(scales.size());
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

// Zero-init verification over random toy nets: exact backbone equality at
// gamma = 0 and quadratic remainder scaling of the gate-space expansion.
inline ExperimentReport run_lemma1_verification(long trials, std::uint64_t seed,
                                                double slope_tolerance = 0.1) {
  ExperimentReport rep;
  rep.name = "lemma1";
  rep.tolerance = slope_tolerance;
  long exact_matches = 0;
  double worst_slope_dev = 0.0;
  for (long i = 0; i < trials; ++i) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    ToyDenoiser net = ToyDenoiser::random(trial_seed);
    auto rng = make_engine(derive_seed(trial_seed, 7));
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x(net.width);
    for (int d = 0; d < net.width; ++d) x[d] = unit(rng);

    // gamma = 0 equals the gate-free backbone, bit for bit
    Eigen::VectorXd h = x;
    for (int l = 0; l < net.layers; ++l)
      h = (net.w_backbone[l] * h + net.b_backbone[l]).array().tanh();
    Eigen::VectorXd with_zero_gate = toy_forward(net, x, Eigen::VectorXd::Zero(net.layers));
    if (with_zero_gate == h) ++exact_matches;

    Eigen::VectorXd direction(net.layers);
    for (int l = 0; l < net.layers; ++l) direction[l] = unit(rng);
    FirstOrderCheck check =
        verify_first_order(net, x, direction, {1e-1, 1e-2, 1e-3});
    worst_slope_dev = std::max(worst_slope_dev, std::abs(check.slope - 2.0));
  }
  rep.add("zero_gate_exact_matches", double(trials), double(exact_matches), trials, seed);
  rep.add("max_remainder_slope_dev", 0.0, worst_slope_dev, trials, seed);
  rep.passed = exact_matches == trials && worst_slope_dev <= slope_tolerance;
  return rep;
}

}  // namespace idrlab
