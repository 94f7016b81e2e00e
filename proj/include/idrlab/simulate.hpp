#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "idrlab/moments.hpp"
#include "idrlab/report.hpp"
#include "idrlab/rng.hpp"
#include "idrlab/shrinkage.hpp"
#include "idrlab/transport.hpp"

namespace idrlab {

// Synthetic speaker: a per-speaker population Gaussian plus the loading
// vector saying how speaker-specific each channel is.
struct SyntheticSpeakerSpec {
  std::string speaker_id;
  DiagonalGaussiand base;
  Eigen::VectorXd channel_loading;
};

namespace detail {

inline ChannelMomentsd random_moments(std::mt19937_64& rng, Eigen::Index D,
                                      double mean_lo = -3.0, double mean_hi = 3.0,
                                      double std_lo = 0.1, double std_hi = 5.0) {
  std::uniform_real_distribution<double> um(mean_lo, mean_hi);
  std::uniform_real_distribution<double> us(std_lo, std_hi);
  ChannelMomentsd m;
  m.mean.resize(D);
  m.std.resize(D);
  for (Eigen::Index d = 0; d < D; ++d) {
    m.mean[d] = um(rng);
    m.std[d] = us(rng);
  }
  return m;
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean();
  const double my = y.mean();
  Eigen::ArrayXd dx = x.array() - mx;
  Eigen::ArrayXd dy = y.array() - my;
  const double denom = std::sqrt(dx.square().sum() * dy.square().sum());
  if (denom == 0.0) return 0.0;
  return (dx * dy).sum() / denom;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Transport pushforward verification: draw samples from random P, map them
// with the closed-form transport, and check the sample moments land on Q.
// Also cross-checks analytic W2 against the sample-moment estimate.
// ---------------------------------------------------------------------------
struct TransportVerificationConfig {
  long trials = 100;
  long samples_per_trial = 100000;
  Eigen::Index dim = 32;
  double moment_tolerance = 0.01;  // relative, on vector norms
  double w2_tolerance = 0.02;
};

inline ExperimentReport run_transport_verification(const TransportVerificationConfig& cfg,
                                                   std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "transport";
  rep.tolerance = cfg.moment_tolerance;
  double max_mean_err = 0.0, max_std_err = 0.0, max_w2_err = 0.0;
  for (long i = 0; i < cfg.trials; ++i) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    auto rng = make_engine(trial_seed);
    ChannelMomentsd p = detail::random_moments(rng, cfg.dim);
    ChannelMomentsd q = detail::random_moments(rng, cfg.dim);

    LatentSequence x = sample_latents({p}, cfg.samples_per_trial, derive_seed(trial_seed, 1));
    LatentSequence y = transport_map_apply(x, p, q);
    ChannelMomentsd pushed = compute_moments(y);

    max_mean_err = std::max(max_mean_err, (pushed.mean - q.mean).norm() / q.mean.norm());
    max_std_err = std::max(max_std_err, (pushed.std - q.std).norm() / q.std.norm());

    const double w2_analytic = diag_w2(p, q);
    const double w2_empirical = diag_w2(compute_moments(x), q);
    max_w2_err = std::max(max_w2_err, relative_error(w2_empirical, w2_analytic));
  }
  rep.add("max_pushforward_mean_rel_err", 0.0, max_mean_err, cfg.trials, seed);
  rep.add("max_pushforward_std_rel_err", 0.0, max_std_err, cfg.trials, seed);
  rep.add("max_w2_rel_err", 0.0, max_w2_err, cfg.trials, seed);
  rep.passed = max_mean_err < cfg.moment_tolerance && max_std_err < cfg.moment_tolerance &&
               max_w2_err < cfg.w2_tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Contraction identity: W2 of the alpha-interpolated pushforward against Q
// equals (1 - alpha) W2(P, Q), checked both through the interpolated-moment
// route and by a Monte Carlo pushforward.
// ---------------------------------------------------------------------------
struct ContractionConfig {
  long trials = 100;
  long mc_samples = 100000;
  long mc_trials = 10;  // Monte Carlo is run on the first mc_trials pairs
  Eigen::Index dim = 8;
  double analytic_tolerance = 1e-12;  // absolute
  double mc_tolerance = 0.02;         // relative
};

inline ExperimentReport run_contraction_verification(const ContractionConfig& cfg,
                                                     std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "contraction";
  rep.tolerance = cfg.analytic_tolerance;
  double max_abs_analytic = 0.0, max_mc_err = 0.0;
  for (long i = 0; i < cfg.trials; ++i) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    auto rng = make_engine(trial_seed);
    ChannelMomentsd p = detail::random_moments(rng, cfg.dim);
    ChannelMomentsd q = detail::random_moments(rng, cfg.dim);
    LatentSequence x;
    if (i < cfg.mc_trials) x = sample_latents({p}, cfg.mc_samples, derive_seed(trial_seed, 1));
    for (int k = 0; k <= 10; ++k) {
      const double alpha = 0.1 * k;
      const double predicted = contraction_w2(p, q, alpha);
      const double via_moments = diag_w2(interpolate_moments(p, q, alpha), q);
      max_abs_analytic = std::max(max_abs_analytic, std::abs(via_moments - predicted));
      if (i < cfg.mc_trials) {
        LatentSequence pushed =
            (1.0 - alpha) * x + alpha * transport_map_apply(x, p, q);
        const double mc = diag_w2(compute_moments(pushed), q);
        if (alpha < 1.0)
          max_mc_err = std::max(max_mc_err, relative_error(mc, predicted));
      }
    }
  }
  rep.add("max_abs_analytic_err", 0.0, max_abs_analytic, cfg.trials, seed);
  rep.add("max_mc_rel_err", 0.0, max_mc_err, cfg.mc_trials, seed);
  rep.passed = max_abs_analytic <= cfg.analytic_tolerance && max_mc_err < cfg.mc_tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Subset bound: correcting the top-k mismatched channels leaves a residual
// squared W2 exactly equal to the complement's lower bound, decreasing
// monotonically to zero at k = D.
// ---------------------------------------------------------------------------
struct SubsetConfig {
  long trials = 50;
  Eigen::Index dim = 32;
  double tolerance = 1e-12;  // absolute
};

inline ExperimentReport run_subset_experiment(const std::vector<Eigen::Index>& subset_sizes,
                                              const SubsetConfig& cfg, std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "subset";
  rep.tolerance = cfg.tolerance;
  double max_abs_err = 0.0;
  bool monotone = true, zero_at_full = true;
  std::vector<double> bound_sum(subset_sizes.size(), 0.0);
  std::vector<double> residual_sum(subset_sizes.size(), 0.0);

  for (long i = 0; i < cfg.trials; ++i) {
    auto rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    ChannelMomentsd p = detail::random_moments(rng, cfg.dim);
    ChannelMomentsd q = detail::random_moments(rng, cfg.dim);

    // rank channels by per-channel squared mismatch, largest first
    std::vector<Eigen::Index> order(static_cast<std::size_t>(cfg.dim));
    for (Eigen::Index d = 0; d < cfg.dim; ++d) order[static_cast<std::size_t>(d)] = d;
    auto mismatch = [&](Eigen::Index d) {
      const double dm = p.mean[d] - q.mean[d];
      const double ds = p.std[d] - q.std[d];
      return dm * dm + ds * ds;
    };
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return mismatch(a) > mismatch(b); });

    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < subset_sizes.size(); ++s) {
      const Eigen::Index k = subset_sizes[s];
      ChannelSubset touchable;
      touchable.indices.assign(order.begin(), order.begin() + k);

      // correct only the touchable channels, leave the complement at P
      ChannelMomentsd corrected = p;
      for (Eigen::Index d : touchable.indices) {
        corrected.mean[d] = q.mean[d];
        corrected.std[d] = q.std[d];
      }
      const double residual = diag_w2_squared(corrected, q);
      const double bound = subset_lower_bound(p, q, touchable);
      max_abs_err = std::max(max_abs_err, std::abs(residual - bound));
      bound_sum[s] += bound;
      residual_sum[s] += residual;
      if (residual > prev + cfg.tolerance) monotone = false;
      prev = residual;
      if (k == cfg.dim && residual != 0.0) zero_at_full = false;
    }
  }
  for (std::size_t s = 0; s < subset_sizes.size(); ++s)
    rep.add("k=" + std::to_string(subset_sizes[s]), bound_sum[s] / double(cfg.trials),
            residual_sum[s] / double(cfg.trials), cfg.trials, seed);
  rep.add("max_abs_bound_err", 0.0, max_abs_err, cfg.trials, seed);
  rep.passed = max_abs_err <= cfg.tolerance && monotone && zero_at_full;
  return rep;
}

// ---------------------------------------------------------------------------
// Finite-reference shrinkage: estimate the target moments from n frames,
// rectify with each alpha on the grid, and compare the mean squared-W2 cost
// against the (1-alpha)^2 Delta^2 + alpha^2 Xi_n quadratic.
// ---------------------------------------------------------------------------
struct ShrinkageConfig {
  Eigen::Index dim = 8;
  double mean_gap = 0.35;  // per-channel mean offset of P from Q; std gaps zero
  long trials = 2000;
  double curve_tolerance = 0.05;   // relative, per grid point
  double argmin_tolerance = 0.1;   // absolute, on alpha
};

struct ShrinkageCurve {
  long n_frames = 0;
  std::vector<double> alphas;
  std::vector<double> empirical_cost;
  std::vector<double> predicted_cost;
  double delta_sq = 0.0;
  double xi_n = 0.0;  // measured moment-estimation variance
  double empirical_argmin = 0.0;
  double optimal = 0.0;
};

inline ShrinkageCurve shrinkage_curve(long n_frames, const std::vector<double>& alphas,
                                      const ShrinkageConfig& cfg, std::uint64_t seed) {
  ChannelMomentsd q;
  q.mean = Eigen::VectorXd::Zero(cfg.dim);
  q.std = Eigen::VectorXd::Ones(cfg.dim);
  ChannelMomentsd p = q;
  p.mean.array() += cfg.mean_gap;

  ShrinkageCurve curve;
  curve.n_frames = n_frames;
  curve.alphas = alphas;
  curve.delta_sq = diag_w2_squared(p, q);
  curve.empirical_cost.assign(alphas.size(), 0.0);

  double xi_sum = 0.0;
  for (long t = 0; t < cfg.trials; ++t) {
    const std::uint64_t trial_seed =
        derive_seed(seed, (static_cast<std::uint64_t>(n_frames) << 24) ^
                              static_cast<std::uint64_t>(t));
    LatentSequence ref = sample_latents({q}, n_frames, trial_seed);
    ChannelMomentsd estimate = compute_moments(ref);
    xi_sum += diag_w2_squared(estimate, q);
    for (std::size_t a = 0; a < alphas.size(); ++a)
      curve.empirical_cost[a] +=
          diag_w2_squared(interpolate_moments(p, estimate, alphas[a]), q);
  }
  curve.xi_n = xi_sum / double(cfg.trials);
  for (double& c : curve.empirical_cost) c /= double(cfg.trials);

  MismatchDecomposition m{curve.delta_sq, curve.xi_n};
  curve.optimal = optimal_alpha(m);
  curve.predicted_cost.reserve(alphas.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    curve.predicted_cost.push_back(expected_cost(alphas[a], m));
    if (curve.empirical_cost[a] < best) {
      best = curve.empirical_cost[a];
      curve.empirical_argmin = alphas[a];
    }
  }
  return curve;
}

inline ExperimentReport run_shrinkage_experiment(const std::vector<long>& n_ref_frames,
                                                 const std::vector<double>& alphas,
                                                 const ShrinkageConfig& cfg,
                                                 std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "shrinkage";
  rep.tolerance = cfg.curve_tolerance;
  rep.passed = true;
  for (long n : n_ref_frames) {
    ShrinkageCurve curve = shrinkage_curve(n, alphas, cfg, seed);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      rep.add("n=" + std::to_string(n) + "/alpha=" + format_double(alphas[a]),
              curve.predicted_cost[a], curve.empirical_cost[a], cfg.trials, seed);
      if (rep.rows.back().rel_error > cfg.curve_tolerance) rep.passed = false;
    }
    rep.add("n=" + std::to_string(n) + "/argmin", curve.optimal, curve.empirical_argmin,
            cfg.trials, seed);
    if (std::abs(curve.empirical_argmin - curve.optimal) > cfg.argmin_tolerance)
      rep.passed = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Shrinkage-policy ordering in the short- and long-reference regimes.
// ---------------------------------------------------------------------------
struct PolicyOrderingConfig {
  Eigen::Index dim = 8;
  double mean_gap = 0.1118;  // Delta^2 = dim * mean_gap^2 = 0.1
  long n_short = 30;
  long n_long = 3000;
  long trials = 2000;
};

inline ExperimentReport run_policy_ordering(const PolicyOrderingConfig& cfg,
                                            std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "policy_ordering";
  ShrinkageConfig scfg;
  scfg.dim = cfg.dim;
  scfg.mean_gap = cfg.mean_gap;
  scfg.trials = cfg.trials;

  auto mean_cost = [&](long n, double alpha, std::uint64_t s) {
    ShrinkageCurve c = shrinkage_curve(n, {alpha}, scfg, s);
    return c.empirical_cost[0];
  };

  const double alpha_short = alpha_length(double(cfg.n_short) / 30.0);
  const double alpha_long = alpha_length(double(cfg.n_long) / 30.0);

  const double s_none = mean_cost(cfg.n_short, 0.0, seed);
  const double s_fixed = mean_cost(cfg.n_short, 0.5, seed);
  const double s_full = mean_cost(cfg.n_short, 1.0, seed);
  const double s_len = mean_cost(cfg.n_short, alpha_short, seed);
  const double l_none = mean_cost(cfg.n_long, 0.0, derive_seed(seed, 99));
  const double l_fixed = mean_cost(cfg.n_long, 0.5, derive_seed(seed, 99));

  rep.add("short/none", 0.0, s_none, cfg.trials, seed);
  rep.add("short/fixed_0.5", 0.0, s_fixed, cfg.trials, seed);
  rep.add("short/full_transport", 0.0, s_full, cfg.trials, seed);
  rep.add("short/length_aware", 0.0, s_len, cfg.trials, seed);
  rep.add("long/none", 0.0, l_none, cfg.trials, seed);
  rep.add("long/fixed_0.5", 0.0, l_fixed, cfg.trials, seed);
  rep.passed = s_full > s_none && s_len <= s_fixed && l_fixed <= l_none;
  return rep;
}

// ---------------------------------------------------------------------------
// Channel-effect analysis: one-way ANOVA eta^2 per channel across synthetic
// speakers versus the per-channel correction magnitude |dmu| + |dsigma|.
// ---------------------------------------------------------------------------
struct EtaSquaredResult {
  Eigen::VectorXd eta_sq;      // per channel
  Eigen::VectorXd correction;  // per channel, averaged over speaker pairs
  double pearson_r = 0.0;
  ExperimentReport report;
};

// Draw per-speaker populations around a shared template. Channel d of
// speaker k gets a mean offset loading[d] * separation * N(0,1) and a std
// scale exp(0.1 * loading[d] * N(0,1)).
inline std::vector<SyntheticSpeakerSpec> make_loaded_specs(int n_speakers,
                                                           const Eigen::VectorXd& loading,
                                                           double separation,
                                                           std::uint64_t seed) {
  for (Eigen::Index d = 0; d < loading.size(); ++d)
    if (loading[d] < 0.0 || loading[d] > 1.0)
      throw std::invalid_argument("make_loaded_specs: loading entries must lie in [0,1]");
  std::vector<SyntheticSpeakerSpec> specs;
  for (int k = 0; k < n_speakers; ++k) {
    auto rng = make_engine(derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> unit(0.0, 1.0);
    SyntheticSpeakerSpec spec;
    spec.speaker_id = "speaker_" + std::to_string(k);
    spec.channel_loading = loading;
    spec.base.moments.mean.resize(loading.size());
    spec.base.moments.std.resize(loading.size());
    for (Eigen::Index d = 0; d < loading.size(); ++d) {
      spec.base.moments.mean[d] = loading[d] * separation * unit(rng);
      spec.base.moments.std[d] = std::exp(0.1 * loading[d] * unit(rng));
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

inline EtaSquaredResult run_eta_squared_analysis(const std::vector<SyntheticSpeakerSpec>& specs,
                                                 long clips_per_speaker, Eigen::Index T,
                                                 std::uint64_t seed) {
  if (specs.size() < 2)
    throw std::invalid_argument("run_eta_squared_analysis: need at least two speakers");
  const Eigen::Index D = specs.front().base.moments.dim();
  const long K = static_cast<long>(specs.size());
  const long N = K * clips_per_speaker;

  // per-clip channel means, grouped by speaker, plus pooled per-speaker moments
  Eigen::MatrixXd clip_means(N, D);
  std::vector<ChannelMomentsd> speaker_moments;
  long row = 0;
  for (long k = 0; k < K; ++k) {
    LatentSequence pooled(clips_per_speaker * T, D);
    for (long c = 0; c < clips_per_speaker; ++c) {
      const std::uint64_t clip_seed =
          derive_seed(seed, (static_cast<std::uint64_t>(k) << 32) ^
                                static_cast<std::uint64_t>(c));
      LatentSequence clip = sample_latents(specs[static_cast<std::size_t>(k)].base, T, clip_seed);
      clip_means.row(row++) = clip.colwise().mean();
      pooled.middleRows(c * T, T) = clip;
    }
    speaker_moments.push_back(compute_moments(pooled));
  }

  // one-way ANOVA eta^2 per channel over clip means
  EtaSquaredResult out;
  out.eta_sq.resize(D);
  for (Eigen::Index d = 0; d < D; ++d) {
    const double grand = clip_means.col(d).mean();
    double ssb = 0.0, sst = 0.0;
    for (long k = 0; k < K; ++k) {
      const double group_mean =
          clip_means.col(d).segment(k * clips_per_speaker, clips_per_speaker).mean();
      ssb += double(clips_per_speaker) * (group_mean - grand) * (group_mean - grand);
    }
    sst = (clip_means.col(d).array() - grand).square().sum();
    out.eta_sq[d] = sst > 0.0 ? ssb / sst : 0.0;
  }

  // correction magnitude per channel, averaged over unordered speaker pairs
  out.correction = Eigen::VectorXd::Zero(D);
  long pairs = 0;
  for (long k = 0; k < K; ++k)
    for (long l = k + 1; l < K; ++l) {
      out.correction +=
          (speaker_moments[k].mean - speaker_moments[l].mean).cwiseAbs() +
          (speaker_moments[k].std - speaker_moments[l].std).cwiseAbs();
      ++pairs;
    }
  out.correction /= double(pairs);
  out.pearson_r = detail::pearson(out.correction, out.eta_sq);

  out.report.name = "eta_squared";
  for (Eigen::Index d = 0; d < D; ++d)
    out.report.add("eta2/ch" + std::to_string(d), 0.0, out.eta_sq[d], clips_per_speaker,
                   seed);
  out.report.add("pearson_r", 1.0, out.pearson_r, clips_per_speaker, seed);
  out.report.add("max_eta2", 0.0, out.eta_sq.maxCoeff(), clips_per_speaker, seed);
  return out;
}

}  // namespace idrlab
