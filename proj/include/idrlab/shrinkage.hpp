#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idrlab/moments.hpp"

namespace idrlab {

// Population moment mismatch Delta^2 and moment-estimation variance Xi_n.
struct MismatchDecomposition {
  double delta_sq = 0.0;
  double xi_n = 0.0;

  void validate() const {
    if (!(std::isfinite(delta_sq) && delta_sq >= 0.0))
      throw std::invalid_argument("MismatchDecomposition: delta_sq must be finite and >= 0");
    if (!(std::isfinite(xi_n) && xi_n >= 0.0))
      throw std::invalid_argument("MismatchDecomposition: xi_n must be finite and >= 0");
  }
};

// Length-aware interpolation weight: clip(alpha_max * L / (L + lambda),
// alpha_min, alpha_max). Monotone non-decreasing in L.
inline double alpha_length(double L_seconds, double alpha_min = 0.2,
                           double alpha_max = 0.5, double lambda_s = 5.0) {
  if (!(L_seconds > 0.0))
    throw std::invalid_argument("alpha_length: reference duration must be positive");
  if (!(lambda_s > 0.0))
    throw std::invalid_argument("alpha_length: lambda must be positive");
  if (!(0.0 <= alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0))
    throw std::invalid_argument("alpha_length: need 0 <= alpha_min <= alpha_max <= 1");
  const double raw = alpha_max * L_seconds / (L_seconds + lambda_s);
  return std::clamp(raw, alpha_min, alpha_max);
}

// Expected squared-W2 cost of rectifying with weight alpha against noisy
// reference moment estimates: (1 - alpha)^2 * Delta^2 + alpha^2 * Xi_n.
inline double expected_cost(double alpha, const MismatchDecomposition& m) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("expected_cost: alpha must lie in [0,1]");
  m.validate();
  const double r = 1.0 - alpha;
  return r * r * m.delta_sq + alpha * alpha * m.xi_n;
}

// Minimizer of expected_cost: Delta^2 / (Delta^2 + Xi_n). Degenerate
// zero-mismatch case maps to 0 (nothing to correct).
inline double optimal_alpha(const MismatchDecomposition& m) {
  m.validate();
  const double total = m.delta_sq + m.xi_n;
  if (total == 0.0) return 0.0;
  return m.delta_sq / total;
}

// Estimate of the moment-estimation variance from the reference moments and
// frame count n: sum_d (sigma_d^2 / n) * (1 + 1/2). The first term is the
// mean-estimator variance, the second the asymptotic std-estimator variance
// sigma^2 / (2n) per channel.
inline double estimate_xi_n(const ChannelMomentsd& ref, long n_frames) {
  if (n_frames < 1)
    throw std::invalid_argument("estimate_xi_n: need at least one reference frame");
  const double var_sum = ref.std.squaredNorm();
  return var_sum / static_cast<double>(n_frames) * 1.5;
}

enum class PolicyKind { Fixed, FullTransport, LengthAware, VarianceAware, Oracle };

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Fixed: return "fixed";
    case PolicyKind::FullTransport: return "full_transport";
    case PolicyKind::LengthAware: return "length_aware";
    case PolicyKind::VarianceAware: return "variance_aware";
    case PolicyKind::Oracle: return "oracle";
  }
  throw std::logic_error("to_string(PolicyKind): unreachable");
}

inline PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "fixed") return PolicyKind::Fixed;
  if (s == "full_transport") return PolicyKind::FullTransport;
  if (s == "length_aware") return PolicyKind::LengthAware;
  if (s == "variance_aware") return PolicyKind::VarianceAware;
  if (s == "oracle") return PolicyKind::Oracle;
  throw std::invalid_argument("unknown policy kind '" + s + "'");
}

struct ShrinkagePolicy {
  PolicyKind kind = PolicyKind::Fixed;
  // fixed
  double alpha = 0.5;
  // length_aware
  double alpha_min = 0.2;
  double alpha_max = 0.5;
  double lambda_seconds = 5.0;
  // variance_aware
  double delta_sq_estimate = 1.0;
  // oracle: candidate alphas (scores supplied at resolve time)
  std::vector<double> candidates;

  void validate() const {
    switch (kind) {
      case PolicyKind::Fixed:
        if (!(alpha >= 0.0 && alpha <= 1.0))
          throw std::invalid_argument("ShrinkagePolicy: fixed alpha must lie in [0,1]");
        break;
      case PolicyKind::LengthAware:
        if (!(0.0 <= alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0))
          throw std::invalid_argument(
              "ShrinkagePolicy: need 0 <= alpha_min <= alpha_max <= 1");
        if (!(lambda_seconds > 0.0))
          throw std::invalid_argument("ShrinkagePolicy: lambda must be positive");
        break;
      case PolicyKind::Oracle:
        if (candidates.empty())
          throw std::invalid_argument("ShrinkagePolicy: oracle needs a candidate grid");
        break;
      default:
        break;
    }
  }
};

// Context a policy may draw on when resolving its alpha.
struct PolicyContext {
  std::optional<double> L_seconds;            // reference duration
  std::optional<long> ref_frame_count;        // fallback: L = frames / 30 fps
  std::optional<MismatchDecomposition> mismatch;  // for variance_aware
  std::optional<ChannelMomentsd> ref_moments;     // for variance_aware Xi estimate
  std::map<double, double> candidate_scores;      // for oracle: alpha -> cost
};

struct ResolvedAlpha {
  double alpha = 0.0;
  bool deployable = true;  // oracle policies are flagged as non-deployable
};

inline double context_duration_seconds(const PolicyContext& ctx) {
  if (ctx.L_seconds) return *ctx.L_seconds;
  if (ctx.ref_frame_count)
    return static_cast<double>(*ctx.ref_frame_count) / 30.0;
  throw std::invalid_argument("policy context: reference duration unavailable");
}

inline ResolvedAlpha resolve_alpha(const ShrinkagePolicy& policy, const PolicyContext& ctx) {
  policy.validate();
  switch (policy.kind) {
    case PolicyKind::Fixed:
      return {policy.alpha, true};
    case PolicyKind::FullTransport:
      return {1.0, true};
    case PolicyKind::LengthAware:
      return {alpha_length(context_duration_seconds(ctx), policy.alpha_min,
                           policy.alpha_max, policy.lambda_seconds),
              true};
    case PolicyKind::VarianceAware: {
      MismatchDecomposition m;
      if (ctx.mismatch) {
        m = *ctx.mismatch;
      } else if (ctx.ref_moments && ctx.ref_frame_count) {
        m.delta_sq = policy.delta_sq_estimate;
        m.xi_n = estimate_xi_n(*ctx.ref_moments, *ctx.ref_frame_count);
      } else {
        throw std::invalid_argument(
            "variance_aware policy: context must supply either a mismatch "
            "decomposition or reference moments plus frame count");
      }
      return {optimal_alpha(m), true};
    }
    case PolicyKind::Oracle: {
      if (ctx.candidate_scores.empty())
        throw std::invalid_argument("oracle policy: context must supply candidate scores");
      double best_alpha = 0.0;
      double best_score = std::numeric_limits<double>::infinity();
      for (const auto& [a, score] : ctx.candidate_scores) {
        if (score < best_score) {
          best_score = score;
          best_alpha = a;
        }
      }
      return {best_alpha, false};
    }
  }
  throw std::logic_error("resolve_alpha: unreachable");
}

}  // namespace idrlab
