#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "idrlab/moments.hpp"

namespace idrlab::sfd {

inline constexpr double kEps = 1e-8;
inline constexpr double kSigmaFloorProfile = 1e-8;
inline constexpr double kFps = 30.0;
inline constexpr int kJointCount = 55;
inline constexpr int kChannelCount = 330;  // 55 joints x 6D rotation
inline constexpr double kMinRhythmHz = 0.5;

// A motion clip: T x 330 matrix of SMPL-X 6D body rotations at 30 fps.
using MotionClip = Eigen::MatrixXd;
using Vec9 = Eigen::Matrix<double, 9, 1>;

// Fixed SMPL-X joint groups used by the style features.
struct JointGroups {
  std::vector<int> left_arm{13, 16, 18, 20};
  std::vector<int> right_arm{14, 17, 19, 21};
  std::vector<int> left_hand;   // 25..39
  std::vector<int> right_hand;  // 40..54
  std::vector<int> hands;       // left_hand u right_hand
  std::vector<int> upper;       // 3..54
  std::vector<int> lower{0, 1, 2};
  std::vector<int> body_no_hands;  // {0..54} \ hands

  JointGroups() {
    for (int j = 25; j <= 39; ++j) left_hand.push_back(j);
    for (int j = 40; j <= 54; ++j) right_hand.push_back(j);
    hands = left_hand;
    hands.insert(hands.end(), right_hand.begin(), right_hand.end());
    for (int j = 3; j <= 54; ++j) upper.push_back(j);
    for (int j = 0; j <= 54; ++j)
      if (j < 25) body_no_hands.push_back(j);
  }

  // Rotation channels {6j .. 6j+5} for every joint in the set.
  static std::vector<int> channels(const std::vector<int>& joints) {
    std::vector<int> out;
    out.reserve(joints.size() * 6);
    for (int j : joints)
      for (int c = 0; c < 6; ++c) out.push_back(6 * j + c);
    return out;
  }
};

inline const JointGroups& joint_groups() {
  static const JointGroups groups;
  return groups;
}

struct StyleFeatureVector {
  Vec9 s = Vec9::Zero();
};

struct SpeakerProfile {
  std::string speaker_id;
  Vec9 mu = Vec9::Zero();
  Vec9 sigma = Vec9::Constant(kSigmaFloorProfile);
  long clip_count = 0;
};

namespace detail {

inline void check_clip(const MotionClip& clip) {
  if (clip.cols() != kChannelCount)
    throw std::invalid_argument("MotionClip: expected " + std::to_string(kChannelCount) +
                                " columns, got " + std::to_string(clip.cols()));
  if (clip.rows() < 3)
    throw std::invalid_argument("MotionClip: need at least 3 frames, got " +
                                std::to_string(clip.rows()));
  for (Eigen::Index t = 0; t < clip.rows(); ++t)
    for (Eigen::Index c = 0; c < clip.cols(); ++c)
      if (!std::isfinite(clip(t, c)))
        throw std::invalid_argument("MotionClip: non-finite value at frame " +
                                    std::to_string(t) + ", channel " + std::to_string(c));
}

inline double population_std(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return std::sqrt((x.array() - m).square().mean());
}

// Mean absolute velocity over time and the group's rotation channels.
inline double group_energy(const Eigen::MatrixXd& velocity, const std::vector<int>& joints) {
  const std::vector<int> chans = JointGroups::channels(joints);
  double sum = 0.0;
  for (int c : chans) sum += velocity.col(c).array().abs().sum();
  return sum / (static_cast<double>(velocity.rows()) * static_cast<double>(chans.size()));
}

// Dominant frequency of the centered signal: real DFT magnitude argmax over
// bins with center frequency strictly above min_hz. Returns 0 when no such
// bin exists. No window, no zero-padding; resolution fs / N.
inline double dominant_frequency(const Eigen::VectorXd& signal, double fs, double min_hz) {
  const Eigen::Index n = signal.size();
  if (n < 2) return 0.0;
  Eigen::VectorXd x = signal.array() - signal.mean();
  double best_mag = 0.0;  // a flat signal has no peak and maps to 0 Hz
  double best_freq = 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    const double f = fs * static_cast<double>(k) / static_cast<double>(n);
    if (!(f > min_hz)) continue;
    double re = 0.0, im = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double phase = two_pi * static_cast<double>(k) * static_cast<double>(t) /
                           static_cast<double>(n);
      re += x[t] * std::cos(phase);
      im -= x[t] * std::sin(phase);
    }
    const double mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best_freq = f;
    }
  }
  return best_freq;
}

}  // namespace detail

// The 9-dimensional handcrafted style descriptor:
//   s1 mean velocity magnitude      s2 std of velocity magnitude
//   s3 mean acceleration magnitude  s4 std of acceleration magnitude
//   s5 amplitude (std over all rotation entries)
//   s6 upper/lower energy ratio     s7 left/right arm energy ratio
//   s8 hand/body energy ratio       s9 dominant rhythm in Hz
inline StyleFeatureVector style_features(const MotionClip& clip) {
  detail::check_clip(clip);
  const Eigen::Index T = clip.rows();

  Eigen::MatrixXd velocity = clip.bottomRows(T - 1) - clip.topRows(T - 1);
  Eigen::MatrixXd accel = velocity.bottomRows(T - 2) - velocity.topRows(T - 2);
  Eigen::VectorXd v_mag = velocity.rowwise().norm();
  Eigen::VectorXd a_mag = accel.rowwise().norm();

  const JointGroups& g = joint_groups();
  StyleFeatureVector f;
  f.s[0] = v_mag.mean();
  f.s[1] = detail::population_std(v_mag);
  f.s[2] = a_mag.mean();
  f.s[3] = detail::population_std(a_mag);
  f.s[4] = std::sqrt((clip.array() - clip.mean()).square().mean());
  f.s[5] = detail::group_energy(velocity, g.upper) /
           (detail::group_energy(velocity, g.lower) + kEps);
  f.s[6] = detail::group_energy(velocity, g.left_arm) /
           (detail::group_energy(velocity, g.right_arm) + kEps);
  f.s[7] = detail::group_energy(velocity, g.hands) /
           (detail::group_energy(velocity, g.body_no_hands) + kEps);
  f.s[8] = detail::dominant_frequency(v_mag, kFps, kMinRhythmHz);
  return f;
}

// Per-speaker profile: per-feature mean and population std over clip feature
// vectors, std floored at 1e-8.
inline SpeakerProfile build_profile_from_features(
    const std::vector<StyleFeatureVector>& clip_features, const std::string& speaker_id) {
  if (clip_features.empty())
    throw std::invalid_argument("build_profile: need at least one clip");
  Eigen::MatrixXd features(static_cast<Eigen::Index>(clip_features.size()), 9);
  for (std::size_t i = 0; i < clip_features.size(); ++i)
    features.row(static_cast<Eigen::Index>(i)) = clip_features[i].s.transpose();

  SpeakerProfile profile;
  profile.speaker_id = speaker_id;
  profile.clip_count = static_cast<long>(clip_features.size());
  profile.mu = features.colwise().mean().transpose();
  Eigen::VectorXd var = (features.rowwise() - profile.mu.transpose())
                            .array()
                            .square()
                            .colwise()
                            .mean()
                            .transpose();
  profile.sigma = var.array().sqrt().max(kSigmaFloorProfile);
  return profile;
}

inline SpeakerProfile build_profile(const std::vector<MotionClip>& clips,
                                    const std::string& speaker_id) {
  std::vector<StyleFeatureVector> features;
  features.reserve(clips.size());
  for (const auto& clip : clips) features.push_back(style_features(clip));
  return build_profile_from_features(features, speaker_id);
}

// L2 norm of the per-feature z-scored residual against a speaker profile.
inline double sfd(const StyleFeatureVector& features, const SpeakerProfile& profile) {
  return ((features.s - profile.mu).array() / profile.sigma.array()).matrix().norm();
}

// Profiles ranked ascending by SFD; ties broken lexicographically by id.
inline std::vector<std::string> retrieve_speaker(const StyleFeatureVector& features,
                                                 const std::vector<SpeakerProfile>& profiles,
                                                 std::size_t k) {
  if (profiles.empty())
    throw std::invalid_argument("retrieve_speaker: profile list is empty");
  if (k > profiles.size())
    throw std::invalid_argument("retrieve_speaker: k exceeds number of profiles");
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(profiles.size());
  for (const auto& p : profiles) scored.emplace_back(sfd(features, p), p.speaker_id);
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(scored[i].second);
  return ids;
}

}  // namespace idrlab::sfd
