#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idrlab/moments.hpp"
#include "idrlab/rng.hpp"

using namespace idrlab;

TEST_CASE("constant sequence: zero variance clamps to the floor") {
  LatentSequence seq(5, 2);
  for (int t = 0; t < 5; ++t) {
    seq(t, 0) = 1.0;
    seq(t, 1) = -2.0;
  }
  ChannelMomentsd m = compute_moments(seq);
  CHECK(m.mean[0] == doctest::Approx(1.0));
  CHECK(m.mean[1] == doctest::Approx(-2.0));
  CHECK(m.std[0] == kSigmaFloor);
  CHECK(m.std[1] == kSigmaFloor);
}

TEST_CASE("two-point symmetric sequence") {
  LatentSequence seq(2, 1);
  seq << 0.0, 2.0;
  ChannelMomentsd m = compute_moments(seq);
  CHECK(m.mean[0] == doctest::Approx(1.0));
  CHECK(m.std[0] == doctest::Approx(1.0));  // population std, divide by T
}

TEST_CASE("Monte Carlo concentration at 10k samples") {
  DiagonalGaussiand g;
  g.moments.mean = Eigen::Vector2d(3.0, 3.0);
  g.moments.std = Eigen::Vector2d(2.0, 2.0);
  LatentSequence seq = sample_latents(g, 10000, 20260825);
  ChannelMomentsd m = compute_moments(seq);
  for (int d = 0; d < 2; ++d) {
    CHECK(std::abs(m.mean[d] - 3.0) < 0.07);
    CHECK(std::abs(m.std[d] - 2.0) < 0.05);
  }
}

TEST_CASE("non-finite input is rejected with frame and channel") {
  LatentSequence seq(3, 2);
  seq.setZero();
  seq(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(compute_moments(seq),
                       "compute_moments: non-finite value at frame 1, channel 1",
                       std::invalid_argument);
}

TEST_CASE("mean/std length mismatch rejected") {
  CHECK_THROWS_AS(ChannelMomentsd(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(2)),
                  std::invalid_argument);
}

TEST_CASE("negative std rejected") {
  Eigen::VectorXd s(1);
  s << -0.1;
  CHECK_THROWS_AS(ChannelMomentsd(Eigen::VectorXd::Zero(1), s), std::invalid_argument);
}
