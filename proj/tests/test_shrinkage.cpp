#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "idrlab/rng.hpp"
#include "idrlab/shrinkage.hpp"

using namespace idrlab;

TEST_CASE("length-aware rule at the default parameters") {
  CHECK(alpha_length(1.0) == doctest::Approx(0.2).epsilon(1e-12));   // raw 0.0833, clipped
  CHECK(alpha_length(5.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(alpha_length(1e6) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(alpha_length(1e6) < 0.5);
}

TEST_CASE("length-aware rule is monotone and bounded") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ul(0.01, 500.0);
  for (int i = 0; i < 500; ++i) {
    double l1 = ul(rng), l2 = ul(rng);
    if (l1 > l2) std::swap(l1, l2);
    const double a1 = alpha_length(l1), a2 = alpha_length(l2);
    CHECK(a1 <= a2);
    CHECK(a1 >= 0.2);
    CHECK(a2 <= 0.5);
  }
}

TEST_CASE("length-aware rule rejects bad arguments") {
  CHECK_THROWS_AS(alpha_length(0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_length(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_length(1.0, 0.2, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_length(1.0, 0.6, 0.5, 5.0), std::invalid_argument);
}

TEST_CASE("expected cost endpoints and midpoint") {
  MismatchDecomposition m{4.0, 1.0};
  CHECK(expected_cost(0.0, m) == doctest::Approx(4.0));
  CHECK(expected_cost(1.0, m) == doctest::Approx(1.0));
  CHECK(expected_cost(0.5, m) == doctest::Approx(1.25));
  CHECK_THROWS_AS(expected_cost(1.1, m), std::invalid_argument);
}

TEST_CASE("optimal alpha") {
  CHECK(optimal_alpha({2.0, 2.0}) == doctest::Approx(0.5));
  CHECK(optimal_alpha({1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(optimal_alpha({1.0, 3.0}) == doctest::Approx(0.25));
  CHECK(optimal_alpha({0.0, 0.0}) == 0.0);  // nothing to correct
}

TEST_CASE("optimal alpha minimizes the cost over a fine grid") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    MismatchDecomposition m{u(rng), u(rng)};
    if (m.delta_sq + m.xi_n == 0.0) continue;
    const double best = expected_cost(optimal_alpha(m), m);
    for (int k = 0; k <= 100; ++k)
      CHECK(best <= expected_cost(0.01 * k, m) + 1e-12);
  }
}

TEST_CASE("resolve_alpha across policy kinds") {
  PolicyContext ctx;

  ShrinkagePolicy fixed;
  fixed.kind = PolicyKind::Fixed;
  fixed.alpha = 0.5;
  CHECK(resolve_alpha(fixed, ctx).alpha == 0.5);
  CHECK(resolve_alpha(fixed, ctx).deployable);

  ShrinkagePolicy full;
  full.kind = PolicyKind::FullTransport;
  CHECK(resolve_alpha(full, ctx).alpha == 1.0);

  ShrinkagePolicy length;
  length.kind = PolicyKind::LengthAware;
  CHECK_THROWS_AS(resolve_alpha(length, ctx), std::invalid_argument);  // no duration
  ctx.ref_frame_count = 30;  // 1 s at 30 fps
  CHECK(resolve_alpha(length, ctx).alpha == doctest::Approx(0.2));
  ctx.L_seconds = 5.0;  // explicit duration wins over the frame count
  CHECK(resolve_alpha(length, ctx).alpha == doctest::Approx(0.25));

  ShrinkagePolicy oracle;
  oracle.kind = PolicyKind::Oracle;
  oracle.candidates = {0.2, 0.5, 1.0};
  PolicyContext octx;
  CHECK_THROWS_AS(resolve_alpha(oracle, octx), std::invalid_argument);  // no scores
  octx.candidate_scores = {{0.2, 3.1}, {0.5, 2.4}, {1.0, 4.0}};
  ResolvedAlpha r = resolve_alpha(oracle, octx);
  CHECK(r.alpha == 0.5);
  CHECK_FALSE(r.deployable);  // test-set access, upper bound only
}

TEST_CASE("variance-aware policy uses the delta-method Xi_n estimate") {
  ShrinkagePolicy va;
  va.kind = PolicyKind::VarianceAware;
  va.delta_sq_estimate = 0.6;

  PolicyContext ctx;
  CHECK_THROWS_AS(resolve_alpha(va, ctx), std::invalid_argument);

  ChannelMomentsd ref;
  ref.mean = Eigen::VectorXd::Zero(8);
  ref.std = Eigen::VectorXd::Ones(8);
  ctx.ref_moments = ref;
  ctx.ref_frame_count = 30;
  // Xi = 8 * (1/30) * 1.5 = 0.4, alpha = 0.6 / (0.6 + 0.4)
  CHECK(estimate_xi_n(ref, 30) == doctest::Approx(0.4));
  CHECK(resolve_alpha(va, ctx).alpha == doctest::Approx(0.6));

  // explicit mismatch decomposition takes precedence
  ctx.mismatch = MismatchDecomposition{1.0, 3.0};
  CHECK(resolve_alpha(va, ctx).alpha == doctest::Approx(0.25));
}
