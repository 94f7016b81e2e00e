#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idrlab/zeroinit.hpp"

using namespace idrlab;

namespace {

Eigen::VectorXd random_vec(std::uint64_t seed, int n) {
  auto rng = make_engine(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = unit(rng);
  return v;
}

Eigen::VectorXd backbone_only(const ToyDenoiser& net, const Eigen::VectorXd& x) {
  Eigen::VectorXd h = x;
  for (int l = 0; l < net.layers; ++l)
    h = (net.w_backbone[l] * h + net.b_backbone[l]).array().tanh();
  return h;
}

}  // namespace

TEST_CASE("zero gate equals the backbone bit-exactly on 100 random nets") {
  for (int i = 0; i < 100; ++i) {
    ToyDenoiser net = ToyDenoiser::random(derive_seed(1000, i));
    Eigen::VectorXd x = random_vec(derive_seed(2000, i), net.width);
    Eigen::VectorXd out = toy_forward(net, x, Eigen::VectorXd::Zero(net.layers));
    CHECK(out == backbone_only(net, x));
  }
}

TEST_CASE("zero value projection makes the residual branch inert") {
  ToyDenoiser net = ToyDenoiser::random(55, 3, 8, 1);
  for (auto& w : net.w_value) w.setZero();
  Eigen::VectorXd x = random_vec(56, net.width);
  Eigen::VectorXd gamma(3);
  gamma << 0.7, -1.2, 3.0;
  Eigen::VectorXd out = toy_forward(net, x, gamma);
  CHECK((out - backbone_only(net, x)).norm() == 0.0);
}

TEST_CASE("memory contents are invisible while the gate is closed") {
  ToyDenoiser net = ToyDenoiser::random(77);
  Eigen::VectorXd x = random_vec(78, net.width);
  Eigen::VectorXd base = toy_forward(net, x, Eigen::VectorXd::Zero(net.layers));
  net.memory.setConstant(42.0);
  CHECK(toy_forward(net, x, Eigen::VectorXd::Zero(net.layers)) == base);
}

TEST_CASE("seed-fixed forward pass regression") {
  ToyDenoiser net = ToyDenoiser::random(123456789ULL);
  Eigen::VectorXd x = random_vec(42, net.width);
  Eigen::VectorXd gamma(3);
  gamma << 0.3, -0.2, 0.1;
  Eigen::VectorXd out = toy_forward(net, x, gamma);
  // golden values recorded at first build
  Eigen::VectorXd expected(8);
  expected << 0.37400918775863912, -0.33271580634453235, -0.55782017463716427,
      0.69895282916790069, 0.048026430652193905, -0.70046536154844274,
      -0.79597514246133605, 0.16394440175526842;
  CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gate-space remainder is quadratic") {
  for (int i = 0; i < 10; ++i) {
    ToyDenoiser net = ToyDenoiser::random(derive_seed(5, i));
    Eigen::VectorXd x = random_vec(derive_seed(6, i), net.width);
    Eigen::VectorXd dir = random_vec(derive_seed(7, i), net.layers);
    FirstOrderCheck check = verify_first_order(net, x, dir, {1e-1, 1e-2, 1e-3});
    CHECK(check.slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("first-order term is linear in the scale") {
  ToyDenoiser net = ToyDenoiser::random(314);
  Eigen::VectorXd x = random_vec(315, net.width);
  Eigen::VectorXd dir = random_vec(316, net.layers);
  Eigen::VectorXd u = dir / dir.norm();
  Eigen::VectorXd base = toy_forward(net, x, Eigen::VectorXd::Zero(net.layers));
  const double eps = 1e-4;
  const double full = (toy_forward(net, x, eps * u) - base).norm();
  const double half = (toy_forward(net, x, 0.5 * eps * u) - base).norm();
  CHECK(half == doctest::Approx(0.5 * full).epsilon(0.01));
}

TEST_CASE("zero direction is rejected") {
  ToyDenoiser net = ToyDenoiser::random(9);
  Eigen::VectorXd x = random_vec(10, net.width);
  CHECK_THROWS_AS(verify_first_order(net, x, Eigen::VectorXd::Zero(net.layers), {0.1, 0.01}),
                  std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  ToyDenoiser net = ToyDenoiser::random(9);
  CHECK_THROWS_AS(toy_forward(net, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(toy_forward(net, Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("lemma-1 harness passes at modest trial counts") {
  ExperimentReport rep = run_lemma1_verification(25, 2024);
  CHECK(rep.passed);
  CHECK(rep.rows[0].empirical == rep.rows[0].predicted);  // all exact matches
}
