#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "secfbl/channel.hpp"

using namespace secfbl;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("one_ring_covariance: trapezoid oracle and structure") {
  const double spread = 10.0 * kPi / 180.0;
  const CMatrix r = one_ring_covariance(0.0, spread, 4, 0.5);
  const CMatrix ref = oracle::trapezoid_one_ring(0.0, spread, 4, 0.5, 100000);
  CHECK((r - ref).cwiseAbs().maxCoeff() <= 1e-6);

  for (double theta : {-2.0, -0.3, 0.7, 1.4}) {
    const CMatrix c = one_ring_covariance(theta, spread, 8, 0.5);
    CHECK((c - c.adjoint()).norm() <= 1e-12);
    CHECK(c.trace().real() == doctest::Approx(8.0).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
  CHECK(std::abs(one_ring_covariance(0.4, spread, 1, 0.5)(0, 0) - 1.0) <= 1e-14);

  // Narrow spread collapses to the steering outer product.
  const CVector a = steering_vector(0.3, 6, 0.5);
  const CMatrix narrow = one_ring_covariance(0.3, 1e-7, 6, 0.5);
  CHECK((narrow - a * a.adjoint()).norm() <= 1e-6);
  CHECK_THROWS(one_ring_covariance(0.0, 0.0, 4, 0.5));
  CHECK_THROWS(one_ring_covariance(0.0, 0.1, 0, 0.5));
}

TEST_CASE("sample_channel: second moments") {
  std::mt19937_64 rng(5);
  const CMatrix r = one_ring_covariance(0.2, 10.0 * kPi / 180.0, 4, 0.5);
  CMatrix acc = CMatrix::Zero(4, 4);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const CVector h = sample_channel(r, rng);
    acc += h * h.adjoint();
  }
  acc /= draws;
  CHECK((acc - r).norm() / r.norm() <= 0.02);

  // R = I: each entry CN(0, 1), so |h_n|^2 ~ Exp(1).
  std::vector<double> power;
  const CMatrix eye = CMatrix::Identity(3, 3);
  for (int i = 0; i < 20000; ++i) power.push_back(std::norm(sample_channel(eye, rng)[1]));
  CHECK(oracle::ks_statistic(power, [](double x) { return 1.0 - std::exp(-x); }) <= 1.95 / std::sqrt(20000.0));

  // Rank one: every draw is colinear with the principal vector.
  const CVector a = steering_vector(0.5, 4, 0.5);
  const CMatrix rank1 = a * a.adjoint() / 1.0;
  for (int i = 0; i < 20; ++i) {
    const CVector h = sample_channel(rank1, rng);
    CHECK(std::abs(a.dot(h)) == doctest::Approx(a.norm() * h.norm()).epsilon(1e-9));
  }

  CMatrix indefinite = CMatrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(sample_channel(indefinite, rng), std::invalid_argument);
}

TEST_CASE("pathloss_itu_indoor") {
  const LinkBudget near = pathloss_itu_indoor(10.0, 5.2e9, 31.0, 5.0, -174.0, 10e6);
  const double hand = 20.0 * std::log10(5200.0) + 31.0 * 1.0 - 28.0;
  CHECK(std::fabs(near.pathloss_db - hand) <= 1e-9);
  CHECK(near.gain == doctest::Approx(std::pow(10.0, -hand / 10.0)).epsilon(1e-12));
  CHECK(near.noise_dbm == doctest::Approx(-99.0).epsilon(1e-12));
  CHECK(near.noise_power == doctest::Approx(std::pow(10.0, -129.0 / 10.0)).epsilon(1e-12));
  const LinkBudget far = pathloss_itu_indoor(20.0, 5.2e9, 31.0, 5.0, -174.0, 10e6);
  CHECK(far.pathloss_db - near.pathloss_db == doctest::Approx(31.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(pathloss_itu_indoor(0.0, 5.2e9, 31.0, 5.0, -174.0, 10e6), std::domain_error);
}

TEST_CASE("generate_drop: determinism and geometry") {
  ScenarioConfig cfg;
  cfg.seed = 1234;
  const ChannelRealization a = generate_drop(cfg);
  const ChannelRealization b = generate_drop(cfg);
  REQUIRE(a.users() == 4);
  REQUIRE(a.eavesdroppers() == 4);
  for (int k = 0; k < a.users(); ++k) {
    CHECK(a.user_channels[k] == b.user_channels[k]);
    CHECK(a.user_gains[k] == b.user_gains[k]);
    const double d = std::hypot(a.user_positions[k].x, a.user_positions[k].y);
    CHECK(d >= 5.0);
    CHECK(d <= 50.0);
  }
  for (int m = 0; m < a.eavesdroppers(); ++m) {
    CHECK(a.eve_channels[m] == b.eve_channels[m]);
    const Position& anchor = a.user_positions[a.eve_anchors[m]];
    const double d = std::hypot(a.eve_positions[m].x - anchor.x, a.eve_positions[m].y - anchor.y);
    CHECK(d <= 5.0);
    CHECK(d >= 0.5);
    CHECK(std::fabs(a.eve_aods[m] - a.user_aods[a.eve_anchors[m]]) <= 0.1 * kPi);
    CHECK(a.eve_gains[m] > 0.0);
  }
  CHECK(a.noise_power > 0.0);

  cfg.aod_correlation = 1e-9;
  const ChannelRealization tight = generate_drop(cfg);
  for (int m = 0; m < tight.eavesdroppers(); ++m) {
    CHECK(std::fabs(tight.eve_aods[m] - tight.user_aods[tight.eve_anchors[m]]) <= 1e-8);
  }

  ScenarioConfig bad;
  bad.antennas = 2;
  bad.users = 3;
  CHECK_THROWS(generate_drop(bad));
  bad = ScenarioConfig{};
  bad.aod_correlation = 1.0;
  CHECK_THROWS(generate_drop(bad));
}

TEST_CASE("generate_drop: eve offsets are uniform in area") {
  ScenarioConfig cfg;
  cfg.antennas = 1;
  cfg.users = 1;
  cfg.eavesdroppers = 1;
  std::vector<double> dist;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    cfg.seed = s;
    const ChannelRealization d = generate_drop(cfg);
    const Position& u = d.user_positions[0];
    dist.push_back(std::hypot(d.eve_positions[0].x - u.x, d.eve_positions[0].y - u.y));
  }
  const double lo2 = 0.25, hi2 = 25.0;
  const double ks = oracle::ks_statistic(dist, [&](double r) { return (r * r - lo2) / (hi2 - lo2); });
  CHECK(ks <= 1.95 / std::sqrt(10000.0));
}
