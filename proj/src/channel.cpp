#include "secfbl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace secfbl {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussLegendre gauss_legendre(int order) {
  GaussLegendre rule{std::vector<double>(order), std::vector<double>(order)};
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      derivative = order * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / derivative;
      z -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

const GaussLegendre& panel_rule() {
  static const GaussLegendre rule = gauss_legendre(16);
  return rule;
}

Position polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

double norm(const Position& p) { return std::hypot(p.x, p.y); }

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  if (users < 1) fail("users must be >= 1");
  if (antennas < users) fail("antennas must be >= users");
  if (eavesdroppers < 1) fail("eavesdroppers must be >= 1");
  if (!(aod_correlation > 0.0 && aod_correlation < 1.0)) fail("aod_correlation must lie in (0, 1)");
  if (!(bandwidth_hz > 0.0) || !(carrier_hz > 0.0)) fail("bandwidth and carrier must be positive");
  if (!(user_min_distance_m > 0.0 && user_min_distance_m < user_max_distance_m)) fail("user distance range");
  if (!(eve_min_distance_m > 0.0 && eve_min_distance_m < eve_max_distance_m)) fail("eve distance range");
  if (!(min_ap_distance_m > 0.0)) fail("min_ap_distance_m must be positive");
  if (!(angular_spread_deg > 0.0)) fail("angular_spread_deg must be positive");
  if (!(antenna_spacing > 0.0)) fail("antenna_spacing must be positive");
}

CVector steering_vector(double theta, int antennas, double spacing) {
  CVector a(antennas);
  const double phase = -2.0 * kPi * spacing * std::sin(theta);
  for (int n = 0; n < antennas; ++n) a[n] = std::polar(1.0, phase * n);
  return a;
}

CMatrix one_ring_covariance(double theta, double angular_spread, int antennas, double spacing) {
  if (antennas < 1) throw std::invalid_argument("one_ring_covariance: antennas must be >= 1");
  if (!(angular_spread > 0.0)) throw std::invalid_argument("one_ring_covariance: spread must be positive");

  // Composite Gauss-Legendre over the arrival arc; positive weights keep the sum PSD.
  // The array is uniform and linear, so R is Hermitian Toeplitz: integrate the first column only.
  const auto& rule = panel_rule();
  const int panels = 32 + 4 * antennas;
  const double width = 2.0 * angular_spread / panels;
  CVector column = CVector::Zero(antennas);
  for (int p = 0; p < panels; ++p) {
    const double centre = theta - angular_spread + (p + 0.5) * width;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double phi = centre + 0.5 * width * rule.nodes[i];
      column += (0.5 * width * rule.weights[i]) * steering_vector(phi, antennas, spacing);
    }
  }
  column /= column[0].real();  // trace N; column[0] is the total weight
  CMatrix cov(antennas, antennas);
  for (int p = 0; p < antennas; ++p) {
    for (int q = 0; q < antennas; ++q) cov(p, q) = p >= q ? column[p - q] : std::conj(column[q - p]);
  }
  return cov;
}

CVector sample_channel(const CMatrix& covariance, std::mt19937_64& rng) {
  const Eigen::Index n = covariance.rows();
  if (n == 0 || covariance.cols() != n) throw std::invalid_argument("sample_channel: covariance must be square");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(covariance);
  if (eig.info() != Eigen::Success) throw std::invalid_argument("sample_channel: factorization failed");
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument("sample_channel: covariance is not positive semidefinite");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();

  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z[i] = Complex(re, im);
  }
  return eig.eigenvectors() * (root.cast<Complex>().asDiagonal() * (eig.eigenvectors().adjoint() * z));
}

LinkBudget pathloss_itu_indoor(double distance_m, double carrier_hz, double loss_coefficient,
                               double noise_figure_db, double noise_psd_dbm_hz, double bandwidth_hz) {
  if (!(distance_m > 0.0)) throw std::domain_error("pathloss_itu_indoor: distance must be positive");
  const double carrier_mhz = carrier_hz / 1e6;
  const double pathloss_db = 20.0 * std::log10(carrier_mhz) + loss_coefficient * std::log10(distance_m) - 28.0;
  const double noise_dbm = noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return {std::pow(10.0, -pathloss_db / 10.0), dbm_to_watts(noise_dbm), pathloss_db, noise_dbm};
}

ChannelRealization generate_drop(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const int n = config.antennas;
  const int k_users = config.users;
  const int m_eves = config.eavesdroppers;
  const double spread = config.angular_spread_deg * kPi / 180.0;

  auto budget = [&](double d) {
    return pathloss_itu_indoor(d, config.carrier_hz, config.loss_coefficient, config.noise_figure_db,
                               config.noise_psd_dbm_hz, config.bandwidth_hz);
  };

  ChannelRealization drop;
  drop.antennas = n;

  // Users uniform in area over the annulus around the AP.
  const double r_lo2 = config.user_min_distance_m * config.user_min_distance_m;
  const double r_hi2 = config.user_max_distance_m * config.user_max_distance_m;
  for (int k = 0; k < k_users; ++k) {
    const double radius = std::sqrt(uniform(r_lo2, r_hi2));
    const double angle = uniform(-kPi, kPi);
    drop.user_positions.push_back(polar(radius, angle));
    drop.user_aods.push_back(angle);
    const LinkBudget link = budget(radius);
    drop.user_gains.push_back(link.gain);
    drop.noise_power = link.noise_power;
  }

  // Eves uniform in area around a random anchor user; AoD jittered around the anchor's.
  const double e_lo2 = config.eve_min_distance_m * config.eve_min_distance_m;
  const double e_hi2 = config.eve_max_distance_m * config.eve_max_distance_m;
  std::uniform_int_distribution<int> pick_user(0, k_users - 1);
  for (int m = 0; m < m_eves; ++m) {
    const int anchor = pick_user(rng);
    Position pos;
    do {
      const double radius = std::sqrt(uniform(e_lo2, e_hi2));
      const double angle = uniform(-kPi, kPi);
      const Position offset = polar(radius, angle);
      pos = {drop.user_positions[anchor].x + offset.x, drop.user_positions[anchor].y + offset.y};
    } while (norm(pos) < config.min_ap_distance_m);
    drop.eve_positions.push_back(pos);
    drop.eve_anchors.push_back(anchor);
    const double jitter = config.aod_correlation * kPi;
    drop.eve_aods.push_back(drop.user_aods[anchor] + uniform(-jitter, jitter));
    drop.eve_gains.push_back(budget(norm(pos)).gain);
  }

  for (int k = 0; k < k_users; ++k) {
    drop.user_covariances.push_back(one_ring_covariance(drop.user_aods[k], spread, n, config.antenna_spacing));
    drop.user_channels.push_back(sample_channel(drop.user_covariances.back(), rng));
  }
  for (int m = 0; m < m_eves; ++m) {
    drop.eve_covariances.push_back(one_ring_covariance(drop.eve_aods[m], spread, n, config.antenna_spacing));
    drop.eve_channels.push_back(sample_channel(drop.eve_covariances.back(), rng));
  }
  return drop;
}

}  // namespace secfbl
