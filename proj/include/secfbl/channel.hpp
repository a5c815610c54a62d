#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "secfbl/linalg.hpp"

namespace secfbl {

/// Drop geometry and propagation settings for one indoor AP.
struct ScenarioConfig {
  int antennas = 8;
  int users = 4;
  int eavesdroppers = 4;
  double aod_correlation = 0.1;  // eve AoD offset ~ U(-Delta pi, Delta pi)
  double bandwidth_hz = 10e6;
  double carrier_hz = 5.2e9;
  double loss_coefficient = 31.0;
  double noise_figure_db = 5.0;
  double noise_psd_dbm_hz = -174.0;
  double user_min_distance_m = 5.0;
  double user_max_distance_m = 50.0;
  double eve_max_distance_m = 5.0;
  double eve_min_distance_m = 0.5;  // eves closer than this to their anchor are redrawn
  double min_ap_distance_m = 1.0;   // ITU-R indoor model is not defined below 1 m
  double angular_spread_deg = 10.0;
  double antenna_spacing = 0.5;  // wavelengths
  std::uint64_t seed = 1;

  void validate() const;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

/// One Monte-Carlo drop: small-scale vectors, large-scale gains and the covariances they were drawn from.
struct ChannelRealization {
  int antennas = 0;
  std::vector<CVector> user_channels;  // h_k
  std::vector<CVector> eve_channels;   // g_m
  std::vector<double> user_gains;      // gamma_k
  std::vector<double> eve_gains;       // gamma^e_m
  std::vector<CMatrix> user_covariances;
  std::vector<CMatrix> eve_covariances;
  std::vector<double> user_aods;
  std::vector<double> eve_aods;
  std::vector<Position> user_positions;
  std::vector<Position> eve_positions;
  std::vector<int> eve_anchors;  // index of the user each eve is placed around
  double noise_power = 0.0;      // watts, identical for users and eves

  int users() const { return static_cast<int>(user_channels.size()); }
  int eavesdroppers() const { return static_cast<int>(eve_channels.size()); }
};

/// ULA response [exp(-j 2 pi d n sin(theta))]_n.
CVector steering_vector(double theta, int antennas, double spacing);

/// One-ring spatial covariance: the steering outer product averaged over
/// angles uniform in [theta - spread, theta + spread], trace normalized to N.
CMatrix one_ring_covariance(double theta, double angular_spread, int antennas, double spacing);

/// h = R^{1/2} z with z ~ CN(0, I). Throws std::invalid_argument if R is not PSD.
CVector sample_channel(const CMatrix& covariance, std::mt19937_64& rng);

struct LinkBudget {
  double gain;         // linear large-scale gain
  double noise_power;  // watts
  double pathloss_db;
  double noise_dbm;
};

/// ITU-R P.1238 indoor pathloss (single floor, no penetration term) and thermal noise.
LinkBudget pathloss_itu_indoor(double distance_m, double carrier_hz, double loss_coefficient,
                               double noise_figure_db, double noise_psd_dbm_hz, double bandwidth_hz);

/// Draws a full realization; deterministic in config.seed.
ChannelRealization generate_drop(const ScenarioConfig& config);

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace secfbl
