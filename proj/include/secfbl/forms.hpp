#pragma once

#include <vector>

#include "secfbl/channel.hpp"
#include "secfbl/core_math.hpp"
#include "secfbl/linalg.hpp"

namespace secfbl {

enum class CsitMode { Perfect, Covariance };

/// Block-diagonal quadratic forms over the stacked precoder, kept per block.
///
/// With S_k the user block and T_m the wiretap block (all N x N):
///   A_k     = blkdiag(S_k, ..., S_k) + (sigma^2/P) I
///   B_k     = A_k with block k removed
///   C_m     = blkdiag(T_m, ..., T_m) + (sigma_e^2/P) I
///   D_{m,k} = C_m with block k removed
/// S_k = gamma_k h_k h_k^H; T_m = gamma^e_m g_m g_m^H (perfect) or gamma^e_m R^e_m (covariance).
struct QuadraticFormSet {
  int antennas = 0;
  int users = 0;
  CsitMode mode = CsitMode::Perfect;
  std::vector<CMatrix> user_blocks;
  std::vector<CMatrix> eve_blocks;
  double user_loading = 0.0;
  double eve_loading = 0.0;

  int eavesdroppers() const { return static_cast<int>(eve_blocks.size()); }
  int dimension() const { return antennas * users; }
  QuadraticFormSet without_eavesdroppers() const;
};

QuadraticFormSet build_forms(const ChannelRealization& channels, const FblParams& params);
QuadraticFormSet build_forms_partial(const ChannelRealization& channels, const FblParams& params);
inline QuadraticFormSet build_forms(const ChannelRealization& channels, const FblParams& params, CsitMode mode) {
  return mode == CsitMode::Perfect ? build_forms(channels, params) : build_forms_partial(channels, params);
}

/// Every quadratic form evaluated at one stacked precoder.
struct FormValues {
  Eigen::VectorXd a;            // f^H A_k f
  Eigen::VectorXd b;            // f^H B_k f
  Eigen::VectorXd user_signal;  // a_k - b_k
  Eigen::VectorXd c;            // f^H C_m f
  Eigen::MatrixXd d;            // f^H D_{m,k} f, M x K
  Eigen::MatrixXd eve_signal;   // c_m - d_{m,k}

  double user_sinr(int k) const { return user_signal[k] / b[k]; }
  double eve_sinr(int m, int k) const { return eve_signal(m, k) / d(m, k); }
  /// ln(a_k / b_k) = ln(1 + SINR) without cancellation.
  double user_log_ratio(int k) const { return std::log1p(user_sinr(k)); }
  double eve_log_ratio(int m, int k) const { return std::log1p(eve_sinr(m, k)); }
};

FormValues evaluate_forms(const QuadraticFormSet& forms, const CVector& f);

/// Error probabilities (K) and leakage levels (M x K) at which the rate is evaluated.
struct ReliabilityLevels {
  Eigen::VectorXd error;
  Eigen::MatrixXd leakage;

  static ReliabilityLevels uniform(int users, int eves, double error, double leakage);
};

/// Linearization and smoothing scalars of the secrecy-rate lower bound.
struct BoundCoefficients {
  Eigen::VectorXd user_point;      // rho~_k
  Eigen::MatrixXd eve_point;       // rho~^e_{m,k}
  Eigen::VectorXd omega_user;      // clamped to [kOmegaFloor, 1]; drives the optimizer
  Eigen::VectorXd omega_user_raw;  // exact value, may be negative
  Eigen::VectorXd psi_user;
  Eigen::MatrixXd omega_eve;
  Eigen::MatrixXd psi_eve;
  Eigen::MatrixXd log_beta;        // alpha * psi_eve
  double alpha = 0.0;
  int clamped_users = 0;
};

inline constexpr double kOmegaFloor = 1e-3;
inline constexpr double kSinrFloor = 1e-9;

/// Coefficients for explicit linearization points.
BoundCoefficients bound_coeffs_with_points(const Eigen::VectorXd& user_points, const Eigen::MatrixXd& eve_points,
                                           const ReliabilityLevels& levels, const FblParams& params);

/// Coefficients linearized at the SINRs of f (tangent bound).
BoundCoefficients bound_coeffs_at(const CVector& f, const QuadraticFormSet& forms, const ReliabilityLevels& levels,
                                  const FblParams& params);

/// log2 lambda(f): sum_k [ omega_k log2(a/b) - (1/alpha) ln sum_m beta (c/d)^{omega^e} ].
double objective_log_lambda(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs);

/// Per-user smoothed and linearized lower bound on the secrecy rate (uses the unclamped omega_k).
std::vector<double> secrecy_lb(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs);

}  // namespace secfbl
