#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace secfbl {

inline constexpr double kLog2E = std::numbers::log2e;
inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kInfiniteBlocklength = std::numeric_limits<double>::infinity();

/// Smallest probability handed to Q^{-1}; closed-form optima below this are floored.
inline constexpr double kMinProbability = 1e-300;

/// Link-level parameters shared by every stage of the optimizer.
///
/// `blocklength` may be +inf, which switches every back-off term off
/// (infinite-blocklength regime). Powers are linear watts.
struct FblParams {
  double blocklength = 200.0;
  double symbol_power = 0.1;      // P
  double noise_user = 1e-13;      // sigma^2
  double noise_eve = 1e-13;       // sigma_e^2
  double alpha = 10.0;            // smooth-max sharpness
  double weight = 0.01;           // rate weight w in the weighted-sum objective

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  bool infinite_blocklength() const { return std::isinf(blocklength); }
  /// sqrt(1/L); zero in the infinite-blocklength regime.
  double inv_sqrt_blocklength() const { return infinite_blocklength() ? 0.0 : 1.0 / std::sqrt(blocklength); }
};

/// Gaussian tail probability Q(x) = P[Z > x].
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1). Throws std::domain_error outside the open interval.
double gaussian_q_inv(double p);

/// Channel dispersion 2 rho / (1 + rho) (log2 e)^2 of an i.i.d. Gaussian codebook.
double dispersion(double sinr);

/// (1/alpha) ln sum exp(alpha x_i), evaluated with the max shifted out.
double smooth_max(std::span<const double> values, double alpha);

/// Tangent-line coefficients of the concave majorant of sqrt(2x/(1+x)) in ln(1+x).
struct TangentCoeffs {
  double slope;      // q
  double intercept;  // r
};

/// sqrt(2x/(1+x)) <= slope * ln(1+x) + intercept for all x > 0, with equality at x = point.
TangentCoeffs tangent_coeffs(double point);

/// Finite-blocklength secrecy rate of one stream from its SINRs.
///
/// R_k - sqrt(V_k/L) Q^{-1}(eps) - max_m { R^e_m + sqrt(V^e_m/L) Q^{-1}(delta_m) }.
/// The value is returned raw and may be negative.
double secrecy_rate(double user_sinr, std::span<const double> eve_sinrs, double error_prob,
                    std::span<const double> leakage, double blocklength);

inline double clip_nonnegative(double rate) { return rate > 0.0 ? rate : 0.0; }

}  // namespace secfbl
