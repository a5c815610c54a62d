#pragma once

#include <optional>
#include <vector>

#include "secfbl/gpi.hpp"
#include "secfbl/reliability.hpp"

namespace secfbl {

struct JointSettings {
  double tolerance = 0.01;  // on the increment of the weighted objective
  int max_iterations = 5;
  GpiSettings inner;
  CsitMode mode = CsitMode::Perfect;
  ReliabilityCaps caps;

  void validate() const;
};

/// Floor applied to the infinite-blocklength normalizer when the raw value is not positive.
inline constexpr double kMinRInfinity = 1e-3;

struct JointResult {
  CVector precoder;
  ReliabilityState reliability;
  std::vector<double> objective;  // index 0 is the starting point (MRT at the caps)
  double r_infinity = 0.0;        // normalizer actually used
  double r_infinity_raw = 0.0;
  std::vector<double> secrecy_rates;  // exact, on the true channels
  double sum_secrecy_rate = 0.0;
  double sum_rate = 0.0;
  double max_error = 0.0;
  double max_leakage = 0.0;
  int outer_iterations = 0;
  int inner_iterations_total = 0;
  bool returned_start = false;  // the starting point beat every iterate
};

/// (w/R_inf) sum_k R_k + (1 - w) [(eps-hat_max - max eps)/eps-hat_max + (delta-hat_max - max delta)/delta-hat_max].
double weighted_objective(std::span<const double> secrecy_rates, const ReliabilityLevels& levels, double r_inf,
                          const ReliabilityCaps& caps, double weight);

/// Same with the rates taken from the SINRs of f on `forms` (averaged wiretap SINRs for covariance forms).
double weighted_objective(const CVector& f, const QuadraticFormSet& forms, const ReliabilityLevels& levels,
                          double r_inf, const ReliabilityCaps& caps, const FblParams& params);

/// Raw infinite-blocklength normalizer for `forms`, started from MRT.
double compute_r_infinity(const ChannelRealization& channels, const QuadraticFormSet& forms, const FblParams& params,
                          const GpiSettings& inner);

/// Alternates precoder optimization and the closed-form reliability update.
/// `r_infinity` skips the normalizer computation when supplied (raw value; the floor is still applied).
JointResult joint_solve(const ChannelRealization& channels, const FblParams& params, const JointSettings& settings,
                        std::optional<double> r_infinity = std::nullopt);

}  // namespace secfbl
