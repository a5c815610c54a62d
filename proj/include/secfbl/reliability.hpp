#pragma once

#include <optional>
#include <span>
#include <vector>

#include "secfbl/forms.hpp"

namespace secfbl {

/// Upper limits on the per-user error probability and the per-link leakage.
struct ReliabilityCaps {
  Eigen::VectorXd error;    // eps-hat, K
  Eigen::MatrixXd leakage;  // delta-hat, M x K

  double error_max() const { return error.maxCoeff(); }
  double leakage_max() const { return leakage.size() > 0 ? leakage.maxCoeff() : 0.0; }
  ReliabilityLevels as_levels() const { return {error, leakage}; }

  /// Throws std::invalid_argument unless every cap lies in (0, 1/2).
  void validate() const;

  /// Caps evenly spaced on [lo, hi] in index order: eps-hat over users, delta-hat over eves (same for every user).
  static ReliabilityCaps linspace(int users, int eves, double lo = 1e-6, double hi = 2e-6);
};

struct ReliabilityState {
  ReliabilityLevels levels;
  ReliabilityCaps caps;
  double tau = 0.0;            // max_k eps_k
  double xi = 0.0;             // max_{m,k} delta_{m,k}
  int ell = 1;                 // 1 + number of users held at their cap
  std::vector<int> j;          // per user: 1 + number of eves held at their cap
  bool error_saturated = false;    // every eps_k sits at its cap
  bool leakage_saturated = false;  // every delta_{m,k} sits at its cap
};

/// Minimizer over t of (w/R_inf) S Q^{-1}(t) / sqrt(L) + (1 - w) t / cap_max, where S is the sum of sqrt(V).
/// Returns std::nullopt when the logarithm's argument is <= 1, i.e. the caps saturate.
/// The result is floored at kMinProbability. Throws std::invalid_argument if r_inf <= 0.
std::optional<double> closed_form_level(double sum_sqrt_dispersion, double r_inf, double weight, double cap_max,
                                        double blocklength);

/// tau* for the dispersions V_k of the users that are not held at their cap.
std::optional<double> tau_star(std::span<const double> dispersions, double r_inf, double weight, double cap_max,
                               double blocklength);

/// xi* for the wiretap dispersions V^e_{m,k} of the links that are not held at their cap.
std::optional<double> xi_star(std::span<const double> dispersions, double r_inf, double weight, double cap_max,
                              double blocklength);

/// Weighted back-off plus reliability objective that Phase II minimizes.
double phase2_objective(const ReliabilityLevels& levels, const Eigen::VectorXd& user_dispersion,
                        const Eigen::MatrixXd& eve_dispersion, const ReliabilityCaps& caps, double r_inf,
                        const FblParams& params);

/// Phase II on explicit dispersions.
ReliabilityState solve_reliability(const Eigen::VectorXd& user_dispersion, const Eigen::MatrixXd& eve_dispersion,
                                   const ReliabilityCaps& caps, double r_inf, const FblParams& params);

/// Phase II at precoder f with dispersions from its SINRs on perfect-CSIT forms.
ReliabilityState solve_phase2(const CVector& f, const QuadraticFormSet& forms, const ReliabilityCaps& caps,
                              double r_inf, const FblParams& params);

/// Phase II with the averaged wiretap SINRs of covariance forms.
ReliabilityState solve_phase2_partial(const CVector& f, const QuadraticFormSet& forms, const ReliabilityCaps& caps,
                                      double r_inf, const FblParams& params);

}  // namespace secfbl
