#include "secfbl/reliability.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "secfbl/secrecy.hpp"

namespace secfbl {

void ReliabilityCaps::validate() const {
  auto ok = [](double c) { return c > 0.0 && c < 0.5; };
  if (error.size() == 0) throw std::invalid_argument("caps: no users");
  for (Eigen::Index i = 0; i < error.size(); ++i) {
    if (!ok(error[i])) throw std::invalid_argument("caps: error caps must lie in (0, 1/2)");
  }
  if (leakage.size() > 0 && leakage.cols() != error.size()) throw std::invalid_argument("caps: shape mismatch");
  for (Eigen::Index i = 0; i < leakage.size(); ++i) {
    if (!ok(leakage.data()[i])) throw std::invalid_argument("caps: leakage caps must lie in (0, 1/2)");
  }
}

ReliabilityCaps ReliabilityCaps::linspace(int users, int eves, double lo, double hi) {
  auto point = [&](int i, int count) { return count > 1 ? lo + (hi - lo) * i / (count - 1) : lo; };
  ReliabilityCaps caps{Eigen::VectorXd(users), Eigen::MatrixXd(eves, users)};
  for (int k = 0; k < users; ++k) caps.error[k] = point(k, users);
  for (int m = 0; m < eves; ++m) caps.leakage.row(m).setConstant(point(m, eves));
  caps.validate();
  return caps;
}

std::optional<double> closed_form_level(double sum_sqrt_dispersion, double r_inf, double weight, double cap_max,
                                        double blocklength) {
  if (!(r_inf > 0.0)) throw std::invalid_argument("closed_form_level: R_inf must be positive");
  if (!(cap_max > 0.0)) throw std::invalid_argument("closed_form_level: cap_max must be positive");
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("closed_form_level: weight outside [0, 1]");
  if (weight == 1.0) return std::nullopt;
  // No back-off left to trade against: push the level to the floor.
  if (weight == 0.0 || std::isinf(blocklength) || sum_sqrt_dispersion <= 0.0) return kMinProbability;

  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  const double log_arg = 0.5 * std::log(blocklength) + std::log1p(-weight) + std::log(r_inf) - std::log(cap_max) -
                         std::log(weight) - kHalfLog2Pi - std::log(sum_sqrt_dispersion);
  if (!(log_arg > 0.0)) return std::nullopt;
  return std::max(gaussian_q(std::sqrt(2.0 * log_arg)), kMinProbability);
}

namespace {

double sum_sqrt(std::span<const double> dispersions) {
  double s = 0.0;
  for (double v : dispersions) {
    if (!(v >= 0.0)) throw std::domain_error("dispersion must be nonnegative");
    s += std::sqrt(v);
  }
  return s;
}

struct LevelSolution {
  std::vector<double> levels;
  double top = 0.0;  // max of levels
  bool saturated = false;
};

// (w/R_inf) sum_i sqrt(V_i/L) Q^{-1}(x_i) + (1 - w) max(x) / cap_max.
double level_objective(std::span<const double> levels, std::span<const double> dispersions, double r_inf,
                       double cap_max, const FblParams& params) {
  const double inv_sqrt_l = params.inv_sqrt_blocklength();
  double backoff = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (inv_sqrt_l > 0.0 && dispersions[i] > 0.0) backoff += std::sqrt(dispersions[i]) * gaussian_q_inv(levels[i]);
    top = std::max(top, levels[i]);
  }
  return params.weight / r_inf * backoff * inv_sqrt_l + (1.0 - params.weight) * top / cap_max;
}

// The problem is separable: with a common top level t the optimum is x_i = min(cap_i, t), and the
// objective is convex in t. Scan every hold-count against the sorted caps; a candidate is consistent
// when its closed-form level falls between the last held cap and the first free one.
LevelSolution solve_levels(std::span<const double> caps, std::span<const double> dispersions, double r_inf,
                           const FblParams& params) {
  const std::size_t n = caps.size();
  LevelSolution best{std::vector<double>(caps.begin(), caps.end()), 0.0, true};
  if (n == 0) return best;
  const double cap_max = *std::max_element(caps.begin(), caps.end());
  best.top = cap_max;
  double best_value = level_objective(best.levels, dispersions, r_inf, cap_max, params);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return caps[a] < caps[b]; });

  std::vector<double> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = dispersions[order[i]];
  std::vector<double> levels(n);
  for (std::size_t held = 0; held < n; ++held) {
    const std::optional<double> t = closed_form_level(sum_sqrt(std::span(active).subspan(held)), r_inf,
                                                      params.weight, cap_max, params.blocklength);
    if (!t) continue;
    const bool above_held = held == 0 || caps[order[held - 1]] < *t;
    const bool below_free = *t <= caps[order[held]];
    if (!above_held || !below_free) continue;
    for (std::size_t i = 0; i < n; ++i) levels[i] = std::min(caps[i], *t);
    const double value = level_objective(levels, dispersions, r_inf, cap_max, params);
    if (value < best_value) {
      best_value = value;
      best = {levels, *t, false};
    }
  }
  return best;
}

}  // namespace

std::optional<double> tau_star(std::span<const double> dispersions, double r_inf, double weight, double cap_max,
                               double blocklength) {
  return closed_form_level(sum_sqrt(dispersions), r_inf, weight, cap_max, blocklength);
}

std::optional<double> xi_star(std::span<const double> dispersions, double r_inf, double weight, double cap_max,
                              double blocklength) {
  return closed_form_level(sum_sqrt(dispersions), r_inf, weight, cap_max, blocklength);
}

double phase2_objective(const ReliabilityLevels& levels, const Eigen::VectorXd& user_dispersion,
                        const Eigen::MatrixXd& eve_dispersion, const ReliabilityCaps& caps, double r_inf,
                        const FblParams& params) {
  const std::span<const double> eps(levels.error.data(), levels.error.size());
  const std::span<const double> vu(user_dispersion.data(), user_dispersion.size());
  double value = level_objective(eps, vu, r_inf, caps.error_max(), params);
  if (levels.leakage.size() > 0) {
    const std::span<const double> del(levels.leakage.data(), levels.leakage.size());
    const std::span<const double> ve(eve_dispersion.data(), eve_dispersion.size());
    value += level_objective(del, ve, r_inf, caps.leakage_max(), params);
  }
  return value;
}

ReliabilityState solve_reliability(const Eigen::VectorXd& user_dispersion, const Eigen::MatrixXd& eve_dispersion,
                                   const ReliabilityCaps& caps, double r_inf, const FblParams& params) {
  caps.validate();
  params.validate();
  if (user_dispersion.size() != caps.error.size() || eve_dispersion.rows() != caps.leakage.rows() ||
      eve_dispersion.cols() != caps.leakage.cols()) {
    throw std::invalid_argument("solve_reliability: dispersion and cap shapes differ");
  }
  const Eigen::Index k_users = caps.error.size();
  const Eigen::Index m_eves = caps.leakage.rows();

  ReliabilityState state;
  state.caps = caps;
  state.levels = caps.as_levels();

  const LevelSolution eps = solve_levels(std::span(caps.error.data(), k_users),
                                         std::span(user_dispersion.data(), k_users), r_inf, params);
  state.levels.error = Eigen::Map<const Eigen::VectorXd>(eps.levels.data(), k_users);
  state.tau = state.levels.error.maxCoeff();
  state.error_saturated = eps.saturated;
  state.ell = 1 + static_cast<int>(eps.saturated ? k_users : (state.levels.error.array() < state.tau).count());

  state.j.assign(k_users, 1);
  if (m_eves > 0) {
    // Column-major storage flattens (m, k) with m fastest, matching the per-column structure.
    const LevelSolution del = solve_levels(std::span(caps.leakage.data(), caps.leakage.size()),
                                           std::span(eve_dispersion.data(), eve_dispersion.size()), r_inf, params);
    state.levels.leakage = Eigen::Map<const Eigen::MatrixXd>(del.levels.data(), m_eves, k_users);
    state.xi = state.levels.leakage.maxCoeff();
    state.leakage_saturated = del.saturated;
    for (Eigen::Index k = 0; k < k_users; ++k) {
      const auto held = del.saturated ? m_eves : (state.levels.leakage.col(k).array() < state.xi).count();
      state.j[k] = 1 + static_cast<int>(held);
    }
  }
  return state;
}

namespace {

ReliabilityState phase2_from_forms(const CVector& f, const QuadraticFormSet& forms, const ReliabilityCaps& caps,
                                   double r_inf, const FblParams& params) {
  const LinkSinrs s = sinrs_from_forms(forms, f);
  const Eigen::VectorXd vu = s.user.unaryExpr([](double x) { return dispersion(x); });
  const Eigen::MatrixXd ve = s.eve.unaryExpr([](double x) { return dispersion(x); });
  return solve_reliability(vu, ve, caps, r_inf, params);
}

}  // namespace

ReliabilityState solve_phase2(const CVector& f, const QuadraticFormSet& forms, const ReliabilityCaps& caps,
                              double r_inf, const FblParams& params) {
  if (forms.mode != CsitMode::Perfect) throw std::invalid_argument("solve_phase2: expects perfect-CSIT forms");
  return phase2_from_forms(f, forms, caps, r_inf, params);
}

ReliabilityState solve_phase2_partial(const CVector& f, const QuadraticFormSet& forms, const ReliabilityCaps& caps,
                                      double r_inf, const FblParams& params) {
  if (forms.mode != CsitMode::Covariance) {
    throw std::invalid_argument("solve_phase2_partial: expects covariance forms");
  }
  return phase2_from_forms(f, forms, caps, r_inf, params);
}

}  // namespace secfbl
