#include "secfbl/joint.hpp"

#include <algorithm>
#include <stdexcept>

#include "secfbl/secrecy.hpp"

namespace secfbl {

void JointSettings::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("joint: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("joint: max_iterations must be >= 1");
  inner.validate();
  caps.validate();
}

double weighted_objective(std::span<const double> secrecy_rates, const ReliabilityLevels& levels, double r_inf,
                          const ReliabilityCaps& caps, double weight) {
  if (!(r_inf > 0.0)) throw std::invalid_argument("weighted_objective: R_inf must be positive");
  double total = 0.0;
  for (double r : secrecy_rates) total += r;
  double reliability = (caps.error_max() - levels.error.maxCoeff()) / caps.error_max();
  if (levels.leakage.size() > 0) reliability += (caps.leakage_max() - levels.leakage.maxCoeff()) / caps.leakage_max();
  return weight / r_inf * total + (1.0 - weight) * reliability;
}

double weighted_objective(const CVector& f, const QuadraticFormSet& forms, const ReliabilityLevels& levels,
                          double r_inf, const ReliabilityCaps& caps, const FblParams& params) {
  const std::vector<double> rates = secrecy_rates(sinrs_from_forms(forms, f), levels, params.blocklength);
  return weighted_objective(rates, levels, r_inf, caps, params.weight);
}

double compute_r_infinity(const ChannelRealization& channels, const QuadraticFormSet& forms, const FblParams& params,
                          const GpiSettings& inner) {
  return gpi_solve_infinite_L(forms, params, inner, mrt_start(channels)).rate;
}

JointResult joint_solve(const ChannelRealization& channels, const FblParams& params, const JointSettings& settings,
                        std::optional<double> r_infinity) {
  params.validate();
  settings.validate();
  const QuadraticFormSet forms = build_forms(channels, params, settings.mode);
  if (settings.caps.error.size() != forms.users || settings.caps.leakage.rows() != forms.eavesdroppers()) {
    throw std::invalid_argument("joint_solve: caps do not match the drop dimensions");
  }

  JointResult out;
  const CVector start = mrt_start(channels);
  out.r_infinity_raw = r_infinity ? *r_infinity : compute_r_infinity(channels, forms, params, settings.inner);
  out.r_infinity = std::max(out.r_infinity_raw, kMinRInfinity);

  auto phase2 = [&](const CVector& f) {
    return settings.mode == CsitMode::Perfect ? solve_phase2(f, forms, settings.caps, out.r_infinity, params)
                                              : solve_phase2_partial(f, forms, settings.caps, out.r_infinity, params);
  };

  ReliabilityState state;
  state.caps = settings.caps;
  state.levels = settings.caps.as_levels();
  state.tau = settings.caps.error_max();
  state.xi = settings.caps.leakage_max();
  state.ell = forms.users + 1;
  state.j.assign(forms.users, forms.eavesdroppers() + 1);
  state.error_saturated = state.leakage_saturated = true;

  double previous = weighted_objective(start, forms, state.levels, out.r_infinity, settings.caps, params);
  out.objective.push_back(previous);
  double best_value = previous;
  out.precoder = start;
  out.reliability = state;
  out.returned_start = true;

  CVector f = start;
  for (int t = 1; t <= settings.max_iterations; ++t) {
    const GpiResult inner = gpi_solve(forms, state.levels, params, settings.inner, f);
    out.inner_iterations_total += inner.iterations;
    f = inner.precoder;
    state = phase2(f);
    const double value = weighted_objective(f, forms, state.levels, out.r_infinity, settings.caps, params);
    out.objective.push_back(value);
    out.outer_iterations = t;
    if (value > best_value) {
      best_value = value;
      out.precoder = f;
      out.reliability = state;
      out.returned_start = false;
    }
    if (value - previous <= settings.tolerance) break;
    previous = value;
  }

  const LinkSinrs exact = sinrs_from_channels(channels, out.precoder, params);
  out.secrecy_rates = secrecy_rates(exact, out.reliability.levels, params.blocklength);
  for (double r : out.secrecy_rates) out.sum_secrecy_rate += r;
  out.sum_rate = sum_user_rate(exact, out.reliability.levels.error, params.blocklength);
  out.max_error = out.reliability.levels.error.maxCoeff();
  out.max_leakage = out.reliability.levels.leakage.size() > 0 ? out.reliability.levels.leakage.maxCoeff() : 0.0;
  return out;
}

}  // namespace secfbl
