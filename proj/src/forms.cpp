#include "secfbl/forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace secfbl {

namespace {

void check_channels(const ChannelRealization& channels) {
  if (channels.users() < 1) throw std::invalid_argument("build_forms: no users");
  if (channels.user_gains.size() != channels.user_channels.size() ||
      channels.eve_gains.size() != channels.eve_channels.size()) {
    throw std::invalid_argument("build_forms: gain/channel count mismatch");
  }
}

QuadraticFormSet skeleton(const ChannelRealization& channels, const FblParams& params, CsitMode mode) {
  params.validate();
  check_channels(channels);
  QuadraticFormSet forms;
  forms.antennas = channels.antennas;
  forms.users = channels.users();
  forms.mode = mode;
  forms.user_loading = params.noise_user / params.symbol_power;
  forms.eve_loading = params.noise_eve / params.symbol_power;
  for (int k = 0; k < forms.users; ++k) {
    const CVector& h = channels.user_channels[k];
    forms.user_blocks.push_back(channels.user_gains[k] * (h * h.adjoint()));
  }
  return forms;
}

// G(k, l) = f_l^H S_k f_l for every block S_k in `blocks`.
Eigen::MatrixXd block_energies(const std::vector<CMatrix>& blocks, const CVector& f, int antennas, int users) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(blocks.size()), users);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (int l = 0; l < users; ++l) {
      const auto fl = f.segment(static_cast<Eigen::Index>(l) * antennas, antennas);
      g(static_cast<Eigen::Index>(k), l) = std::max(0.0, fl.dot(blocks[k] * fl).real());
    }
  }
  return g;
}

}  // namespace

QuadraticFormSet QuadraticFormSet::without_eavesdroppers() const {
  QuadraticFormSet out = *this;
  out.eve_blocks.clear();
  return out;
}

QuadraticFormSet build_forms(const ChannelRealization& channels, const FblParams& params) {
  QuadraticFormSet forms = skeleton(channels, params, CsitMode::Perfect);
  for (int m = 0; m < channels.eavesdroppers(); ++m) {
    const CVector& g = channels.eve_channels[m];
    forms.eve_blocks.push_back(channels.eve_gains[m] * (g * g.adjoint()));
  }
  return forms;
}

QuadraticFormSet build_forms_partial(const ChannelRealization& channels, const FblParams& params) {
  if (channels.eve_covariances.size() != channels.eve_channels.size()) {
    throw std::invalid_argument("build_forms_partial: wiretap covariances missing");
  }
  QuadraticFormSet forms = skeleton(channels, params, CsitMode::Covariance);
  for (int m = 0; m < channels.eavesdroppers(); ++m) {
    forms.eve_blocks.push_back(channels.eve_gains[m] * channels.eve_covariances[m]);
  }
  return forms;
}

FormValues evaluate_forms(const QuadraticFormSet& forms, const CVector& f) {
  const int n = forms.antennas;
  const int k_users = forms.users;
  const int m_eves = forms.eavesdroppers();
  if (f.size() != forms.dimension()) throw std::invalid_argument("evaluate_forms: precoder dimension mismatch");
  const double energy = f.squaredNorm();

  FormValues v;
  const Eigen::MatrixXd gu = block_energies(forms.user_blocks, f, n, k_users);
  v.a.resize(k_users);
  v.b.resize(k_users);
  v.user_signal.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    // Interference summed directly so b carries no cancellation error.
    double interference = 0.0;
    for (int l = 0; l < k_users; ++l) {
      if (l != k) interference += gu(k, l);
    }
    v.user_signal[k] = gu(k, k);
    v.b[k] = interference + forms.user_loading * energy;
    v.a[k] = v.b[k] + gu(k, k);
  }

  const Eigen::MatrixXd ge = block_energies(forms.eve_blocks, f, n, k_users);
  v.c.resize(m_eves);
  v.d.resize(m_eves, k_users);
  v.eve_signal.resize(m_eves, k_users);
  for (int m = 0; m < m_eves; ++m) {
    v.c[m] = ge.row(m).sum() + forms.eve_loading * energy;
    for (int k = 0; k < k_users; ++k) {
      double leak = 0.0;
      for (int l = 0; l < k_users; ++l) {
        if (l != k) leak += ge(m, l);
      }
      v.eve_signal(m, k) = ge(m, k);
      v.d(m, k) = leak + forms.eve_loading * energy;
    }
  }
  return v;
}

ReliabilityLevels ReliabilityLevels::uniform(int users, int eves, double error, double leakage) {
  return {Eigen::VectorXd::Constant(users, error), Eigen::MatrixXd::Constant(eves, users, leakage)};
}

BoundCoefficients bound_coeffs_with_points(const Eigen::VectorXd& user_points, const Eigen::MatrixXd& eve_points,
                                           const ReliabilityLevels& levels, const FblParams& params) {
  const Eigen::Index k_users = user_points.size();
  const Eigen::Index m_eves = eve_points.rows();
  if (levels.error.size() != k_users || levels.leakage.rows() != m_eves || levels.leakage.cols() != k_users ||
      (m_eves > 0 && eve_points.cols() != k_users)) {
    throw std::invalid_argument("bound_coeffs: dimension mismatch");
  }

  const double inv_sqrt_l = params.inv_sqrt_blocklength();
  BoundCoefficients c;
  c.alpha = params.alpha;
  c.user_point = user_points.cwiseMax(kSinrFloor);
  c.eve_point = eve_points.cwiseMax(kSinrFloor);
  c.omega_user.resize(k_users);
  c.omega_user_raw.resize(k_users);
  c.psi_user.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double qinv = inv_sqrt_l > 0.0 ? gaussian_q_inv(levels.error[k]) : 0.0;
    const TangentCoeffs t = tangent_coeffs(c.user_point[k]);
    const double omega = 1.0 - qinv * t.slope * inv_sqrt_l;
    c.omega_user_raw[k] = omega;
    c.omega_user[k] = std::clamp(omega, kOmegaFloor, 1.0);
    if (omega < kOmegaFloor) ++c.clamped_users;
    c.psi_user[k] = qinv * kLog2E * t.intercept * inv_sqrt_l;
  }

  c.omega_eve.resize(m_eves, k_users);
  c.psi_eve.resize(m_eves, k_users);
  c.log_beta.resize(m_eves, k_users);
  for (Eigen::Index m = 0; m < m_eves; ++m) {
    for (Eigen::Index k = 0; k < k_users; ++k) {
      const double qinv = inv_sqrt_l > 0.0 ? gaussian_q_inv(levels.leakage(m, k)) : 0.0;
      const TangentCoeffs t = tangent_coeffs(c.eve_point(m, k));
      c.omega_eve(m, k) = params.alpha / kLn2 * (1.0 + qinv * t.slope * inv_sqrt_l);
      c.psi_eve(m, k) = qinv * kLog2E * t.intercept * inv_sqrt_l;
      c.log_beta(m, k) = params.alpha * c.psi_eve(m, k);
    }
  }
  return c;
}

BoundCoefficients bound_coeffs_at(const CVector& f, const QuadraticFormSet& forms, const ReliabilityLevels& levels,
                                  const FblParams& params) {
  const FormValues v = evaluate_forms(forms, f);
  Eigen::VectorXd user_points(forms.users);
  Eigen::MatrixXd eve_points(forms.eavesdroppers(), forms.users);
  for (int k = 0; k < forms.users; ++k) user_points[k] = v.user_sinr(k);
  for (int m = 0; m < forms.eavesdroppers(); ++m) {
    for (int k = 0; k < forms.users; ++k) eve_points(m, k) = v.eve_sinr(m, k);
  }
  return bound_coeffs_with_points(user_points, eve_points, levels, params);
}

namespace {

// Per-user smoothed wiretap term (1/alpha) ln sum_m exp(alpha psi^e + omega^e ln(c/d)), in bits.
double wiretap_term(const FormValues& v, const BoundCoefficients& coeffs, int k) {
  const int m_eves = static_cast<int>(v.c.size());
  if (m_eves == 0) return 0.0;
  std::vector<double> exponents(m_eves);
  for (int m = 0; m < m_eves; ++m) {
    exponents[m] = coeffs.psi_eve(m, k) + coeffs.omega_eve(m, k) / coeffs.alpha * v.eve_log_ratio(m, k);
  }
  return smooth_max(exponents, coeffs.alpha);
}

}  // namespace

double objective_log_lambda(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs) {
  const FormValues v = evaluate_forms(forms, f);
  double total = 0.0;
  for (int k = 0; k < forms.users; ++k) {
    total += coeffs.omega_user[k] * v.user_log_ratio(k) / kLn2 - wiretap_term(v, coeffs, k);
  }
  return total;
}

std::vector<double> secrecy_lb(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs) {
  const FormValues v = evaluate_forms(forms, f);
  std::vector<double> out(forms.users);
  for (int k = 0; k < forms.users; ++k) {
    out[k] = coeffs.omega_user_raw[k] * v.user_log_ratio(k) / kLn2 - coeffs.psi_user[k] - wiretap_term(v, coeffs, k);
  }
  return out;
}

}  // namespace secfbl
