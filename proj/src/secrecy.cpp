#include "secfbl/secrecy.hpp"

#include <algorithm>
#include <stdexcept>

namespace secfbl {

LinkSinrs sinrs_from_channels(const ChannelRealization& channels, const CVector& f, const FblParams& params) {
  const int n = channels.antennas;
  const int k_users = channels.users();
  const int m_eves = channels.eavesdroppers();
  if (f.size() != static_cast<Eigen::Index>(n) * k_users) {
    throw std::invalid_argument("sinrs_from_channels: precoder dimension mismatch");
  }
  const double energy = f.squaredNorm();
  auto gain = [&](const CVector& h, int l) { return std::norm(h.dot(f.segment(l * n, n))); };

  LinkSinrs s{Eigen::VectorXd(k_users), Eigen::MatrixXd(m_eves, k_users)};
  for (int k = 0; k < k_users; ++k) {
    double interference = params.noise_user / params.symbol_power * energy;
    for (int l = 0; l < k_users; ++l) {
      if (l != k) interference += channels.user_gains[k] * gain(channels.user_channels[k], l);
    }
    s.user[k] = channels.user_gains[k] * gain(channels.user_channels[k], k) / interference;
  }
  for (int m = 0; m < m_eves; ++m) {
    for (int k = 0; k < k_users; ++k) {
      double interference = params.noise_eve / params.symbol_power * energy;
      for (int l = 0; l < k_users; ++l) {
        if (l != k) interference += channels.eve_gains[m] * gain(channels.eve_channels[m], l);
      }
      s.eve(m, k) = channels.eve_gains[m] * gain(channels.eve_channels[m], k) / interference;
    }
  }
  return s;
}

LinkSinrs sinrs_from_forms(const QuadraticFormSet& forms, const CVector& f) {
  const FormValues v = evaluate_forms(forms, f);
  LinkSinrs s{Eigen::VectorXd(forms.users), Eigen::MatrixXd(forms.eavesdroppers(), forms.users)};
  for (int k = 0; k < forms.users; ++k) s.user[k] = v.user_sinr(k);
  for (int m = 0; m < forms.eavesdroppers(); ++m) {
    for (int k = 0; k < forms.users; ++k) s.eve(m, k) = v.eve_sinr(m, k);
  }
  return s;
}

std::vector<double> secrecy_rates(const LinkSinrs& sinrs, const ReliabilityLevels& levels, double blocklength) {
  const Eigen::Index k_users = sinrs.user.size();
  const Eigen::Index m_eves = sinrs.eve.rows();
  if (levels.error.size() != k_users || levels.leakage.rows() != m_eves || levels.leakage.cols() != k_users) {
    throw std::invalid_argument("secrecy_rates: reliability level dimensions do not match the SINRs");
  }
  std::vector<double> rates(k_users);
  std::vector<double> eve(m_eves);
  std::vector<double> leak(m_eves);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    for (Eigen::Index m = 0; m < m_eves; ++m) {
      eve[m] = sinrs.eve(m, k);
      leak[m] = levels.leakage(m, k);
    }
    rates[k] = secrecy_rate(sinrs.user[k], eve, levels.error[k], leak, blocklength);
  }
  return rates;
}

std::vector<double> secrecy_rate_exact(const CVector& f, const ChannelRealization& channels,
                                       const ReliabilityLevels& levels, const FblParams& params) {
  return secrecy_rates(sinrs_from_channels(channels, f, params), levels, params.blocklength);
}

double infinite_blocklength_sum(const LinkSinrs& sinrs) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < sinrs.user.size(); ++k) {
    const double worst = sinrs.eve.rows() > 0 ? sinrs.eve.col(k).maxCoeff() : 0.0;
    total += std::log2(1.0 + sinrs.user[k]) - std::log2(1.0 + worst);
  }
  return total;
}

double sum_user_rate(const LinkSinrs& sinrs, const Eigen::VectorXd& error, double blocklength) {
  if (error.size() != sinrs.user.size()) throw std::invalid_argument("sum_user_rate: size mismatch");
  const double inv_sqrt_l = std::isinf(blocklength) ? 0.0 : 1.0 / std::sqrt(blocklength);
  double total = 0.0;
  for (Eigen::Index k = 0; k < sinrs.user.size(); ++k) {
    total += std::log2(1.0 + sinrs.user[k]);
    if (inv_sqrt_l > 0.0) total -= std::sqrt(dispersion(sinrs.user[k])) * inv_sqrt_l * gaussian_q_inv(error[k]);
  }
  return total;
}

}  // namespace secfbl
