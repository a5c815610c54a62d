#pragma once

#include <vector>

#include "secfbl/channel.hpp"
#include "secfbl/forms.hpp"

namespace secfbl {

/// Per-stream SINRs of one precoder: user (K) and wiretap (M x K).
struct LinkSinrs {
  Eigen::VectorXd user;
  Eigen::MatrixXd eve;
};

/// SINRs straight from the channel vectors (perfect knowledge of every link).
LinkSinrs sinrs_from_channels(const ChannelRealization& channels, const CVector& f, const FblParams& params);

/// SINRs read off a form set; with covariance forms the wiretap SINRs are the averaged (barred) ones.
LinkSinrs sinrs_from_forms(const QuadraticFormSet& forms, const CVector& f);

/// Exact per-user secrecy rates at the given reliability levels.
std::vector<double> secrecy_rates(const LinkSinrs& sinrs, const ReliabilityLevels& levels, double blocklength);

/// Exact per-user secrecy rates of f on the true channels.
std::vector<double> secrecy_rate_exact(const CVector& f, const ChannelRealization& channels,
                                       const ReliabilityLevels& levels, const FblParams& params);

/// Sum over users of log2(1 + rho_k) - max_m log2(1 + rho^e_{m,k}).
double infinite_blocklength_sum(const LinkSinrs& sinrs);

/// Sum over users of the finite-blocklength user rate log2(1 + rho_k) - sqrt(V_k / L) Q^{-1}(eps_k).
double sum_user_rate(const LinkSinrs& sinrs, const Eigen::VectorXd& error, double blocklength);

}  // namespace secfbl
