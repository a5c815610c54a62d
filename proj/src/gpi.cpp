#include "secfbl/gpi.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "secfbl/secrecy.hpp"

namespace secfbl {

void GpiSettings::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("gpi: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("gpi: max_iterations must be >= 1");
}

namespace {

struct Weights {
  Eigen::VectorXd user_a;  // omega_k / (ln2 a_k)
  Eigen::VectorXd user_b;  // omega_k / (ln2 b_k)
  Eigen::MatrixXd eve_d;   // w_{m,k} omega^e_{m,k} / (alpha d_{m,k})
  Eigen::MatrixXd eve_c;   // w_{m,k} omega^e_{m,k} / (alpha c_m)
  double log2_num = 0.0;
  double log2_den = 0.0;
};

Weights kkt_weights(const FormValues& v, const BoundCoefficients& coeffs) {
  const Eigen::Index k_users = v.a.size();
  const Eigen::Index m_eves = v.c.size();
  Weights w;
  w.user_a = Eigen::VectorXd(k_users);
  w.user_b = Eigen::VectorXd(k_users);
  w.eve_d = Eigen::MatrixXd(m_eves, k_users);
  w.eve_c = Eigen::MatrixXd(m_eves, k_users);
  std::vector<double> z(m_eves);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    w.user_a[k] = coeffs.omega_user[k] / (kLn2 * v.a[k]);
    w.user_b[k] = coeffs.omega_user[k] / (kLn2 * v.b[k]);
    w.log2_num += coeffs.omega_user[k] * v.user_log_ratio(static_cast<int>(k)) / kLn2;
    if (m_eves == 0) continue;

    // Softmax over eavesdroppers of ln(beta_{l,k} (c_l / d_{l,k})^{omega^e_{l,k}}).
    for (Eigen::Index m = 0; m < m_eves; ++m) {
      z[m] = coeffs.log_beta(m, k) + coeffs.omega_eve(m, k) * v.eve_log_ratio(static_cast<int>(m), static_cast<int>(k));
    }
    const double lse = smooth_max(z, 1.0);  // ln sum_l exp(z_l)
    w.log2_den += lse / coeffs.alpha;
    for (Eigen::Index m = 0; m < m_eves; ++m) {
      const double soft = std::exp(z[m] - lse);
      const double scale = soft * coeffs.omega_eve(m, k) / coeffs.alpha;
      if (!std::isfinite(scale)) {
        throw std::runtime_error("assemble_kkt: non-finite softmax weight at eve " + std::to_string(m) + ", user " +
                                 std::to_string(k));
      }
      w.eve_d(m, k) = scale / v.d(m, k);
      w.eve_c(m, k) = scale / v.c[m];
    }
  }
  return w;
}

}  // namespace

KktPair assemble_kkt(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs) {
  const FormValues v = evaluate_forms(forms, f);
  const Weights w = kkt_weights(v, coeffs);
  const int n = forms.antennas;
  const int k_users = forms.users;
  const int m_eves = forms.eavesdroppers();

  // Block l of numer:  sum_k x_k S_k + sum_m (sum_{k != l} y_{m,k}) T_m + loading terms.
  // Block l of denom:  sum_{k != l} x'_k S_k + sum_m (sum_k y'_{m,k}) T_m + loading terms.
  const double numer_loading = w.user_a.sum() * forms.user_loading + w.eve_d.sum() * forms.eve_loading;
  const double denom_loading = w.user_b.sum() * forms.user_loading + w.eve_c.sum() * forms.eve_loading;

  CMatrix user_numer = CMatrix::Zero(n, n);
  CMatrix user_denom_all = CMatrix::Zero(n, n);
  for (int k = 0; k < k_users; ++k) {
    user_numer += w.user_a[k] * forms.user_blocks[k];
    user_denom_all += w.user_b[k] * forms.user_blocks[k];
  }
  CMatrix eve_denom = CMatrix::Zero(n, n);
  CMatrix eve_numer_all = CMatrix::Zero(n, n);
  for (int m = 0; m < m_eves; ++m) {
    eve_denom += w.eve_c.row(m).sum() * forms.eve_blocks[m];
    eve_numer_all += w.eve_d.row(m).sum() * forms.eve_blocks[m];
  }

  KktPair pair{BlockDiagonal(k_users, n), BlockDiagonal(k_users, n), w.log2_num, w.log2_den};
  const CMatrix identity = CMatrix::Identity(n, n);
  for (int l = 0; l < k_users; ++l) {
    CMatrix numer = user_numer + eve_numer_all + numer_loading * identity;
    for (int m = 0; m < m_eves; ++m) numer -= w.eve_d(m, l) * forms.eve_blocks[m];
    CMatrix denom = user_denom_all - w.user_b[l] * forms.user_blocks[l] + eve_denom + denom_loading * identity;
    pair.numer.block(l) = 0.5 * (numer + numer.adjoint());
    pair.denom.block(l) = 0.5 * (denom + denom.adjoint());
  }
  return pair;
}

CVector kkt_gradient(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs) {
  const KktPair pair = assemble_kkt(f, forms, coeffs);
  return kLn2 * (pair.numer.apply(f) - pair.denom.apply(f));
}

double kkt_residual(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs) {
  const KktPair pair = assemble_kkt(f, forms, coeffs);
  const CVector u = f / f.norm();
  return (BlockCholesky(pair.denom).solve(pair.numer.apply(u)) - u).norm();
}

GpiResult gpi_solve(const QuadraticFormSet& forms, const CoefficientProvider& coeffs, const GpiSettings& settings,
                    const CVector& f0) {
  settings.validate();
  if (f0.size() != forms.dimension() || !(f0.norm() > 0.0)) {
    throw std::invalid_argument("gpi_solve: starting precoder has the wrong size or is zero");
  }

  GpiResult result;
  CVector f = normalize_and_align(f0);
  BoundCoefficients current = coeffs(f);
  result.omega_clamps += current.clamped_users;
  const BoundCoefficients frozen = current;
  double value = objective_log_lambda(f, forms, current);
  result.log2_lambda.push_back(value);

  CVector best = f;
  double best_value = value;
  for (int t = 1; t <= settings.max_iterations; ++t) {
    const KktPair pair = assemble_kkt(f, forms, current);
    const CVector next = normalize_and_align(BlockCholesky(pair.denom).solve(pair.numer.apply(f)));
    const double step = (next - f).norm();
    f = next;
    current = settings.refresh_points ? coeffs(f) : frozen;
    result.omega_clamps += current.clamped_users;
    value = objective_log_lambda(f, forms, current);
    result.log2_lambda.push_back(value);
    result.iterations = t;
    if (value > best_value) {
      best_value = value;
      best = f;
    }
    if (step <= settings.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.precoder = result.converged ? f : best;
  const BoundCoefficients at_end = settings.refresh_points ? coeffs(result.precoder) : frozen;
  result.log2_lambda_final = objective_log_lambda(result.precoder, forms, at_end);
  result.kkt_residual = kkt_residual(result.precoder, forms, at_end);
  return result;
}

GpiResult gpi_solve(const QuadraticFormSet& forms, const ReliabilityLevels& levels, const FblParams& params,
                    const GpiSettings& settings, const CVector& f0) {
  return gpi_solve(
      forms, [&](const CVector& f) { return bound_coeffs_at(f, forms, levels, params); }, settings, f0);
}

InfiniteBlocklengthResult gpi_solve_infinite_L(const QuadraticFormSet& forms, const FblParams& params,
                                               const GpiSettings& settings, const CVector& f0) {
  FblParams unlimited = params;
  unlimited.blocklength = kInfiniteBlocklength;
  // Levels are irrelevant once every back-off term is zero.
  const ReliabilityLevels levels = ReliabilityLevels::uniform(forms.users, forms.eavesdroppers(), 0.25, 0.25);
  InfiniteBlocklengthResult out{gpi_solve(forms, levels, unlimited, settings, f0), 0.0};
  out.rate = infinite_blocklength_sum(sinrs_from_forms(forms, out.gpi.precoder));
  return out;
}

GpiResult gpi_solve_se_max(const QuadraticFormSet& forms, const Eigen::VectorXd& error, const FblParams& params,
                           const GpiSettings& settings, const CVector& f0) {
  const QuadraticFormSet reduced = forms.without_eavesdroppers();
  const ReliabilityLevels levels{error, Eigen::MatrixXd(0, forms.users)};
  return gpi_solve(reduced, levels, params, settings, f0);
}

CVector mrt_start(const ChannelRealization& channels) {
  const int n = channels.antennas;
  CVector f(static_cast<Eigen::Index>(n) * channels.users());
  for (int k = 0; k < channels.users(); ++k) {
    const CVector& h = channels.user_channels[k];
    f.segment(static_cast<Eigen::Index>(k) * n, n) = h / h.norm();
  }
  return normalize_and_align(f);
}

}  // namespace secfbl
