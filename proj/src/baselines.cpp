#include "secfbl/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace secfbl {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::Mrt: return "mrt";
    case BaselineKind::Zf: return "zf";
    case BaselineKind::Rzf: return "rzf";
    case BaselineKind::ZfEve: return "zf-eve";
    case BaselineKind::RzfEve: return "rzf-eve";
  }
  return "unknown";
}

double rzf_regularizer(const ChannelRealization& channels, const FblParams& params) {
  return channels.users() * params.noise_user / params.symbol_power;
}

std::vector<int> strongest_eavesdroppers(const ChannelRealization& channels, int count) {
  std::vector<int> idx(channels.eavesdroppers());
  std::iota(idx.begin(), idx.end(), 0);
  auto power = [&](int m) { return channels.eve_gains[m] * channels.eve_channels[m].squaredNorm(); };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return power(a) > power(b); });
  idx.resize(std::min<std::size_t>(idx.size(), std::max(count, 0)));
  return idx;
}

CVector baseline_precoder(BaselineKind kind, const ChannelRealization& channels, const FblParams& params) {
  return baseline_precoder(kind, channels, rzf_regularizer(channels, params));
}

CVector baseline_precoder(BaselineKind kind, const ChannelRealization& channels, double regularizer) {
  const int n = channels.antennas;
  const int k_users = channels.users();
  const std::string name = to_string(kind);
  if (k_users < 1) throw std::invalid_argument(name + ": no users");

  CMatrix h(n, k_users);
  for (int k = 0; k < k_users; ++k) h.col(k) = std::sqrt(channels.user_gains[k]) * channels.user_channels[k];

  CMatrix columns;
  if (kind == BaselineKind::Mrt) {
    columns = h;
  } else {
    const bool with_eves = kind == BaselineKind::ZfEve || kind == BaselineKind::RzfEve;
    const bool regularized = kind == BaselineKind::Rzf || kind == BaselineKind::RzfEve;
    if (n < k_users) throw std::invalid_argument(name + ": needs N >= K");
    if (with_eves && n <= k_users) throw std::invalid_argument(name + ": needs N > K");

    CMatrix aug = h;
    if (with_eves) {
      const std::vector<int> picked = strongest_eavesdroppers(channels, n - k_users);
      aug.conservativeResize(n, k_users + static_cast<Eigen::Index>(picked.size()));
      for (std::size_t i = 0; i < picked.size(); ++i) {
        const int m = picked[i];
        aug.col(k_users + static_cast<Eigen::Index>(i)) = std::sqrt(channels.eve_gains[m]) * channels.eve_channels[m];
      }
    }
    const Eigen::Index cols = aug.cols();
    if (regularized) {
      CMatrix gram = aug.adjoint() * aug;
      gram.diagonal().array() += regularizer;
      Eigen::LLT<CMatrix> llt(gram);
      if (llt.info() != Eigen::Success) throw std::runtime_error(name + ": regularized Gram matrix is singular");
      columns = (aug * llt.solve(CMatrix::Identity(cols, cols))).leftCols(k_users);
    } else {
      // H (H^H H)^{-1} = Q R^{-H} from a thin QR, avoiding the squared condition number of the Gram matrix.
      Eigen::HouseholderQR<CMatrix> qr(aug);
      const CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
      const double scale = r.diagonal().cwiseAbs().maxCoeff();
      if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-12 * scale)) {
        throw std::runtime_error(name + ": channel matrix is rank deficient");
      }
      const CMatrix q = qr.householderQ() * CMatrix::Identity(n, cols);
      const CMatrix r_inv_h = r.adjoint().triangularView<Eigen::Lower>().solve(CMatrix::Identity(cols, cols));
      columns = (q * r_inv_h).leftCols(k_users);
    }
  }

  CVector f(static_cast<Eigen::Index>(n) * k_users);
  for (int k = 0; k < k_users; ++k) f.segment(static_cast<Eigen::Index>(k) * n, n) = columns.col(k);
  const double norm = f.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::runtime_error(name + ": degenerate precoder");
  return normalize_and_align(f);
}

}  // namespace secfbl
