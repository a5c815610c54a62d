#pragma once

#include <Eigen/Dense>
#include <complex>

namespace secfbl {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Unit-norm copy of v rotated so its largest-magnitude entry is real and positive.
/// Ties resolve to the lowest index, which keeps iterates deterministic.
inline CVector normalize_and_align(const CVector& v) {
  CVector out = v / v.norm();
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double mag = std::abs(out[i]);
    if (mag > best * (1.0 + 1e-12)) {
      best = mag;
      pivot = i;
    }
  }
  if (best > 0.0) out *= std::conj(out[pivot]) / best;
  return out;
}

}  // namespace secfbl
