#pragma once

#include <functional>
#include <vector>

#include "secfbl/block_diagonal.hpp"
#include "secfbl/forms.hpp"

namespace secfbl {

struct GpiSettings {
  double tolerance = 0.01;  // on ||f(t) - f(t-1)|| after phase alignment
  int max_iterations = 15;
  bool refresh_points = true;  // re-linearize at every iterate; false keeps the points of f0

  void validate() const;
};

struct GpiResult {
  CVector precoder;
  std::vector<double> log2_lambda;  // index 0 is the starting point
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;  // ||M_B^{-1} M_A f - f||, i.e. the eigen-residual divided by lambda
  double log2_lambda_final = 0.0;
  int omega_clamps = 0;  // user streams whose omega_k hit the floor, summed over iterations
};

/// KKT pair with the scalar factors kept apart: A_KKT = lambda_num * numer, B_KKT = lambda_den * denom.
struct KktPair {
  BlockDiagonal numer;
  BlockDiagonal denom;
  double log2_lambda_num = 0.0;
  double log2_lambda_den = 0.0;

  double log2_lambda() const { return log2_lambda_num - log2_lambda_den; }
};

/// Builds the pair whose stationarity condition numer f = denom f is the first-order condition of log2 lambda.
/// Throws std::runtime_error on a non-finite softmax weight.
KktPair assemble_kkt(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs);

/// Gradient of ln 2 * log2 lambda with respect to conj(f), coefficients held fixed.
CVector kkt_gradient(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs);

double kkt_residual(const CVector& f, const QuadraticFormSet& forms, const BoundCoefficients& coeffs);

using CoefficientProvider = std::function<BoundCoefficients(const CVector&)>;

GpiResult gpi_solve(const QuadraticFormSet& forms, const CoefficientProvider& coeffs, const GpiSettings& settings,
                    const CVector& f0);

/// Convenience form: coefficients linearized at each iterate for fixed reliability levels.
GpiResult gpi_solve(const QuadraticFormSet& forms, const ReliabilityLevels& levels, const FblParams& params,
                    const GpiSettings& settings, const CVector& f0);

struct InfiniteBlocklengthResult {
  GpiResult gpi;
  double rate = 0.0;  // sum_k [log2(1 + rho_k) - max_m log2(1 + rho^e_{m,k})] at the returned precoder
};

/// Same loop with every back-off term removed (L = infinity).
InfiniteBlocklengthResult gpi_solve_infinite_L(const QuadraticFormSet& forms, const FblParams& params,
                                               const GpiSettings& settings, const CVector& f0);

/// Sum finite-blocklength rate maximization with the wiretap terms dropped.
GpiResult gpi_solve_se_max(const QuadraticFormSet& forms, const Eigen::VectorXd& error, const FblParams& params,
                           const GpiSettings& settings, const CVector& f0);

/// Stacked maximum-ratio precoder (f_k proportional to h_k), unit norm; the default starting point.
CVector mrt_start(const ChannelRealization& channels);

}  // namespace secfbl
