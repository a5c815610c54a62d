#include "secfbl/core_math.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace secfbl {

void FblParams::validate() const {
  if (!(blocklength >= 1.0)) throw std::invalid_argument("blocklength must be >= 1");
  if (!(symbol_power > 0.0)) throw std::invalid_argument("symbol power must be positive");
  if (!(noise_user > 0.0) || !(noise_eve > 0.0)) throw std::invalid_argument("noise powers must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("weight must lie in [0, 1]");
}

double gaussian_q(double x) {
  if (std::isnan(x)) return x;
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  if (x == -std::numeric_limits<double>::infinity()) return 1.0;

  // erfc(x / sqrt2) / 2 with the rounding of x / sqrt2 compensated to first order;
  // in the far tail a one-ulp argument error costs ~x^2 ulps of the result.
  constexpr double kInvSqrt2Hi = 0.7071067811865476;
  constexpr double kInvSqrt2Lo = -4.833646656726457e-17;
  constexpr double kTwoOverSqrtPi = std::numbers::inv_sqrtpi * 2.0;
  const double y = x * kInvSqrt2Hi;
  const double err = std::fma(x, kInvSqrt2Hi, -y) + x * kInvSqrt2Lo;
  const double base = std::erfc(y);
  return 0.5 * (base - err * kTwoOverSqrtPi * std::exp(-y * y));
}

namespace {

// Wichura AS 241 (PPND16): lower-tail normal quantile, ~1e-16 relative accuracy.
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852854561 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + .0227238449892691845833) * r + .24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + .0151986665636164571966) * r +
               .14810397642748007459) * r + .68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + .0012426609473880784386) * r +
               .026532189526576123093) * r + .29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + .0148753612908506148525) * r + .13692988092273580531) * r +
            .59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace

double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("gaussian_q_inv: probability must lie in (0, 1), got " + std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  double x = -ppnd16(p);

  // One Halley step on g(x) = Q(x) - p, with g' = -phi(x) and g'' = x phi(x).
  constexpr double kInvSqrt2Pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  const double density = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  if (density > 0.0) {
    const double u = (gaussian_q(x) - p) / density;
    x += u / (1.0 - 0.5 * x * u);
  }
  return x;
}

double dispersion(double sinr) {
  if (!(sinr >= 0.0)) throw std::domain_error("dispersion: SINR must be nonnegative");
  if (std::isinf(sinr)) return 2.0 * kLog2E * kLog2E;
  return 2.0 * sinr / (1.0 + sinr) * kLog2E * kLog2E;
}

double smooth_max(std::span<const double> values, double alpha) {
  if (values.empty()) throw std::invalid_argument("smooth_max: empty list");
  if (!(alpha > 0.0)) throw std::invalid_argument("smooth_max: alpha must be positive");
  const double peak = *std::max_element(values.begin(), values.end());
  if (std::isinf(peak)) return peak;
  double acc = 0.0;
  for (double v : values) acc += std::exp(alpha * (v - peak));
  return peak + std::log(acc) / alpha;
}

TangentCoeffs tangent_coeffs(double point) {
  if (!(point > 0.0)) throw std::domain_error("tangent_coeffs: linearization point must be positive");
  const double slope = 1.0 / std::sqrt(2.0 * point * (1.0 + point));
  const double intercept = std::sqrt(2.0 * point / (1.0 + point)) - slope * std::log1p(point);
  return {slope, intercept};
}

double secrecy_rate(double user_sinr, std::span<const double> eve_sinrs, double error_prob,
                    std::span<const double> leakage, double blocklength) {
  if (eve_sinrs.size() != leakage.size()) throw std::invalid_argument("secrecy_rate: size mismatch");
  const double inv_sqrt_l = std::isinf(blocklength) ? 0.0 : 1.0 / std::sqrt(blocklength);

  double rate = std::log2(1.0 + user_sinr);
  if (inv_sqrt_l > 0.0) rate -= std::sqrt(dispersion(user_sinr)) * inv_sqrt_l * gaussian_q_inv(error_prob);

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < eve_sinrs.size(); ++m) {
    double wiretap = std::log2(1.0 + eve_sinrs[m]);
    if (inv_sqrt_l > 0.0) wiretap += std::sqrt(dispersion(eve_sinrs[m])) * inv_sqrt_l * gaussian_q_inv(leakage[m]);
    worst = std::max(worst, wiretap);
  }
  return eve_sinrs.empty() ? rate : rate - worst;
}

}  // namespace secfbl
