#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracle.hpp"
#include "secfbl/baselines.hpp"
#include "secfbl/gpi.hpp"
#include "secfbl/harness.hpp"
#include "secfbl/joint.hpp"
#include "secfbl/reliability.hpp"
#include "secfbl/secrecy.hpp"

namespace acceptance {

namespace {

using namespace secfbl;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets, fixed here so they cannot drift per run.
constexpr double kBoundSlack = -1e-9;
constexpr double kBoundBudgetS = 10.0;
constexpr double kTightTolerance = 1e-10;
constexpr int kTightIterations = 500;
constexpr double kResidualMax = 1e-6;
constexpr double kGradientRel = 1e-5;
constexpr double kKktBudgetS = 30.0;
constexpr double kAlignment = 1 - 1e-6;
constexpr int kOracleIterations = 5000;  // reach the fixed point; correlated pairs can need several hundred steps
constexpr double kStationarityRel = 1e-8;
constexpr int kGridPoints = 1000000;
constexpr double kConverge15 = 0.95;
constexpr double kConverge6 = 0.80;
constexpr double kConvergenceBudgetS = 120.0;
constexpr double kOrderingBudgetS = 300.0;
constexpr double kNullingMax = 1e-10;
constexpr double kBlockSolveRel = 1e-10;
constexpr double kScaleLo = 1.5;
constexpr double kScaleHi = 3.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Instance {
  ChannelRealization drop;
  FblParams params;
};

Instance make_instance(int n, int k, int m, std::uint64_t seed, double power_dbm) {
  ScenarioConfig cfg;
  cfg.antennas = n;
  cfg.users = k;
  cfg.eavesdroppers = m;
  cfg.seed = seed;
  Instance out{generate_drop(cfg), {}};
  out.params.symbol_power = dbm_to_watts(power_dbm);
  out.params.noise_user = out.params.noise_eve = out.drop.noise_power;
  return out;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// 1. secrecy_lb never exceeds the exact rate.
Verdict bound_validity(bool quick) {
  const auto t0 = Clock::now();
  const int count = quick ? 100 : 1000;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> power(0.0, 30.0), lp(std::log10(1e-11), std::log10(0.4)), lpt(-3.0, 4.0);
  double worst = INFINITY;
  int violations = 0;
  for (int i = 0; i < count; ++i) {
    const Instance inst = make_instance(8, 4, 4, 10000 + i, power(rng));
    const QuadraticFormSet forms = build_forms(inst.drop, inst.params);
    const CVector f = oracle::random_unit(32, rng);
    ReliabilityLevels levels{Eigen::VectorXd(4), Eigen::MatrixXd(4, 4)};
    for (int k = 0; k < 4; ++k) levels.error[k] = std::pow(10.0, lp(rng));
    for (int j = 0; j < 16; ++j) levels.leakage.data()[j] = std::pow(10.0, lp(rng));
    BoundCoefficients c;
    if (i % 2 == 0) {
      c = bound_coeffs_at(f, forms, levels, inst.params);
    } else {
      Eigen::VectorXd up(4);
      Eigen::MatrixXd ep(4, 4);
      for (int k = 0; k < 4; ++k) up[k] = std::pow(10.0, lpt(rng));
      for (int j = 0; j < 16; ++j) ep.data()[j] = std::pow(10.0, lpt(rng));
      c = bound_coeffs_with_points(up, ep, levels, inst.params);
    }
    const std::vector<double> lb = secrecy_lb(f, forms, c);
    const std::vector<double> exact = secrecy_rate_exact(f, inst.drop, levels, inst.params);
    for (int k = 0; k < 4; ++k) {
      const double slack = exact[k] - lb[k];
      worst = std::min(worst, slack);
      if (slack < kBoundSlack) ++violations;
    }
  }
  const double elapsed = seconds_since(t0);
  return {violations == 0 && elapsed < kBoundBudgetS,
          std::to_string(count) + " instances, min slack " + fmt(worst) + ", violations " + std::to_string(violations) +
              ", " + fmt(elapsed) + " s (budget " + fmt(kBoundBudgetS) + " s)"};
}

// 2. Tight GPI reaches a KKT point; the assembled gradient matches finite differences.
Verdict kkt_fixed_point(bool quick) {
  const auto t0 = Clock::now();
  const int count = quick ? 10 : 50;
  GpiSettings tight;
  tight.tolerance = kTightTolerance;
  tight.max_iterations = kTightIterations;
  int residual_ok = 0, gradient_ok = 0;
  double worst_residual = 0.0, worst_gradient = 0.0;
  for (int i = 0; i < count; ++i) {
    const Instance inst = make_instance(4, 2, 2, 20000 + i, 20.0);
    const QuadraticFormSet forms = build_forms(inst.drop, inst.params);
    const ReliabilityLevels levels = ReliabilityCaps::linspace(2, 2).as_levels();
    const GpiResult r = gpi_solve(forms, levels, inst.params, tight, mrt_start(inst.drop));
    worst_residual = std::max(worst_residual, r.kkt_residual);
    if (r.kkt_residual <= kResidualMax) ++residual_ok;

    const BoundCoefficients c = bound_coeffs_at(r.precoder, forms, levels, inst.params);
    const CVector g = kkt_gradient(r.precoder, forms, c);
    const CVector fd = oracle::fd_wirtinger(
        [&](const CVector& x) { return kLn2 * objective_log_lambda(x, forms, c); }, r.precoder, 1e-6);
    // Relative to the size of either side of the stationarity balance, since the gradient vanishes at a KKT point.
    const KktPair pair = assemble_kkt(r.precoder, forms, c);
    const double scale = kLn2 * pair.numer.apply(r.precoder).norm();
    const double rel = (g - fd).norm() / scale;
    worst_gradient = std::max(worst_gradient, rel);
    if (rel <= kGradientRel) ++gradient_ok;
  }
  const double elapsed = seconds_since(t0);
  return {residual_ok == count && gradient_ok == count && elapsed < kKktBudgetS,
          "residual <= 1e-6 on " + std::to_string(residual_ok) + "/" + std::to_string(count) + " (worst " +
              fmt(worst_residual) + "), gradient within 1e-5 on " + std::to_string(gradient_ok) + "/" +
              std::to_string(count) + " (worst " + fmt(worst_gradient) + "), " + fmt(elapsed) + " s"};
}

// 3. The fixed point is the principal generalized eigenvector of its own frozen pair.
Verdict eigensolver_oracle(bool quick) {
  const int count = quick ? 10 : 50;
  GpiSettings tight;
  tight.tolerance = kTightTolerance;
  tight.max_iterations = kOracleIterations;
  int aligned = 0, unconverged = 0;
  double worst = 1.0;
  for (int i = 0; i < count; ++i) {
    const Instance inst = make_instance(2, 1, 1, 30000 + i, 20.0);
    const QuadraticFormSet forms = build_forms(inst.drop, inst.params);
    const ReliabilityLevels levels = ReliabilityCaps::linspace(1, 1).as_levels();
    const GpiResult r = gpi_solve(forms, levels, inst.params, tight, mrt_start(inst.drop));
    if (!r.converged) ++unconverged;
    const BoundCoefficients c = bound_coeffs_at(r.precoder, forms, levels, inst.params);
    const KktPair pair = assemble_kkt(r.precoder, forms, c);
    const CVector v = oracle::principal_generalized_eigvec(pair.numer.to_dense(), pair.denom.to_dense());
    const double inner = std::abs(v.dot(r.precoder)) / r.precoder.norm();
    worst = std::min(worst, inner);
    if (inner >= kAlignment) ++aligned;
  }
  return {aligned == count, std::to_string(aligned) + "/" + std::to_string(count) + " aligned, worst |<f, v1>| = " +
                                fmt(worst, 12) + ", unconverged " + std::to_string(unconverged)};
}

// 4. Closed-form Phase II levels: stationarity and brute-force grids.
Verdict phase2_closed_forms(bool quick) {
  const int count = quick ? 6 : 20;
  const auto grid = oracle::log_grid(1e-15, 0.49, kGridPoints);  // scalar problems are unconstrained
  const double step = std::log(grid[1] / grid[0]);
  double worst_stat = 0.0, worst_grid_steps = 0.0;
  int failures = 0;

  auto stationarity = [](double t, double sum_sqrt_v, double r_inf, double w, double cap, double l) {
    const long double x = oracle::bisect_q_inv(t);
    const long double lhs = w / r_inf * sum_sqrt_v / std::sqrt(l) * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    const long double rhs = (1 - w) / cap;
    return static_cast<double>(std::fabs(lhs - rhs) / rhs);
  };

  for (int i = 0; i < count; ++i) {
    const int k_users = i == 0 ? 1 : 1 + i % 4;
    const int m_eves = i == 0 ? 1 : 1 + (i / 4) % 4;
    const Instance inst = make_instance(std::max(4, k_users), k_users, m_eves, 40000 + i, 10.0 * (i % 4));
    const QuadraticFormSet forms = build_forms(inst.drop, inst.params);
    const CVector f = mrt_start(inst.drop);
    const ReliabilityCaps caps = ReliabilityCaps::linspace(k_users, m_eves);
    const double r_inf = std::max(compute_r_infinity(inst.drop, forms, inst.params, {}), kMinRInfinity);
    const ReliabilityState st = solve_phase2(f, forms, caps, r_inf, inst.params);
    const LinkSinrs s = sinrs_from_forms(forms, f);
    const Eigen::VectorXd vu = s.user.unaryExpr([](double x) { return dispersion(x); });
    const Eigen::MatrixXd ve = s.eve.unaryExpr([](double x) { return dispersion(x); });
    const double w = inst.params.weight, l = inst.params.blocklength;

    // Scalar problems in the common level, free indices only (all caps exceed the level here).
    double su = 0.0, se = 0.0;
    for (int k = 0; k < k_users; ++k) su += std::sqrt(vu[k]);
    for (int j = 0; j < ve.size(); ++j) se += std::sqrt(ve.data()[j]);
    const std::vector<double> vus(vu.data(), vu.data() + vu.size()), ves(ve.data(), ve.data() + ve.size());
    const auto tau = tau_star(vus, r_inf, w, caps.error_max(), l);
    const auto xi = xi_star(ves, r_inf, w, caps.leakage_max(), l);
    if (!tau || !xi) {
      ++failures;
      continue;
    }
    worst_stat = std::max({worst_stat, stationarity(*tau, su, r_inf, w, caps.error_max(), l),
                           stationarity(*xi, se, r_inf, w, caps.leakage_max(), l)});

    // 1-D grids of the weighted objective in each common level.
    auto one_d = [&](double sum_sqrt, double cap) {
      return oracle::grid_argmin(
          [&](double t) { return w / r_inf * sum_sqrt * gaussian_q_inv(t) / std::sqrt(l) + (1 - w) * t / cap; }, grid);
    };
    const double tau_grid = one_d(su, caps.error_max());
    const double xi_grid = one_d(se, caps.leakage_max());
    worst_grid_steps = std::max({worst_grid_steps, std::fabs(std::log(tau_grid / *tau)) / step,
                                 std::fabs(std::log(xi_grid / *xi)) / step});
    if (*tau < caps.error.minCoeff() && std::fabs(st.tau - *tau) > 1e-12 * *tau) ++failures;
    if (*xi < caps.leakage.minCoeff() && std::fabs(st.xi - *xi) > 1e-12 * *xi) ++failures;

    // Joint 2-D grid over (eps, delta) for the single-user, single-eavesdropper case.
    if (k_users == 1 && m_eves == 1) {
      const auto g2 = oracle::log_grid(1e-15, caps.error_max(), 1000);
      const double step2 = std::log(g2[1] / g2[0]);
      double best = INFINITY, be = 0.0, bd = 0.0;
      for (double e : g2) {
        for (double d : g2) {
          const ReliabilityLevels lv{Eigen::VectorXd::Constant(1, e), Eigen::MatrixXd::Constant(1, 1, d)};
          const double v = phase2_objective(lv, vu, ve, caps, r_inf, inst.params);
          if (v < best) {
            best = v;
            be = e;
            bd = d;
          }
        }
      }
      if (std::fabs(std::log(be / st.levels.error[0])) > 2 * step2 ||
          std::fabs(std::log(bd / st.levels.leakage(0, 0))) > 2 * step2) {
        ++failures;
      }
    }
  }
  const bool ok = failures == 0 && worst_stat <= kStationarityRel && worst_grid_steps <= 2.0;
  return {ok, std::to_string(count) + " instances, worst stationarity " + fmt(worst_stat) + ", worst grid offset " +
                  fmt(worst_grid_steps) + " steps, failures " + std::to_string(failures)};
}

// 5. Precoder-step iteration counts on the default scenario.
Verdict convergence(bool quick) {
  const auto t0 = Clock::now();
  const int drops = quick ? 20 : 100;
  bool ok = true;
  std::string detail;
  for (double p : {-10.0, 0.0, 10.0, 20.0}) {
    int within15 = 0, within6 = 0;
    for (int d = 0; d < drops; ++d) {
      const Instance inst = make_instance(8, 4, 4, 50000 + d, p);
      const QuadraticFormSet forms = build_forms(inst.drop, inst.params);
      const GpiResult r =
          gpi_solve(forms, ReliabilityCaps::linspace(4, 4).as_levels(), inst.params, {}, mrt_start(inst.drop));
      if (r.converged) {
        ++within15;
        if (r.iterations <= 6) ++within6;
      }
    }
    const double f15 = static_cast<double>(within15) / drops, f6 = static_cast<double>(within6) / drops;
    ok = ok && f15 >= kConverge15 && f6 >= kConverge6;
    detail += (detail.empty() ? "" : "; ") + fmt(p) + " dBm: " + std::to_string(within15) + "/" +
              std::to_string(drops) + " by 15, " + std::to_string(within6) + " by 6";
  }
  const double elapsed = seconds_since(t0);
  return {ok && elapsed < kConvergenceBudgetS, detail + ", " + fmt(elapsed) + " s"};
}

// 6. Mean sum secrecy rate ordering at 20 dBm.
Verdict ordering(bool quick) {
  const auto t0 = Clock::now();
  SweepSpec spec;
  spec.variable = "M";
  spec.values = {4.0, 8.0};
  spec.power_dbm = 20.0;
  spec.drops = quick ? 10 : 50;
  spec.seed = 6;
  spec.workers = workers();
  spec.algorithms = {"alg2", "alg2-cov", "fbl-se-max", "rzf", "rzf-eve", "zf", "zf-eve", "mrt"};
  const SweepResult r = run_sweep(spec);
  bool ok = r.failures == 0;
  std::string detail;
  for (double m : spec.values) {
    auto mean = [&](const std::string& name) -> double {
      for (const auto& s : r.summary) {
        if (s.sweep_value == m && s.algorithm == name) return s.mean_sum_secrecy_rate;
      }
      return NAN;
    };
    const double alg2 = mean("alg2"), cov = mean("alg2-cov");
    for (const auto& name : spec.algorithms) {
      if (name != "alg2" && !(alg2 >= mean(name))) ok = false;
    }
    for (const char* name : {"fbl-se-max", "rzf", "zf", "mrt"}) {
      if (!(cov >= mean(name))) ok = false;
    }
    detail += (detail.empty() ? "" : "; ") + std::string("M=") + fmt(m) + ":";
    for (const auto& name : spec.algorithms) detail += " " + name + " " + fmt(mean(name));
  }
  const double elapsed = seconds_since(t0);
  return {ok && elapsed < kOrderingBudgetS,
          detail + ", failures " + std::to_string(r.failures) + ", " + fmt(elapsed) + " s"};
}

// 7. Longer blocks give a larger mean sum secrecy rate.
Verdict blocklength(bool quick) {
  SweepSpec spec;
  spec.variable = "L";
  spec.values = {100.0, 1000.0};
  spec.algorithms = {"alg1"};
  spec.fixed_caps = true;
  const int drops = quick ? 10 : 50;
  double short_sum = 0.0, long_sum = 0.0;
  int failures = 0;
  for (int d = 0; d < drops; ++d) {
    const std::uint64_t seed = drop_seed(7, 0, static_cast<std::uint64_t>(d));
    const auto a = evaluate_drop(spec, 100.0, seed);
    const auto b = evaluate_drop(spec, 1000.0, seed);
    if (!a[0].error.empty() || !b[0].error.empty()) ++failures;
    short_sum += a[0].sum_secrecy_rate;
    long_sum += b[0].sum_secrecy_rate;
  }
  return {failures == 0 && long_sum > short_sum,
          "mean at L=100 " + fmt(short_sum / drops) + ", at L=1000 " + fmt(long_sum / drops) + " over " +
              std::to_string(drops) + " common drops"};
}

// 8. ZF-EVE nulls the chosen wiretap channels and leaks least after Phase II.
Verdict zf_eve_nulling(bool quick) {
  const int drops = quick ? 4 : 20;
  double worst_gain = 0.0;
  int leakage_violations = 0, failures = 0;
  SweepSpec spec;
  spec.variable = "M";
  spec.scenario.antennas = 16;
  spec.scenario.users = 4;
  spec.algorithms = {"zf-eve", "mrt", "zf", "rzf", "rzf-eve"};
  for (int m_eves : {1, 4, 8, 12}) {
    for (int d = 0; d < drops; ++d) {
      const std::uint64_t seed = 80000 + 100 * m_eves + d;
      const Instance inst = make_instance(16, 4, m_eves, seed, 20.0);
      const CVector f = baseline_precoder(BaselineKind::ZfEve, inst.drop, inst.params);
      for (int m : strongest_eavesdroppers(inst.drop, 12)) {
        for (int k = 0; k < 4; ++k) {
          worst_gain = std::max(worst_gain, std::abs(inst.drop.eve_channels[m].dot(f.segment(16 * k, 16))));
        }
      }
      const auto rows = evaluate_drop(spec, m_eves, seed);
      for (const auto& row : rows) {
        if (!row.error.empty()) ++failures;
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[0].max_leakage <= rows[i].max_leakage)) ++leakage_violations;
      }
    }
  }
  return {worst_gain <= kNullingMax && leakage_violations == 0 && failures == 0,
          "max |g^H f_k| " + fmt(worst_gain) + ", leakage order violations " + std::to_string(leakage_violations) +
              ", failures " + std::to_string(failures)};
}

// 9. Per-block solve equals dense inversion and scales linearly in K.
Verdict block_solve(bool quick) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<CMatrix> blocks;
    for (int k = 0; k < 4; ++k) blocks.push_back(oracle::random_pd(8, 0.01, 100.0, rng));
    const BlockDiagonal bd(blocks);
    const CVector x = oracle::random_unit(32, rng);
    const CVector dense = bd.to_dense().inverse() * x;
    worst = std::max(worst, (BlockCholesky(bd).solve(x) - dense).norm() / dense.norm());
  }

  auto time_for = [&](int k_blocks) {
    std::vector<CMatrix> blocks;
    for (int k = 0; k < k_blocks; ++k) blocks.push_back(oracle::random_pd(8, 0.01, 100.0, rng));
    const BlockDiagonal bd(blocks);
    const CVector x = oracle::random_unit(8 * k_blocks, rng);
    const int reps = quick ? 2000 : 20000;
    std::vector<double> samples;
    double sink = 0.0;
    for (int trial = 0; trial < 7; ++trial) {
      const auto t0 = Clock::now();
      for (int r = 0; r < reps; ++r) sink += BlockCholesky(bd).solve(x).real().sum();
      samples.push_back(seconds_since(t0));
    }
    std::nth_element(samples.begin(), samples.begin() + 3, samples.end());
    return samples[3] + 0.0 * sink;
  };
  time_for(4);  // warm-up
  const double ratio = time_for(8) / time_for(4);
  return {worst <= kBlockSolveRel && ratio >= kScaleLo && ratio <= kScaleHi,
          "worst relative difference " + fmt(worst) + ", time ratio K=8/K=4 " + fmt(ratio)};
}

// 10. Byte-identical CSV across repeats and worker counts.
Verdict determinism(bool quick) {
  SweepSpec spec;
  spec.values = {0.0, 20.0};
  spec.drops = quick ? 2 : 4;
  spec.seed = 10;
  spec.scenario.antennas = 6;
  spec.scenario.users = 3;
  spec.scenario.eavesdroppers = 3;
  std::vector<std::string> outputs;
  for (int w : {1, 8, 1, 8}) {
    spec.workers = w;
    outputs.push_back(to_csv(run_sweep(spec).rows));
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
  return {same, std::to_string(outputs[0].size()) + " bytes, runs at 1 and 8 workers " + (same ? "identical" : "differ")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict(bool)> run;
};

}  // namespace

bool run_all(const Options& options, std::ostream& out) {
  const std::vector<Criterion> criteria{
      {1, "bound validity", bound_validity},       {2, "KKT fixed point", kkt_fixed_point},
      {3, "eigensolver oracle", eigensolver_oracle}, {4, "Phase II closed forms", phase2_closed_forms},
      {5, "convergence trend", convergence},       {6, "ordering trends", ordering},
      {7, "blocklength monotonicity", blocklength}, {8, "ZF-EVE nulling", zf_eve_nulling},
      {9, "block-solve equivalence", block_solve},  {10, "determinism", determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
      continue;
    }
    Verdict v;
    try {
      v = c.run(options.quick);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    out << (v.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name << ": " << v.detail << '\n'
        << std::flush;
  }
  return all;
}

}  // namespace acceptance
