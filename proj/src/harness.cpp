#include "secfbl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "secfbl/baselines.hpp"
#include "secfbl/joint.hpp"
#include "secfbl/secrecy.hpp"

namespace secfbl {

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"alg1", "alg1-cov", "alg2", "alg2-cov", "fbl-se-max",
                                              "rzf",  "rzf-eve",  "zf",   "zf-eve",   "mrt"};
  return names;
}

const std::vector<std::string>& known_sweep_variables() {
  static const std::vector<std::string> names{"P_dBm", "L", "N", "K", "M"};
  return names;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

int as_count(const std::string& variable, double value) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1e6) {
    throw std::invalid_argument("sweep value for " + variable + " must be a positive integer");
  }
  return static_cast<int>(value);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SweepSpec::validate() const {
  if (!contains(known_sweep_variables(), variable)) throw std::invalid_argument("unknown sweep variable: " + variable);
  if (values.empty()) throw std::invalid_argument("sweep values must not be empty");
  if (!std::is_sorted(values.begin(), values.end())) throw std::invalid_argument("sweep values must be sorted");
  if (algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  for (const auto& a : algorithms) {
    if (!contains(known_algorithms(), a)) throw std::invalid_argument("unknown algorithm: " + a);
  }
  if (drops < 1) throw std::invalid_argument("drops must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (!(cap_lo > 0.0 && cap_lo <= cap_hi && cap_hi < 0.5)) throw std::invalid_argument("caps must satisfy 0 < lo <= hi < 1/2");
  if (!(outer_tolerance > 0.0) || outer_iterations < 1) throw std::invalid_argument("invalid outer loop settings");
  inner.validate();
  for (double v : values) {
    ScenarioConfig sc = scenario;
    FblParams p = params;
    double dbm = power_dbm;
    apply_sweep_value(variable, v, sc, p, dbm);
    p.symbol_power = dbm_to_watts(dbm);
    sc.validate();
    p.validate();
  }
}

std::uint64_t drop_seed(std::uint64_t base, std::uint64_t point, std::uint64_t drop) {
  return base ^ splitmix64((point << 32) | (drop & 0xffffffffULL));
}

void apply_sweep_value(const std::string& variable, double value, ScenarioConfig& scenario, FblParams& params,
                       double& power_dbm) {
  if (variable == "P_dBm") {
    if (!std::isfinite(value)) throw std::invalid_argument("P_dBm must be finite");
    power_dbm = value;
  } else if (variable == "L") {
    params.blocklength = value;
  } else if (variable == "N") {
    scenario.antennas = as_count(variable, value);
  } else if (variable == "K") {
    scenario.users = as_count(variable, value);
  } else if (variable == "M") {
    scenario.eavesdroppers = as_count(variable, value);
  } else {
    throw std::invalid_argument("unknown sweep variable: " + variable);
  }
}

namespace {

struct Outcome {
  CVector precoder;
  ReliabilityLevels levels;
  int outer = 0;
  int inner = 0;
};

// Everything one drop's algorithms share; normalizers are computed on first use.
class DropContext {
 public:
  DropContext(const SweepSpec& spec, const ChannelRealization& drop, const FblParams& params)
      : spec_(spec), drop_(drop), params_(params),
        caps_(ReliabilityCaps::linspace(drop.users(), drop.eavesdroppers(), spec.cap_lo, spec.cap_hi)) {}

  const ReliabilityCaps& caps() const { return caps_; }

  const QuadraticFormSet& forms(CsitMode mode) {
    auto& slot = mode == CsitMode::Perfect ? perfect_ : covariance_;
    if (!slot) slot = build_forms(drop_, params_, mode);
    return *slot;
  }

  double r_infinity(CsitMode mode) {
    auto& slot = mode == CsitMode::Perfect ? r_perfect_ : r_covariance_;
    if (!slot) slot = compute_r_infinity(drop_, forms(mode), params_, spec_.inner);
    return *slot;
  }

  ReliabilityLevels phase2(const CVector& f, CsitMode mode) {
    if (spec_.fixed_caps) return caps_.as_levels();
    const double r = std::max(r_infinity(mode), kMinRInfinity);
    const ReliabilityState state = mode == CsitMode::Perfect
                                       ? solve_phase2(f, forms(mode), caps_, r, params_)
                                       : solve_phase2_partial(f, forms(mode), caps_, r, params_);
    return state.levels;
  }

  Outcome run(const std::string& name) {
    const CsitMode mode = name.ends_with("-cov") ? CsitMode::Covariance : CsitMode::Perfect;
    if (name == "alg1" || name == "alg1-cov") {
      const GpiResult g = gpi_solve(forms(mode), caps_.as_levels(), params_, spec_.inner, mrt_start(drop_));
      return {g.precoder, phase2(g.precoder, mode), 1, g.iterations};
    }
    if (name == "alg2" || name == "alg2-cov") {
      JointSettings settings{spec_.outer_tolerance, spec_.outer_iterations, spec_.inner, mode, caps_};
      const JointResult j = joint_solve(drop_, params_, settings, r_infinity(mode));
      return {j.precoder, j.reliability.levels, j.outer_iterations, j.inner_iterations_total};
    }
    if (name == "fbl-se-max") {
      const GpiResult g = gpi_solve_se_max(forms(CsitMode::Perfect), caps_.error, params_, spec_.inner, mrt_start(drop_));
      return {g.precoder, phase2(g.precoder, CsitMode::Perfect), 1, g.iterations};
    }
    static const std::map<std::string, BaselineKind> kinds{{"mrt", BaselineKind::Mrt},
                                                           {"zf", BaselineKind::Zf},
                                                           {"rzf", BaselineKind::Rzf},
                                                           {"zf-eve", BaselineKind::ZfEve},
                                                           {"rzf-eve", BaselineKind::RzfEve}};
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw std::invalid_argument("unknown algorithm: " + name);
    const CVector f = baseline_precoder(it->second, drop_, params_);
    return {f, phase2(f, CsitMode::Perfect), 0, 0};
  }

 private:
  const SweepSpec& spec_;
  const ChannelRealization& drop_;
  const FblParams& params_;
  ReliabilityCaps caps_;
  std::optional<QuadraticFormSet> perfect_;
  std::optional<QuadraticFormSet> covariance_;
  std::optional<double> r_perfect_;
  std::optional<double> r_covariance_;
};

MetricRow failed_row(MetricRow row, const std::string& what) {
  row.sum_secrecy_rate = row.sum_secrecy_rate_clipped = row.sum_rate = kNaN;
  row.max_error_prob = row.max_leakage = kNaN;
  row.error = what.empty() ? "unknown error" : what;
  return row;
}

}  // namespace

std::vector<MetricRow> evaluate_drop(const SweepSpec& spec, double sweep_value, std::uint64_t seed) {
  std::vector<MetricRow> rows;
  MetricRow base;
  base.sweep_var = spec.variable;
  base.sweep_value = sweep_value;
  base.seed = seed;

  ChannelRealization drop;
  FblParams params = spec.params;
  try {
    ScenarioConfig scenario = spec.scenario;
    double dbm = spec.power_dbm;
    apply_sweep_value(spec.variable, sweep_value, scenario, params, dbm);
    params.symbol_power = dbm_to_watts(dbm);
    scenario.seed = seed;
    drop = generate_drop(scenario);
    params.noise_user = params.noise_eve = drop.noise_power;
    params.validate();
  } catch (const std::exception& e) {
    for (const auto& name : spec.algorithms) {
      base.algorithm = name;
      rows.push_back(failed_row(base, std::string("drop generation: ") + e.what()));
    }
    return rows;
  }

  std::optional<DropContext> context;
  std::string context_error;
  try {
    context.emplace(spec, drop, params);
  } catch (const std::exception& e) {
    context_error = e.what();
  }

  for (const auto& name : spec.algorithms) {
    MetricRow row = base;
    row.algorithm = name;
    if (!context) {
      rows.push_back(failed_row(row, context_error));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = context->run(name);
      const LinkSinrs s = sinrs_from_channels(drop, o.precoder, params);
      const std::vector<double> rates = secrecy_rates(s, o.levels, params.blocklength);
      row.sum_secrecy_rate = 0.0;
      row.sum_secrecy_rate_clipped = 0.0;
      for (double r : rates) {
        row.sum_secrecy_rate += r;
        row.sum_secrecy_rate_clipped += clip_nonnegative(r);
      }
      row.sum_rate = sum_user_rate(s, o.levels.error, params.blocklength);
      row.max_error_prob = o.levels.error.maxCoeff();
      row.max_leakage = o.levels.leakage.size() > 0 ? o.levels.leakage.maxCoeff() : 0.0;
      row.outer_iters = o.outer;
      row.inner_iters_total = o.inner;
    } catch (const std::exception& e) {
      row = failed_row(row, e.what());
    }
    if (spec.timing) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows, const std::vector<std::string>& algorithms) {
  std::vector<double> points;
  for (const auto& r : rows) {
    if (std::find(points.begin(), points.end(), r.sweep_value) == points.end()) points.push_back(r.sweep_value);
  }
  std::vector<SummaryRow> out;
  for (double p : points) {
    for (const auto& name : algorithms) {
      SummaryRow s;
      s.sweep_value = p;
      s.algorithm = name;
      std::vector<double> secrecy;
      for (const auto& r : rows) {
        if (r.sweep_value != p || r.algorithm != name) continue;
        if (!r.error.empty()) {
          ++s.failures;
          continue;
        }
        secrecy.push_back(r.sum_secrecy_rate);
        s.mean_sum_secrecy_rate_clipped += r.sum_secrecy_rate_clipped;
        s.mean_sum_rate += r.sum_rate;
        s.mean_max_error_prob += r.max_error_prob;
        s.mean_max_leakage += r.max_leakage;
      }
      s.count = static_cast<int>(secrecy.size());
      if (s.count > 0) {
        const double n = s.count;
        for (double v : secrecy) s.mean_sum_secrecy_rate += v;
        s.mean_sum_secrecy_rate /= n;
        s.mean_sum_secrecy_rate_clipped /= n;
        s.mean_sum_rate /= n;
        s.mean_max_error_prob /= n;
        s.mean_max_leakage /= n;
        if (s.count > 1) {
          double ss = 0.0;
          for (double v : secrecy) ss += (v - s.mean_sum_secrecy_rate) * (v - s.mean_sum_secrecy_rate);
          s.stderr_sum_secrecy_rate = std::sqrt(ss / (n - 1.0) / n);
        }
      } else {
        s.mean_sum_secrecy_rate = s.mean_sum_secrecy_rate_clipped = s.mean_sum_rate = kNaN;
        s.mean_max_error_prob = s.mean_max_leakage = s.stderr_sum_secrecy_rate = kNaN;
      }
      out.push_back(s);
    }
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t points = spec.values.size();
  const std::size_t drops = static_cast<std::size_t>(spec.drops);
  const std::size_t jobs = points * drops;
  std::vector<std::vector<MetricRow>> slots(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t point = job / drops;
      const std::size_t drop = job % drops;
      slots[job] = evaluate_drop(spec, spec.values[point], drop_seed(spec.seed, point, drop));
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (auto& slot : slots) {
    for (auto& row : slot) {
      if (!row.error.empty()) ++result.failures;
      result.rows.push_back(std::move(row));
    }
  }
  result.summary = summarize(result.rows, spec.algorithms);
  return result;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string csv_header() {
  return "sweep_var,sweep_value,algorithm,seed,sum_secrecy_rate,sum_secrecy_rate_clipped,sum_rate,max_error_prob,"
         "max_leakage,outer_iters,inner_iters_total,wall_ms";
}

void emit_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << r.algorithm << ',' << r.seed << ','
        << format_double(r.sum_secrecy_rate) << ',' << format_double(r.sum_secrecy_rate_clipped) << ','
        << format_double(r.sum_rate) << ',' << format_double(r.max_error_prob) << ','
        << format_double(r.max_leakage) << ',' << r.outer_iters << ',' << r.inner_iters_total << ','
        << format_double(r.wall_ms) << '\n';
  }
}

std::string to_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  emit_csv(rows, out);
  return out.str();
}

void write_outputs(const SweepSpec& spec, const SweepResult& result) {
  if (spec.output.empty()) return;
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    file << text;
    file.flush();
    if (!file) throw std::runtime_error("write failed for " + path);
  };
  write(spec.output + ".csv", to_csv(result.rows));
  write(spec.output + ".json", to_json(spec, result));
}

}  // namespace secfbl
