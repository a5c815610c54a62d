#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "secfbl/channel.hpp"
#include "secfbl/gpi.hpp"

namespace secfbl {

inline constexpr int kSchemaVersion = 1;

/// Names accepted in SweepSpec::algorithms, in canonical order.
const std::vector<std::string>& known_algorithms();

/// Names accepted in SweepSpec::variable.
const std::vector<std::string>& known_sweep_variables();

struct SweepSpec {
  std::string variable = "P_dBm";  // P_dBm | L | N | K | M
  std::vector<double> values{20.0};
  ScenarioConfig scenario;
  FblParams params;  // symbol_power is overridden by power_dbm; noise powers come from the drop
  double power_dbm = 20.0;
  std::vector<std::string> algorithms{known_algorithms()};
  int drops = 50;
  std::uint64_t seed = 1;
  std::string output;  // empty: no files
  int workers = 1;
  bool fixed_caps = false;  // keep eps = eps-hat, delta = delta-hat instead of running Phase II
  bool timing = false;      // fill wall_ms; off by default so output bytes are reproducible
  GpiSettings inner;
  double outer_tolerance = 0.01;
  int outer_iterations = 5;
  double cap_lo = 1e-6;
  double cap_hi = 2e-6;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

struct MetricRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double sum_secrecy_rate = 0.0;
  double sum_secrecy_rate_clipped = 0.0;  // sum_k max(0, R_k)
  double sum_rate = 0.0;
  double max_error_prob = 0.0;
  double max_leakage = 0.0;
  int outer_iters = 0;
  int inner_iters_total = 0;
  double wall_ms = 0.0;
  std::string error;  // empty on success
};

struct SummaryRow {
  double sweep_value = 0.0;
  std::string algorithm;
  int count = 0;
  int failures = 0;
  double mean_sum_secrecy_rate = 0.0;
  double stderr_sum_secrecy_rate = 0.0;
  double mean_sum_secrecy_rate_clipped = 0.0;
  double mean_sum_rate = 0.0;
  double mean_max_error_prob = 0.0;
  double mean_max_leakage = 0.0;
};

struct SweepResult {
  std::vector<MetricRow> rows;
  std::vector<SummaryRow> summary;
  int failures = 0;
};

/// Seed of drop `drop` at sweep point `point`: base ^ splitmix64((point << 32) | drop).
std::uint64_t drop_seed(std::uint64_t base, std::uint64_t point, std::uint64_t drop);

/// Scenario and link parameters at one sweep value.
void apply_sweep_value(const std::string& variable, double value, ScenarioConfig& scenario, FblParams& params,
                       double& power_dbm);

/// Runs every algorithm on one drop. Failures are reported per row, never thrown.
std::vector<MetricRow> evaluate_drop(const SweepSpec& spec, double sweep_value, std::uint64_t seed);

SweepResult run_sweep(const SweepSpec& spec);

std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows, const std::vector<std::string>& algorithms);

std::string csv_header();
void emit_csv(const std::vector<MetricRow>& rows, std::ostream& out);
std::string to_csv(const std::vector<MetricRow>& rows);

/// JSON document with schema_version, the resolved spec, rows and summary.
std::string to_json(const SweepSpec& spec, const SweepResult& result);
/// Rows of a document produced by to_json.
std::vector<MetricRow> rows_from_json(const std::string& document);

std::string spec_to_json(const SweepSpec& spec);
/// Spec from a JSON config; keys missing from the document keep the values in `base`.
SweepSpec spec_from_json(const std::string& document, const SweepSpec& base = {});

/// Writes `<output>.csv` and `<output>.json`; throws std::runtime_error naming the path on I/O failure.
void write_outputs(const SweepSpec& spec, const SweepResult& result);

}  // namespace secfbl
