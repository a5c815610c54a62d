#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "secfbl/harness.hpp"

namespace secfbl {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// Rejects keys outside `allowed` so that typos in a config file do not pass silently.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

json scenario_json(const ScenarioConfig& s) {
  return {{"antennas", s.antennas},
          {"users", s.users},
          {"eavesdroppers", s.eavesdroppers},
          {"aod_correlation", s.aod_correlation},
          {"bandwidth_hz", s.bandwidth_hz},
          {"carrier_hz", s.carrier_hz},
          {"loss_coefficient", s.loss_coefficient},
          {"noise_figure_db", s.noise_figure_db},
          {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
          {"user_min_distance_m", s.user_min_distance_m},
          {"user_max_distance_m", s.user_max_distance_m},
          {"eve_min_distance_m", s.eve_min_distance_m},
          {"eve_max_distance_m", s.eve_max_distance_m},
          {"min_ap_distance_m", s.min_ap_distance_m},
          {"angular_spread_deg", s.angular_spread_deg},
          {"antenna_spacing", s.antenna_spacing}};
}

void read_scenario(const json& j, ScenarioConfig& s) {
  check_keys(j, {"antennas", "users", "eavesdroppers", "aod_correlation", "bandwidth_hz", "carrier_hz",
                 "loss_coefficient", "noise_figure_db", "noise_psd_dbm_hz", "user_min_distance_m",
                 "user_max_distance_m", "eve_min_distance_m", "eve_max_distance_m", "min_ap_distance_m",
                 "angular_spread_deg", "antenna_spacing"},
             "scenario");
  read(j, "antennas", s.antennas);
  read(j, "users", s.users);
  read(j, "eavesdroppers", s.eavesdroppers);
  read(j, "aod_correlation", s.aod_correlation);
  read(j, "bandwidth_hz", s.bandwidth_hz);
  read(j, "carrier_hz", s.carrier_hz);
  read(j, "loss_coefficient", s.loss_coefficient);
  read(j, "noise_figure_db", s.noise_figure_db);
  read(j, "noise_psd_dbm_hz", s.noise_psd_dbm_hz);
  read(j, "user_min_distance_m", s.user_min_distance_m);
  read(j, "user_max_distance_m", s.user_max_distance_m);
  read(j, "eve_min_distance_m", s.eve_min_distance_m);
  read(j, "eve_max_distance_m", s.eve_max_distance_m);
  read(j, "min_ap_distance_m", s.min_ap_distance_m);
  read(j, "angular_spread_deg", s.angular_spread_deg);
  read(j, "antenna_spacing", s.antenna_spacing);
}

json spec_json(const SweepSpec& spec, bool with_workers) {
  json j = {{"variable", spec.variable},
            {"values", spec.values},
            {"power_dbm", spec.power_dbm},
            {"algorithms", spec.algorithms},
            {"drops", spec.drops},
            {"seed", spec.seed},
            {"fixed_caps", spec.fixed_caps},
            {"timing", spec.timing},
            {"output", spec.output},
            {"scenario", scenario_json(spec.scenario)},
            {"params", {{"blocklength", spec.params.blocklength},
                        {"alpha", spec.params.alpha},
                        {"weight", spec.params.weight}}},
            {"gpi", {{"tolerance", spec.inner.tolerance}, {"max_iterations", spec.inner.max_iterations}}},
            {"joint", {{"tolerance", spec.outer_tolerance}, {"max_iterations", spec.outer_iterations}}},
            {"caps", {{"lo", spec.cap_lo}, {"hi", spec.cap_hi}}}};
  if (with_workers) j["workers"] = spec.workers;
  return j;
}

}  // namespace

std::string spec_to_json(const SweepSpec& spec) { return spec_json(spec, true).dump(2) + "\n"; }

SweepSpec spec_from_json(const std::string& document, const SweepSpec& base) {
  SweepSpec spec = base;
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  try {
    check_keys(j, {"variable", "values", "power_dbm", "algorithms", "drops", "seed", "workers", "fixed_caps",
                   "timing", "output", "scenario", "params", "gpi", "joint", "caps"},
               "config");
    read(j, "variable", spec.variable);
    read(j, "values", spec.values);
    read(j, "power_dbm", spec.power_dbm);
    read(j, "algorithms", spec.algorithms);
    read(j, "drops", spec.drops);
    read(j, "seed", spec.seed);
    read(j, "workers", spec.workers);
    read(j, "fixed_caps", spec.fixed_caps);
    read(j, "timing", spec.timing);
    read(j, "output", spec.output);
    if (j.contains("scenario")) read_scenario(j.at("scenario"), spec.scenario);
    if (j.contains("params")) {
      const json& p = j.at("params");
      check_keys(p, {"blocklength", "alpha", "weight"}, "params");
      read(p, "blocklength", spec.params.blocklength);
      read(p, "alpha", spec.params.alpha);
      read(p, "weight", spec.params.weight);
    }
    if (j.contains("gpi")) {
      const json& g = j.at("gpi");
      check_keys(g, {"tolerance", "max_iterations"}, "gpi");
      read(g, "tolerance", spec.inner.tolerance);
      read(g, "max_iterations", spec.inner.max_iterations);
    }
    if (j.contains("joint")) {
      const json& o = j.at("joint");
      check_keys(o, {"tolerance", "max_iterations"}, "joint");
      read(o, "tolerance", spec.outer_tolerance);
      read(o, "max_iterations", spec.outer_iterations);
    }
    if (j.contains("caps")) {
      const json& c = j.at("caps");
      check_keys(c, {"lo", "hi"}, "caps");
      read(c, "lo", spec.cap_lo);
      read(c, "hi", spec.cap_hi);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return spec;
}

std::string to_json(const SweepSpec& spec, const SweepResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row = {{"sweep_var", r.sweep_var},
                {"sweep_value", r.sweep_value},
                {"algorithm", r.algorithm},
                {"seed", r.seed},
                {"sum_secrecy_rate", number_or_null(r.sum_secrecy_rate)},
                {"sum_secrecy_rate_clipped", number_or_null(r.sum_secrecy_rate_clipped)},
                {"sum_rate", number_or_null(r.sum_rate)},
                {"max_error_prob", number_or_null(r.max_error_prob)},
                {"max_leakage", number_or_null(r.max_leakage)},
                {"outer_iters", r.outer_iters},
                {"inner_iters_total", r.inner_iters_total},
                {"wall_ms", r.wall_ms}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  json summary = json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"sweep_value", s.sweep_value},
                       {"algorithm", s.algorithm},
                       {"count", s.count},
                       {"failures", s.failures},
                       {"mean_sum_secrecy_rate", number_or_null(s.mean_sum_secrecy_rate)},
                       {"stderr_sum_secrecy_rate", number_or_null(s.stderr_sum_secrecy_rate)},
                       {"mean_sum_secrecy_rate_clipped", number_or_null(s.mean_sum_secrecy_rate_clipped)},
                       {"mean_sum_rate", number_or_null(s.mean_sum_rate)},
                       {"mean_max_error_prob", number_or_null(s.mean_max_error_prob)},
                       {"mean_max_leakage", number_or_null(s.mean_max_leakage)}});
  }
  // Worker count is left out so the document depends only on the sweep definition, not on scheduling.
  const json doc = {{"schema_version", kSchemaVersion},
                    {"config", spec_json(spec, false)},
                    {"rows", rows},
                    {"summary", summary},
                    {"failures", result.failures}};
  return doc.dump(2) + "\n";
}

std::vector<MetricRow> rows_from_json(const std::string& document) {
  std::vector<MetricRow> rows;
  try {
    const json doc = json::parse(document);
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version " + std::to_string(version));
    }
    for (const auto& j : doc.at("rows")) {
      MetricRow r;
      r.sweep_var = j.at("sweep_var").get<std::string>();
      r.sweep_value = j.at("sweep_value").get<double>();
      r.algorithm = j.at("algorithm").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.sum_secrecy_rate = number_from(j.at("sum_secrecy_rate"));
      r.sum_secrecy_rate_clipped = number_from(j.at("sum_secrecy_rate_clipped"));
      r.sum_rate = number_from(j.at("sum_rate"));
      r.max_error_prob = number_from(j.at("max_error_prob"));
      r.max_leakage = number_from(j.at("max_leakage"));
      r.outer_iters = j.at("outer_iters").get<int>();
      r.inner_iters_total = j.at("inner_iters_total").get<int>();
      r.wall_ms = j.at("wall_ms").get<double>();
      if (j.contains("error")) r.error = j.at("error").get<std::string>();
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("rows_from_json: ") + e.what());
  }
  return rows;
}

}  // namespace secfbl
