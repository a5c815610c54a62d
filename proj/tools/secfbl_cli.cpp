// Command-line front end: parameter sweeps, single-drop diagnostics and the self-test suite.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "secfbl/baselines.hpp"
#include "secfbl/harness.hpp"
#include "secfbl/joint.hpp"
#include "secfbl/secrecy.hpp"

namespace {

using nlohmann::json;
using namespace secfbl;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json error_json(const std::string& what) { return {{"status", "error"}, {"message", what}}; }

// Flags shared by `sweep` and `single`; they override a config file only when given explicitly.
struct SharedFlags {
  std::string config;
  double power_dbm = 20.0;
  double blocklength = 200.0;
  double alpha = 10.0;
  double weight = 0.01;
  int antennas = 8;
  int users = 4;
  int eves = 4;
  double aod_correlation = 0.1;
  bool fixed_caps = false;
  CLI::Option* opts[9] = {};

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; explicit flags override its values");
    opts[0] = app->add_option("--power-dbm", power_dbm, "transmit power P in dBm (default 20)");
    opts[1] = app->add_option("--blocklength", blocklength, "blocklength L (default 200)");
    opts[2] = app->add_option("--alpha", alpha,
                              "smooth-max sharpness (default 10; a tool choice, not taken from the model)");
    opts[3] = app->add_option("--weight", weight, "rate weight w in [0, 1] (default 0.01)");
    opts[4] = app->add_option("--antennas", antennas, "AP antennas N (default 8)");
    opts[5] = app->add_option("--users", users, "users K (default 4)");
    opts[6] = app->add_option("--eves", eves, "eavesdroppers M (default 4)");
    opts[7] = app->add_option("--aod-correlation", aod_correlation, "eve AoD spread Delta in (0, 1) (default 0.1)");
    opts[8] = app->add_flag("--fixed-caps", fixed_caps, "evaluate at eps = eps-hat, delta = delta-hat (no Phase II)");
  }

  void apply(SweepSpec& spec) const {
    if (!config.empty()) spec = spec_from_json(read_file(config), spec);
    if (opts[0]->count()) spec.power_dbm = power_dbm;
    if (opts[1]->count()) spec.params.blocklength = blocklength;
    if (opts[2]->count()) spec.params.alpha = alpha;
    if (opts[3]->count()) spec.params.weight = weight;
    if (opts[4]->count()) spec.scenario.antennas = antennas;
    if (opts[5]->count()) spec.scenario.users = users;
    if (opts[6]->count()) spec.scenario.eavesdroppers = eves;
    if (opts[7]->count()) spec.scenario.aod_correlation = aod_correlation;
    if (opts[8]->count()) spec.fixed_caps = fixed_caps;
  }
};

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

json single_drop(const SweepSpec& spec, std::uint64_t seed) {
  ScenarioConfig scenario = spec.scenario;
  scenario.seed = seed;
  const ChannelRealization drop = generate_drop(scenario);
  FblParams params = spec.params;
  params.symbol_power = dbm_to_watts(spec.power_dbm);
  params.noise_user = params.noise_eve = drop.noise_power;
  const ReliabilityCaps caps = ReliabilityCaps::linspace(drop.users(), drop.eavesdroppers(), spec.cap_lo, spec.cap_hi);

  json out;
  out["seed"] = seed;
  out["noise_power_w"] = drop.noise_power;
  out["symbol_power_w"] = params.symbol_power;
  json users = json::array();
  for (int k = 0; k < drop.users(); ++k) {
    users.push_back({{"x", drop.user_positions[k].x}, {"y", drop.user_positions[k].y},
                     {"gain", drop.user_gains[k]}, {"aod", drop.user_aods[k]}});
  }
  json eves = json::array();
  for (int m = 0; m < drop.eavesdroppers(); ++m) {
    eves.push_back({{"x", drop.eve_positions[m].x}, {"y", drop.eve_positions[m].y}, {"gain", drop.eve_gains[m]},
                    {"aod", drop.eve_aods[m]}, {"anchor", drop.eve_anchors[m]}});
  }
  out["users"] = users;
  out["eavesdroppers"] = eves;

  const QuadraticFormSet forms = build_forms(drop, params);
  const GpiResult gpi = gpi_solve(forms, caps.as_levels(), params, spec.inner, mrt_start(drop));
  out["alg1"] = {{"log2_lambda", gpi.log2_lambda},
                 {"iterations", gpi.iterations},
                 {"converged", gpi.converged},
                 {"kkt_residual", gpi.kkt_residual},
                 {"omega_clamps", gpi.omega_clamps}};

  JointSettings settings{spec.outer_tolerance, spec.outer_iterations, spec.inner, CsitMode::Perfect, caps};
  const JointResult joint = joint_solve(drop, params, settings);
  const LinkSinrs sinrs = sinrs_from_channels(drop, joint.precoder, params);
  out["alg2"] = {{"objective", joint.objective},
                 {"r_infinity", joint.r_infinity},
                 {"r_infinity_raw", joint.r_infinity_raw},
                 {"secrecy_rates", joint.secrecy_rates},
                 {"sum_secrecy_rate", joint.sum_secrecy_rate},
                 {"error", vector_json(joint.reliability.levels.error)},
                 {"leakage", matrix_json(joint.reliability.levels.leakage)},
                 {"tau", joint.reliability.tau},
                 {"xi", joint.reliability.xi},
                 {"ell", joint.reliability.ell},
                 {"j", joint.reliability.j},
                 {"user_sinr", vector_json(sinrs.user)},
                 {"eve_sinr", matrix_json(sinrs.eve)},
                 {"outer_iterations", joint.outer_iterations},
                 {"inner_iterations_total", joint.inner_iterations_total}};

  json rows = json::array();
  SweepSpec one = spec;
  one.variable = "P_dBm";
  for (const auto& r : evaluate_drop(one, spec.power_dbm, seed)) {
    json row = {{"algorithm", r.algorithm}, {"sum_secrecy_rate", r.sum_secrecy_rate},
                {"sum_rate", r.sum_rate},   {"max_error_prob", r.max_error_prob},
                {"max_leakage", r.max_leakage}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  out["algorithms"] = rows;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure precoding with error-probability and leakage control at finite blocklength"};
  app.require_subcommand(1);

  SweepSpec spec;
  SharedFlags shared;
  std::string values_text = "20";
  std::string algorithms_text;
  bool print_config = false;

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over P_dBm, L, N, K or M");
  shared.attach(sweep);
  auto* var_opt = sweep->add_option("--var", spec.variable, "swept variable: P_dBm | L | N | K | M")
                      ->check(CLI::IsMember(known_sweep_variables()));
  auto* values_opt = sweep->add_option("--values", values_text, "comma-separated sorted values");
  auto* algos_opt = sweep->add_option("--algorithms", algorithms_text, "comma-separated subset of: alg1, alg1-cov, "
                                      "alg2, alg2-cov, fbl-se-max, rzf, rzf-eve, zf, zf-eve, mrt");
  auto* drops_opt = sweep->add_option("--drops", spec.drops, "drops per point (default 50)");
  auto* seed_opt = sweep->add_option("--seed", spec.seed, "base seed (default 1)");
  auto* workers_opt = sweep->add_option("--workers", spec.workers, "worker threads (default 1)");
  auto* output_opt = sweep->add_option("--output", spec.output, "output prefix; writes <prefix>.csv and <prefix>.json");
  auto* timing_opt = sweep->add_flag("--timing", spec.timing, "record wall_ms (makes output non-reproducible)");
  sweep->add_flag("--print-config", print_config, "print the resolved config as JSON and exit");

  std::uint64_t single_seed = 1;
  auto* single = app.add_subcommand("single", "Run one drop and dump full diagnostics as JSON");
  shared.attach(single);
  single->add_option("--seed", single_seed, "drop seed (default 1)");

  std::string only;
  bool quick = false;
  auto* selftest = app.add_subcommand("selftest", "Run the oracle and acceptance suite");
  selftest->add_option("--only", only, "comma-separated criterion numbers");
  selftest->add_flag("--quick", quick, "reduced instance counts (smoke run; thresholds unchanged)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      // Options bound straight into `spec` would be clobbered by a config file; re-apply them after it.
      const SweepSpec from_flags = spec;
      shared.apply(spec);
      if (var_opt->count()) spec.variable = from_flags.variable;
      if (drops_opt->count()) spec.drops = from_flags.drops;
      if (seed_opt->count()) spec.seed = from_flags.seed;
      if (workers_opt->count()) spec.workers = from_flags.workers;
      if (output_opt->count()) spec.output = from_flags.output;
      if (timing_opt->count()) spec.timing = from_flags.timing;
      if (values_opt->count() || shared.config.empty()) {
        spec.values.clear();
        for (const auto& v : CLI::detail::split(values_text, ',')) spec.values.push_back(std::stod(v));
      }
      if (algos_opt->count()) spec.algorithms = CLI::detail::split(algorithms_text, ',');
      spec.validate();
      if (print_config) {
        std::cout << spec_to_json(spec);
        return 0;
      }
      const SweepResult result = run_sweep(spec);
      if (spec.output.empty()) {
        emit_csv(result.rows, std::cout);
      } else {
        write_outputs(spec, result);
        for (const auto& s : result.summary) {
          std::cout << spec.variable << '=' << s.sweep_value << ' ' << s.algorithm << ": "
                    << s.mean_sum_secrecy_rate << " +/- " << s.stderr_sum_secrecy_rate << " bits/s/Hz, max eps "
                    << s.mean_max_error_prob << ", max delta " << s.mean_max_leakage << " (" << s.count << " drops)\n";
        }
      }
      if (result.failures > 0) {
        json failed = json::array();
        for (const auto& r : result.rows) {
          if (!r.error.empty()) {
            failed.push_back({{"sweep_value", r.sweep_value}, {"algorithm", r.algorithm}, {"seed", r.seed},
                              {"error", r.error}});
          }
        }
        std::cerr << json{{"status", "partial_failure"}, {"failures", result.failures}, {"rows", failed}}.dump()
                  << '\n';
        return 2;
      }
      return 0;
    }
    if (single->parsed()) {
      shared.apply(spec);
      spec.validate();
      std::cout << single_drop(spec, single_seed).dump(2) << '\n';
      return 0;
    }
    if (selftest->parsed()) {
      acceptance::Options options;
      options.quick = quick;
      if (!only.empty()) {
        for (const auto& v : CLI::detail::split(only, ',')) options.only.push_back(std::stoi(v));
      }
      return acceptance::run_all(options, std::cout) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << error_json(e.what()).dump() << '\n';
    return 1;
  }
  return 0;
}
