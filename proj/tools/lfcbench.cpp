// lfcbench: command-line front end for the 26-area load-frequency benchmark.
//
// Subcommands: generate, validate, run, report, plot, topology.
// Exit codes:
//   0 success            5 controller/variant mismatch
//   2 bad configuration  6 scenario schema error
//   3 scenario not found 7 log/artifact read error
//   4 unknown controller 8 solver or controller fault

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lfc/fileio.hpp"
#include "lfc/logio.hpp"
#include "lfc/model.hpp"
#include "lfc/mpc.hpp"
#include "lfc/plot.hpp"
#include "lfc/qp.hpp"
#include "lfc/scenario.hpp"
#include "lfc/sim.hpp"
#include "lfc/topology.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoScenario = 3;
constexpr int kExitController = 4;
constexpr int kExitVariant = 5;
constexpr int kExitSchema = 6;
constexpr int kExitLog = 7;
constexpr int kExitInternal = 8;

int fail(int code, const std::string& msg) {
  std::cerr << "lfcbench: " << msg << "\n";
  return code;
}

struct RunOptions {
  lfc::RunConfig cfg;
  std::string config_path;
  // CLI override flags; applied over the JSON config when given.
  std::string scenario, controller, variant, out_dir;
  int steps = 0, horizon = 0, threads = 0, max_iter = 0;
  double e0_frac = 0.0, tol_prim = 0.0, tol_dual = 0.0;
  bool no_warm_start = false;
};

const std::vector<std::string> kConfigKeys = {
    "scenario",  "controller", "variant",       "steps",         "e0_frac",
    "horizon",   "threads",    "tol_prim",      "tol_dual",      "max_iter",
    "warm_start", "state_weights", "input_weights", "out_dir"};

void apply_json_config(lfc::RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    try {
      if (key == "scenario") cfg.scenario_path = value.get<std::string>();
      else if (key == "controller") cfg.controller = value.get<std::string>();
      else if (key == "variant") {
        const auto v = lfc::variant_from_string(value.get<std::string>());
        if (!v) throw std::invalid_argument("config: unknown variant '" +
                                            value.get<std::string>() + "'");
        cfg.variant = *v;
      } else if (key == "steps") cfg.steps = value.get<int>();
      else if (key == "e0_frac") cfg.e0_frac = value.get<double>();
      else if (key == "horizon") cfg.mpc.horizon = value.get<int>();
      else if (key == "threads") cfg.mpc.threads = value.get<int>();
      else if (key == "tol_prim") cfg.mpc.tol_prim = value.get<double>();
      else if (key == "tol_dual") cfg.mpc.tol_dual = value.get<double>();
      else if (key == "max_iter") cfg.mpc.max_iter = value.get<int>();
      else if (key == "warm_start") cfg.mpc.warm_start = value.get<bool>();
      else if (key == "state_weights") cfg.mpc.state_weights = value.get<std::array<double, 3>>();
      else if (key == "input_weights") cfg.mpc.input_weights = value.get<std::array<double, 3>>();
      else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
}

/// Canonical JSON of everything that shapes the run result (not where the
/// artifacts land); its hash names the artifact files.
std::string effective_config_json(const lfc::RunConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = cfg.scenario_path;
  j["controller"] = cfg.controller;
  j["variant"] = std::string(lfc::to_string(cfg.variant));
  j["steps"] = cfg.steps;
  j["e0_frac"] = cfg.e0_frac;
  j["horizon"] = cfg.mpc.horizon;
  j["threads"] = cfg.mpc.threads;
  j["tol_prim"] = cfg.mpc.tol_prim;
  j["tol_dual"] = cfg.mpc.tol_dual;
  j["max_iter"] = cfg.mpc.max_iter;
  j["warm_start"] = cfg.mpc.warm_start;
  j["state_weights"] = cfg.mpc.state_weights;
  j["input_weights"] = cfg.mpc.input_weights;
  return j.dump();  // object keys are emitted sorted
}

std::string hex_digest(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int cmd_generate(std::uint64_t seed, const std::string& profile, const std::string& out) {
  const auto p = lfc::profile_from_string(profile);
  if (!p) return fail(kExitConfig, "unknown profile '" + profile + "'");
  const lfc::Scenario sc = lfc::synthetic_scenario(seed, *p);
  try {
    lfc::save_scenario(sc, out);
  } catch (const std::exception& e) {
    return fail(kExitConfig, e.what());
  }
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path, const std::string& signals_out) {
  if (!std::filesystem::exists(path)) {
    return fail(kExitNoScenario, "scenario file not found: " + path);
  }
  lfc::Scenario sc;
  try {
    sc = lfc::load_scenario(path);
  } catch (const lfc::SchemaError& e) {
    return fail(kExitSchema, e.what());
  }
  int missing = 0;
  for (const auto& area : sc.areas) {
    for (const auto& series : area.series) missing += series.missing_count();
  }
  std::cout << "scenario: " << path << "\n";
  if (!sc.provenance.empty()) std::cout << "provenance: " << sc.provenance << "\n";
  std::cout << "areas: " << lfc::kAreaCount << "\nmissing cells: " << missing << "\n";
  lfc::Scenario repaired;
  try {
    repaired = lfc::repair_scenario(sc);
  } catch (const lfc::SchemaError& e) {
    return fail(kExitSchema, e.what());
  }
  if (missing > 0) std::cout << "repair: ok (interpolated)\n";
  if (!signals_out.empty()) {
    const lfc::StepSignals sig = lfc::interpolate_to_steps(repaired, 1440);
    lfc::write_step_signals_csv(sig, signals_out);
    std::cout << "signals: " << signals_out << " (" << sig.steps << " steps)\n";
  }
  std::cout << "valid\n";
  return kExitOk;
}

int cmd_run(const RunOptions& opt) {
  lfc::RunConfig cfg = opt.cfg;
  try {
    if (!opt.config_path.empty()) apply_json_config(cfg, opt.config_path);
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, e.what());
  }
  if (!opt.scenario.empty()) cfg.scenario_path = opt.scenario;
  if (!opt.controller.empty()) cfg.controller = opt.controller;
  if (!opt.variant.empty()) {
    const auto v = lfc::variant_from_string(opt.variant);
    if (!v) return fail(kExitConfig, "unknown variant '" + opt.variant + "'");
    cfg.variant = *v;
  }
  if (opt.steps > 0) cfg.steps = opt.steps;
  if (opt.horizon > 0) cfg.mpc.horizon = opt.horizon;
  if (opt.threads > 0) cfg.mpc.threads = opt.threads;
  if (opt.max_iter > 0) cfg.mpc.max_iter = opt.max_iter;
  if (opt.e0_frac > 0.0) cfg.e0_frac = opt.e0_frac;
  if (opt.tol_prim > 0.0) cfg.mpc.tol_prim = opt.tol_prim;
  if (opt.tol_dual > 0.0) cfg.mpc.tol_dual = opt.tol_dual;
  if (opt.no_warm_start) cfg.mpc.warm_start = false;
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("LFCBENCH_OUT");
    cfg.out_dir = env != nullptr ? env : ".";
  }

  if (cfg.scenario_path.empty()) return fail(kExitConfig, "run: no scenario given");
  if (!std::filesystem::exists(cfg.scenario_path)) {
    return fail(kExitNoScenario, "scenario file not found: " + cfg.scenario_path);
  }
  cfg.config_digest = hex_digest(lfc::fnv1a64(effective_config_json(cfg)));

  try {
    const lfc::RunLog log = lfc::run_closed_loop(cfg);
    const lfc::MetricsReport rep = lfc::metrics(log, log.params);
    const std::string log_path = lfc::write_run_artifacts(log, rep, cfg);
    std::cout << lfc::summary_text(log, rep, cfg);
    std::cout << "log: " << log_path << "\n";
    return kExitOk;
  } catch (const lfc::SchemaError& e) {
    return fail(kExitSchema, e.what());
  } catch (const lfc::UnknownControllerError& e) {
    return fail(kExitController, e.what());
  } catch (const lfc::VariantError& e) {
    return fail(kExitVariant, e.what());
  } catch (const lfc::LengthError& e) {
    return fail(kExitConfig, e.what());
  } catch (const lfc::RunError& e) {
    return fail(kExitInternal, e.what());
  } catch (const lfc::SolverError& e) {
    return fail(kExitInternal, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, e.what());
  }
}

int cmd_report(const std::string& log_path, double tau) {
  lfc::LogTable table;
  try {
    table = lfc::read_log_table(log_path);
  } catch (const lfc::LogReadError& e) {
    return fail(kExitLog, e.what());
  }
  double cumulative = 0.0;
  long violations = 0;
  long softened = 0;
  try {
    for (double v : table.values(table.require_column("stage_cost"))) cumulative += v;
    for (double v : table.values(table.require_column("violations"))) {
      violations += static_cast<long>(v);
    }
    for (double v : table.values(table.require_column("softened"))) {
      softened += static_cast<long>(v);
    }
    std::printf("steps: %d\n", table.rows_count());
    std::printf("cumulative_cost: %.17g\n", cumulative);
    std::printf("violations_total: %ld\nsoftened_steps: %ld\n", violations, softened);
    std::printf("band_time: iso,outside_s,episodes,avg_episode_s\n");
    for (std::string_view iso : lfc::kIsoCodes) {
      const int col = table.require_column("d_f_" + std::string(iso));
      int outside_steps = 0;
      int episodes = 0;
      bool prev = false;
      for (const auto& row : table.rows) {
        const bool out = std::abs(row[static_cast<std::size_t>(col)]) > 0.04;
        if (out) {
          ++outside_steps;
          if (!prev) ++episodes;
        }
        prev = out;
      }
      const double secs = outside_steps * tau;
      std::printf("band_time: %s,%.17g,%d,%.17g\n", std::string(iso).c_str(), secs, episodes,
                  episodes > 0 ? secs / episodes : 0.0);
    }
  } catch (const lfc::LogReadError& e) {
    return fail(kExitLog, e.what());
  }

  // Cross-check the sibling summary when the standard naming is in place.
  const std::string suffix = "_log.csv";
  if (log_path.size() > suffix.size() &&
      log_path.compare(log_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string summary_path =
        log_path.substr(0, log_path.size() - suffix.size()) + "_summary.txt";
    std::ifstream in(summary_path);
    if (in) {
      const std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
      const auto recorded = lfc::summary_value(text, "cumulative_cost");
      if (recorded) {
        const double rel = std::abs(*recorded - cumulative) /
                           std::max(1.0, std::max(std::abs(*recorded), std::abs(cumulative)));
        if (rel > 1e-9) {
          std::printf("summary_check: MISMATCH (recorded %.17g)\n", *recorded);
          return kExitLog;
        }
        std::printf("summary_check: ok\n");
      }
    }
  }
  return kExitOk;
}

int cmd_plot(const std::string& log_path, std::string out_dir) {
  lfc::LogTable table;
  try {
    table = lfc::read_log_table(log_path);
  } catch (const lfc::LogReadError& e) {
    return fail(kExitLog, e.what());
  }
  const std::filesystem::path p(log_path);
  if (out_dir.empty()) {
    out_dir = p.has_parent_path() ? p.parent_path().string() : ".";
  }
  std::string base = p.stem().string();
  const std::string tail = "_log";
  if (base.size() > tail.size() && base.compare(base.size() - tail.size(), tail.size(), tail) == 0) {
    base.resize(base.size() - tail.size());
  }
  const std::vector<std::string> written = lfc::write_log_charts(table, out_dir, base);
  if (written.empty()) return fail(kExitLog, "plot: no plottable columns in " + log_path);
  for (const std::string& w : written) std::cout << "wrote " << w << "\n";
  return kExitOk;
}

int cmd_topology(const std::string& out) {
  const lfc::Topology topo = lfc::build_eea_topology();
  const std::string csv = topo.edge_list_csv();
  if (out.empty()) {
    std::cout << csv;
  } else {
    lfc::write_file_atomic(out, csv);
    std::cout << "wrote " << out << " (" << topo.lines().size() << " lines)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"26-area European load-frequency control benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lfcbench 1.0.0");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic day-ahead scenario");
  std::uint64_t gen_seed = 0;
  std::string gen_profile = "calm";
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  gen->add_option("--profile", gen_profile, "Day profile")
      ->check(CLI::IsMember({"calm", "volatile"}))
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // validate
  auto* val = app.add_subcommand("validate", "Check a scenario file against the schema");
  std::string val_path, val_signals;
  val->add_option("scenario", val_path, "Scenario CSV path")->required();
  val->add_option("--signals-out", val_signals, "Also write the interpolated per-step signals");

  // run
  auto* run = app.add_subcommand("run", "Closed-loop run; writes log, timing and summary files");
  RunOptions opt;
  run->add_option("--config", opt.config_path, "JSON config file");
  run->add_option("--scenario", opt.scenario, "Scenario CSV path");
  run->add_option("--controller", opt.controller,
                  "Controller name (built in: centralized, decentralized, zero)");
  run->add_option("--variant", opt.variant, "Plant variant")
      ->check(CLI::IsMember({"linear", "pwa_ess", "turbine", "augmented"}));
  run->add_option("--steps", opt.steps, "Run length in control steps");
  run->add_option("--horizon", opt.horizon, "Prediction horizon");
  run->add_option("--threads", opt.threads, "Worker threads for decentralized solves");
  run->add_option("--max-iter", opt.max_iter, "Solver iteration cap");
  run->add_option("--e0-frac", opt.e0_frac, "Initial storage fill fraction");
  run->add_option("--tol-prim", opt.tol_prim, "Solver primal tolerance");
  run->add_option("--tol-dual", opt.tol_dual, "Solver dual tolerance");
  run->add_flag("--no-warm-start", opt.no_warm_start, "Disable warm starting");
  run->add_option("--out-dir", opt.out_dir, "Artifact directory (default $LFCBENCH_OUT or .)");

  // report
  auto* rep = app.add_subcommand("report", "Recompute metrics from a run log CSV");
  std::string rep_log;
  double rep_tau = 2.5;
  rep->add_option("--log", rep_log, "Run log CSV")->required();
  rep->add_option("--tau", rep_tau, "Sampling time used for band seconds")->capture_default_str();

  // plot
  auto* plt = app.add_subcommand("plot", "Render SVG charts from a run log CSV");
  std::string plt_log, plt_out;
  plt->add_option("--log", plt_log, "Run log CSV")->required();
  plt->add_option("--out-dir", plt_out, "Chart directory (default: beside the log)");

  // topology
  auto* top = app.add_subcommand("topology", "Print or write the tie-line edge list");
  std::string top_out;
  top->add_option("--out", top_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_seed, gen_profile, gen_out);
    if (val->parsed()) return cmd_validate(val_path, val_signals);
    if (run->parsed()) return cmd_run(opt);
    if (rep->parsed()) return cmd_report(rep_log, rep_tau);
    if (plt->parsed()) return cmd_plot(plt_log, plt_out);
    if (top->parsed()) return cmd_topology(top_out);
  } catch (const std::exception& e) {
    return fail(kExitInternal, e.what());
  }
  return kExitConfig;
}
