#pragma once
// Closed-loop run engine: steps the selected plant variant under a
// controller driven by measured data, keeps the stage-cost ledger and
// violation tallies, and writes the run artifacts. The log CSV contains
// only deterministic quantities; wall-clock timings go to separate files.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfc/model.hpp"
#include "lfc/mpc.hpp"
#include "lfc/scenario.hpp"
#include "lfc/topology.hpp"

namespace lfc {

struct RunConfig {
  std::string scenario_path;
  std::string controller = "centralized";
  ModelVariant variant = ModelVariant::linear;
  int steps = 1440;
  double e0_frac = 0.5;  // initial stored energy as a fraction of e_max
  MpcConfig mpc;
  std::string out_dir;
  std::string config_digest;  // names the artifact files; the CLI fills it
};

struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Controller/variant mismatch (e.g. turbine plant with a controller that
/// cannot drive it).
struct VariantError : RunError {
  using RunError::RunError;
};

/// Requested run length exceeds the scenario data.
struct LengthError : RunError {
  int limit;
  LengthError(const std::string& msg, int limit_steps) : RunError(msg), limit(limit_steps) {}
};

/// Controller returned a non-finite input; `step` names the offending step.
struct ControllerFault : RunError {
  int step;
  ControllerFault(const std::string& msg, int at_step) : RunError(msg), step(at_step) {}
};

inline constexpr int kQuantityCount = 7;  // Quantity enum size

struct RunLog {
  int steps = 0;
  ModelVariant variant = ModelVariant::linear;
  std::string controller;
  NetworkParams params;                        // capacities applied, tau as stepped
  std::vector<NetworkState> states;            // x(0..K)
  std::vector<NetworkInput> inputs;            // u(0..K-1)
  std::vector<std::array<double, kAreaCount>> ties;  // tie power at the pre-step state
  std::vector<double> stage_costs;
  std::vector<int> qp_iterations;
  std::vector<std::uint8_t> softened;
  std::vector<int> violation_counts;
  std::vector<double> ctrl_wall_ms;            // never part of the log CSV
  std::array<long, kQuantityCount> violations_by_quantity{};
  double cumulative_cost = 0.0;
  double total_wall_s = 0.0;
};

struct MetricsReport {
  double cumulative_cost = 0.0;
  std::array<double, kAreaCount> band_time_s{};  // time with |d_f| beyond the band
  std::array<int, kAreaCount> band_episodes{};
  std::array<double, kAreaCount> band_avg_s{};
  long total_violations = 0;
  std::array<long, kQuantityCount> violations_by_quantity{};
  double max_abs_d_f = 0.0;
  double max_abs_d_delta = 0.0;
  double ctrl_ms_mean = 0.0;
  double ctrl_ms_max = 0.0;
  double wall_s = 0.0;
};

/// Test and instrumentation hook, called once per step after the controller
/// decided but before the plant moves.
struct RunHooks {
  std::function<void(int k, const NetworkState& x_k, const ExogenousWindow& window,
                     const NetworkInput& u, const StepDiagnostics& diag, Controller& controller)>
      on_step;
};

/// Steps the plant cfg.steps times. The plant consumes measured signals
/// only; forecasts reach the controller through its window. Throws
/// LengthError, VariantError, ControllerFault, UnknownControllerError.
RunLog run_closed_loop(const RunConfig& cfg, const Scenario& scenario, const Topology& topo,
                       const RunHooks* hooks = nullptr);

/// Convenience overload: loads cfg.scenario_path and uses the standard
/// network topology.
RunLog run_closed_loop(const RunConfig& cfg);

/// Cost charged to one step: the reached state against R, the applied input
/// against Q.
double stage_cost(const NetworkState& x_next, const NetworkInput& u, const MpcConfig& cfg);

/// Aggregates a finished log. Frequency-band time counts reached states
/// x(1..K), weighting each out-of-band state with the sampling time.
MetricsReport metrics(const RunLog& log, const NetworkParams& params);

std::string run_log_csv(const RunLog& log);
std::string run_timing_csv(const RunLog& log);
std::string summary_text(const RunLog& log, const MetricsReport& rep, const RunConfig& cfg);

/// Writes run-<digest>_log.csv, run-<digest>_timing.csv and
/// run-<digest>_summary.txt into cfg.out_dir, atomically. Returns the log
/// path.
std::string write_run_artifacts(const RunLog& log, const MetricsReport& rep,
                                const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace lfc
