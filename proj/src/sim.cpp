#include "lfc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lfc/dynamics.hpp"
#include "lfc/fileio.hpp"

namespace lfc {

namespace {

constexpr std::array<const char*, 3> kStateCols = {"d_delta", "d_f", "e"};
constexpr std::array<const char*, 3> kInputCols = {"d_p_disp", "p_c", "p_d"};
constexpr std::array<const char*, 3> kTurbineCols = {"t_d_p_disp", "t_p_c", "t_p_d"};

NetworkState plant_step(ModelVariant variant, const NetworkState& x, const NetworkInput& u,
                        const ExogenousVec& w, const Topology& topo, const NetworkParams& p) {
  switch (variant) {
    case ModelVariant::linear:
      return step_linear(x, u, w, topo, p);
    case ModelVariant::pwa_ess: {
      NetworkState next = step_linear(x, u, w, topo, p);
      for (int i = 0; i < kAreaCount; ++i) {
        const auto ai = static_cast<std::size_t>(i);
        next.areas[ai].e =
            step_pwa_ess(x.areas[ai].e, u[ai].p_c - u[ai].p_d, p.areas[ai], p.tau);
      }
      return next;
    }
    case ModelVariant::turbine:
      return step_turbine(x, u, w, topo, p, TurbineParams{});
    case ModelVariant::augmented:
      return step_augmented(x, u, w, topo, p);
  }
  throw std::logic_error("unhandled model variant");
}

bool finite_input(const NetworkInput& u) {
  for (const AreaInput& a : u) {
    if (!std::isfinite(a.d_p_disp) || !std::isfinite(a.p_c) || !std::isfinite(a.p_d)) return false;
  }
  return true;
}

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), ",%.17g", v);
  out += buf;
}

}  // namespace

double stage_cost(const NetworkState& x_next, const NetworkInput& u, const MpcConfig& cfg) {
  double cost = 0.0;
  for (int i = 0; i < kAreaCount; ++i) {
    const auto ai = static_cast<std::size_t>(i);
    const AreaState& s = x_next.areas[ai];
    const AreaInput& a = u[ai];
    cost += cfg.state_weights[0] * s.d_delta * s.d_delta + cfg.state_weights[1] * s.d_f * s.d_f +
            cfg.state_weights[2] * s.e * s.e;
    cost += cfg.input_weights[0] * a.d_p_disp * a.d_p_disp + cfg.input_weights[1] * a.p_c * a.p_c +
            cfg.input_weights[2] * a.p_d * a.p_d;
  }
  return cost;
}

RunLog run_closed_loop(const RunConfig& cfg, const Scenario& scenario, const Topology& topo,
                       const RunHooks* hooks) {
  if (cfg.steps < 1) throw std::invalid_argument("run: steps must be >= 1");
  if (!(cfg.e0_frac >= 0.0 && cfg.e0_frac <= 1.0)) {
    throw std::invalid_argument("run: e0_frac must lie in [0, 1]");
  }
  cfg.mpc.validate();

  NetworkParams params = default_params();
  // The turbine lags are only valid for a much faster loop.
  if (cfg.variant == ModelVariant::turbine) params.tau = 0.025;
  for (int i = 0; i < kAreaCount; ++i) {
    params.areas[static_cast<std::size_t>(i)].set_capacity(
        scenario.areas[static_cast<std::size_t>(i)].p_disp_max);
  }

  const Scenario repaired = repair_scenario(scenario);
  const StepSignals signals = interpolate_to_steps(repaired, params.steps_per_hour);
  if (cfg.steps > signals.steps) {
    throw LengthError("run: requested " + std::to_string(cfg.steps) +
                          " steps but the scenario covers only " + std::to_string(signals.steps),
                      signals.steps);
  }

  ControllerContext ctx;
  ctx.topology = &topo;
  ctx.params = params;
  ctx.config = cfg.mpc;
  std::unique_ptr<Controller> controller = make_controller(cfg.controller, ctx);
  if (!controller->supports(cfg.variant)) {
    throw VariantError("run: controller '" + std::string(controller->name()) +
                       "' cannot drive the '" + std::string(to_string(cfg.variant)) +
                       "' plant variant");
  }

  NetworkState x;
  for (int i = 0; i < kAreaCount; ++i) {
    x.areas[static_cast<std::size_t>(i)].e =
        cfg.e0_frac * params.areas[static_cast<std::size_t>(i)].e_max;
  }
  if (cfg.variant == ModelVariant::augmented) {
    std::array<AugmentedState, kAreaCount> aug{};
    for (int i = 0; i < kAreaCount; ++i) {
      const auto ai = static_cast<std::size_t>(i);
      aug[ai].p_disp = initial_dispatch(signals.load0[ai], signals.ren0[ai]);
    }
    x.augmented = aug;
  }
  if (cfg.variant == ModelVariant::turbine) {
    x.turbine = std::array<TurbineState, kAreaCount>{};
  }

  std::array<ConstraintSet, kAreaCount> sets;
  for (int i = 0; i < kAreaCount; ++i) {
    sets[static_cast<std::size_t>(i)] = constraint_set(params.areas[static_cast<std::size_t>(i)]);
  }

  RunLog log;
  log.steps = cfg.steps;
  log.variant = cfg.variant;
  log.controller = cfg.controller;
  log.params = params;
  log.states.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  log.inputs.reserve(static_cast<std::size_t>(cfg.steps));
  log.ties.reserve(static_cast<std::size_t>(cfg.steps));
  log.stage_costs.reserve(static_cast<std::size_t>(cfg.steps));
  log.qp_iterations.reserve(static_cast<std::size_t>(cfg.steps));
  log.softened.reserve(static_cast<std::size_t>(cfg.steps));
  log.violation_counts.reserve(static_cast<std::size_t>(cfg.steps));
  log.ctrl_wall_ms.reserve(static_cast<std::size_t>(cfg.steps));

  const auto run_t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < cfg.steps; ++k) {
    const ExogenousWindow window = splice_exogenous(k, signals, controller->horizon());
    StepDiagnostics diag;
    const NetworkInput u = controller->observe(k, x, window, diag);
    if (!finite_input(u)) {
      throw ControllerFault("run: controller '" + cfg.controller +
                                "' returned a non-finite input at step " + std::to_string(k),
                            k);
    }
    if (hooks != nullptr && hooks->on_step) hooks->on_step(k, x, window, u, diag, *controller);

    ExogenousVec meas;
    for (int i = 0; i < kAreaCount; ++i) {
      const auto ai = static_cast<std::size_t>(i);
      meas[ai].d_p_load = signals.d_load_meas[ai][static_cast<std::size_t>(k)];
      meas[ai].d_p_ren = signals.d_ren_meas[ai][static_cast<std::size_t>(k)];
    }

    std::array<double, kAreaCount> angles{};
    for (int i = 0; i < kAreaCount; ++i) {
      angles[static_cast<std::size_t>(i)] = x.areas[static_cast<std::size_t>(i)].d_delta;
    }
    const NetworkState x_next = plant_step(cfg.variant, x, u, meas, topo, params);

    const ViolationReport report = check_violations(x_next, u, sets);
    int count = static_cast<int>(report.violations.size());
    for (const Violation& v : report.violations) {
      ++log.violations_by_quantity[static_cast<std::size_t>(v.quantity)];
    }
    if (cfg.variant == ModelVariant::augmented) {
      for (int i = 0; i < kAreaCount; ++i) {
        const auto ai = static_cast<std::size_t>(i);
        const double pd = x_next.augmented->at(ai).p_disp;
        if (pd < 0.0 || pd > params.areas[ai].p_disp_max) {
          ++count;
          ++log.violations_by_quantity[static_cast<std::size_t>(Quantity::p_disp_total)];
        }
      }
    }

    const double cost = stage_cost(x_next, u, cfg.mpc);
    log.states.push_back(x);
    log.inputs.push_back(u);
    log.ties.push_back(tie_power(angles, topo));
    log.stage_costs.push_back(cost);
    log.qp_iterations.push_back(diag.iterations);
    log.softened.push_back(diag.softened ? 1 : 0);
    log.violation_counts.push_back(count);
    log.ctrl_wall_ms.push_back(diag.wall_ms);
    log.cumulative_cost += cost;
    x = x_next;
  }
  log.states.push_back(x);
  log.total_wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_t0).count();
  return log;
}

RunLog run_closed_loop(const RunConfig& cfg) {
  const Scenario scenario = load_scenario(cfg.scenario_path);
  const Topology topo = build_eea_topology();
  return run_closed_loop(cfg, scenario, topo, nullptr);
}

MetricsReport metrics(const RunLog& log, const NetworkParams& params) {
  MetricsReport rep;
  for (double c : log.stage_costs) rep.cumulative_cost += c;

  std::array<bool, kAreaCount> outside_prev{};
  for (std::size_t k = 1; k < log.states.size(); ++k) {
    for (int i = 0; i < kAreaCount; ++i) {
      const auto ai = static_cast<std::size_t>(i);
      const bool outside = std::abs(log.states[k].areas[ai].d_f) > 0.04;
      if (outside) {
        rep.band_time_s[ai] += params.tau;
        if (!outside_prev[ai]) ++rep.band_episodes[ai];
      }
      outside_prev[ai] = outside;
    }
  }
  for (int i = 0; i < kAreaCount; ++i) {
    const auto ai = static_cast<std::size_t>(i);
    rep.band_avg_s[ai] = rep.band_episodes[ai] > 0
                             ? rep.band_time_s[ai] / static_cast<double>(rep.band_episodes[ai])
                             : 0.0;
  }
  for (const NetworkState& s : log.states) {
    for (const AreaState& a : s.areas) {
      rep.max_abs_d_f = std::max(rep.max_abs_d_f, std::abs(a.d_f));
      rep.max_abs_d_delta = std::max(rep.max_abs_d_delta, std::abs(a.d_delta));
    }
  }
  rep.violations_by_quantity = log.violations_by_quantity;
  for (int c : log.violation_counts) rep.total_violations += c;

  double sum_ms = 0.0;
  for (double v : log.ctrl_wall_ms) {
    sum_ms += v;
    rep.ctrl_ms_max = std::max(rep.ctrl_ms_max, v);
  }
  rep.ctrl_ms_mean = log.ctrl_wall_ms.empty()
                         ? 0.0
                         : sum_ms / static_cast<double>(log.ctrl_wall_ms.size());
  rep.wall_s = log.total_wall_s;
  return rep;
}

std::string run_log_csv(const RunLog& log) {
  std::string out;
  out.reserve(static_cast<std::size_t>(log.steps + 1) * 4200);
  out += "k,stage_cost,violations,softened,qp_iterations";
  const auto add_group = [&out](const char* name) {
    for (std::string_view iso : kIsoCodes) {
      out += ',';
      out += name;
      out += '_';
      out += iso;
    }
  };
  for (const char* c : kStateCols) add_group(c);
  for (const char* c : kInputCols) add_group(c);
  add_group("p_tie");
  if (log.variant == ModelVariant::augmented) {
    add_group("p_disp");
    add_group("p_tie_int");
  }
  if (log.variant == ModelVariant::turbine) {
    for (const char* c : kTurbineCols) add_group(c);
  }
  out += '\n';

  char buf[64];
  for (int k = 0; k < log.steps; ++k) {
    const auto ki = static_cast<std::size_t>(k);
    std::snprintf(buf, sizeof(buf), "%d", k);
    out += buf;
    append_num(out, log.stage_costs[ki]);
    std::snprintf(buf, sizeof(buf), ",%d,%d,%d", log.violation_counts[ki],
                  static_cast<int>(log.softened[ki]), log.qp_iterations[ki]);
    out += buf;
    const NetworkState& s = log.states[ki];
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < kAreaCount; ++i) {
        const AreaState& a = s.areas[static_cast<std::size_t>(i)];
        append_num(out, c == 0 ? a.d_delta : (c == 1 ? a.d_f : a.e));
      }
    }
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < kAreaCount; ++i) {
        const AreaInput& a = log.inputs[ki][static_cast<std::size_t>(i)];
        append_num(out, c == 0 ? a.d_p_disp : (c == 1 ? a.p_c : a.p_d));
      }
    }
    for (int i = 0; i < kAreaCount; ++i) append_num(out, log.ties[ki][static_cast<std::size_t>(i)]);
    if (log.variant == ModelVariant::augmented) {
      for (int i = 0; i < kAreaCount; ++i) {
        append_num(out, s.augmented->at(static_cast<std::size_t>(i)).p_disp);
      }
      for (int i = 0; i < kAreaCount; ++i) {
        append_num(out, s.augmented->at(static_cast<std::size_t>(i)).p_tie);
      }
    }
    if (log.variant == ModelVariant::turbine) {
      for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < kAreaCount; ++i) {
          const TurbineState& t = s.turbine->at(static_cast<std::size_t>(i));
          append_num(out, c == 0 ? t.d_p_disp : (c == 1 ? t.p_c : t.p_d));
        }
      }
    }
    out += '\n';
  }
  return out;
}

std::string run_timing_csv(const RunLog& log) {
  std::string out = "k,ctrl_wall_ms\n";
  char buf[64];
  for (int k = 0; k < log.steps; ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", k, log.ctrl_wall_ms[static_cast<std::size_t>(k)]);
    out += buf;
  }
  return out;
}

std::string summary_text(const RunLog& log, const MetricsReport& rep, const RunConfig& cfg) {
  std::string out;
  char buf[160];
  out += "lfcbench run summary\n";
  out += "digest: " + (cfg.config_digest.empty() ? std::string("-") : cfg.config_digest) + "\n";
  out += "scenario: " + cfg.scenario_path + "\n";
  out += "controller: " + cfg.controller + "\n";
  out += "variant: " + std::string(to_string(cfg.variant)) + "\n";
  std::snprintf(buf, sizeof(buf), "steps: %d\nhorizon: %d\n", log.steps, cfg.mpc.horizon);
  out += buf;
  std::snprintf(buf, sizeof(buf), "cumulative_cost: %.17g\n", rep.cumulative_cost);
  out += buf;
  std::snprintf(buf, sizeof(buf), "max_abs_d_f: %.17g\nmax_abs_d_delta: %.17g\n", rep.max_abs_d_f,
                rep.max_abs_d_delta);
  out += buf;
  std::snprintf(buf, sizeof(buf), "violations_total: %ld\n", rep.total_violations);
  out += buf;
  out += "violations_by_kind:";
  for (int q = 0; q < kQuantityCount; ++q) {
    std::snprintf(buf, sizeof(buf), " %s=%ld",
                  std::string(quantity_name(static_cast<Quantity>(q))).c_str(),
                  rep.violations_by_quantity[static_cast<std::size_t>(q)]);
    out += buf;
  }
  out += '\n';
  std::snprintf(buf, sizeof(buf), "ctrl_ms_mean: %.6g\nctrl_ms_max: %.6g\nwall_s: %.6g\n",
                rep.ctrl_ms_mean, rep.ctrl_ms_max, rep.wall_s);
  out += buf;
  out += "band_time: iso,outside_s,episodes,avg_episode_s\n";
  for (int i = 0; i < kAreaCount; ++i) {
    const auto ai = static_cast<std::size_t>(i);
    std::snprintf(buf, sizeof(buf), "band_time: %s,%.17g,%d,%.17g\n",
                  std::string(kIsoCodes[ai]).c_str(), rep.band_time_s[ai], rep.band_episodes[ai],
                  rep.band_avg_s[ai]);
    out += buf;
  }
  return out;
}

std::string write_run_artifacts(const RunLog& log, const MetricsReport& rep,
                                const RunConfig& cfg) {
  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const std::string digest = cfg.config_digest.empty() ? "local" : cfg.config_digest;
  const std::string base = dir + "/run-" + digest;
  write_file_atomic(base + "_log.csv", run_log_csv(log));
  write_file_atomic(base + "_timing.csv", run_timing_csv(log));
  write_file_atomic(base + "_summary.txt", summary_text(log, rep, cfg));
  return base + "_log.csv";
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace lfc
