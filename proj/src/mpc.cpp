#include "lfc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace lfc {

namespace {

constexpr double kSoftWeight = 1e6;

void require_arg(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void MpcConfig::validate() const {
  require_arg(horizon >= 1, "mpc: horizon must be >= 1");
  for (double w : state_weights) require_arg(std::isfinite(w) && w >= 0.0, "mpc: bad state weight");
  for (double w : input_weights) require_arg(std::isfinite(w) && w >= 0.0, "mpc: bad input weight");
  require_arg(tol_prim > 0.0 && tol_dual > 0.0, "mpc: tolerances must be positive");
  require_arg(max_iter >= 1, "mpc: max_iter must be >= 1");
  require_arg(threads >= 1, "mpc: threads must be >= 1");
}

ExogenousWindow splice_exogenous(int k, const StepSignals& signals, int horizon) {
  require_arg(horizon >= 1, "splice: horizon must be >= 1");
  require_arg(k >= 0 && k < signals.steps, "splice: step outside the scenario data");
  ExogenousWindow window(static_cast<std::size_t>(horizon));
  for (int j = 1; j <= horizon; ++j) {
    ExogenousVec& v = window[static_cast<std::size_t>(j - 1)];
    for (int a = 0; a < kAreaCount; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (j == 1) {
        v[ai].d_p_load = signals.d_load_meas[ai][static_cast<std::size_t>(k)];
        v[ai].d_p_ren = signals.d_ren_meas[ai][static_cast<std::size_t>(k)];
      } else {
        const auto idx = static_cast<std::size_t>(std::min(k + j - 1, signals.steps - 1));
        v[ai].d_p_load = signals.d_load_for[ai][idx];
        v[ai].d_p_ren = signals.d_ren_for[ai][idx];
      }
    }
  }
  return window;
}

namespace {

// Stacked program over the coupled network. Variable layout: x stages
// [0, N*78), u stages [N*78, 2N*78); the softened copy appends v (boxed
// state mirrors) and s (free slacks) blocks with x = v + s coupling rows.
struct NetworkTemplate {
  int N = 0;
  bool soften = false;
  const Topology* topo = nullptr;
  NetworkParams params;
  MpcConfig cfg;
  QuadraticProgram qp;

  static constexpr int nx = kStateDim;
  int me_dyn = 0;

  std::array<double, kAreaCount> gain{};       // tau * k_p / t_p
  std::array<double, kAreaCount> coeff_sum{};  // sum of neighbor tie coefficients

  int xvar(int j, int i, int c) const { return (j - 1) * nx + 3 * i + c; }
  int uvar(int j, int i, int c) const { return N * nx + j * nx + 3 * i + c; }
  int vvar(int j, int i, int c) const { return 2 * N * nx + (j - 1) * nx + 3 * i + c; }
  int svar(int j, int i, int c) const { return 3 * N * nx + (j - 1) * nx + 3 * i + c; }
  int erow(int j, int i, int c) const { return (j - 1) * nx + 3 * i + c; }

  void build(const Topology& topology, const NetworkParams& p, const MpcConfig& config,
             bool soft) {
    config.validate();
    topo = &topology;
    params = p;
    cfg = config;
    soften = soft;
    N = cfg.horizon;
    me_dyn = N * nx;
    const int n = (soften ? 4 : 2) * N * nx;
    const int me = soften ? 2 * me_dyn : me_dyn;

    for (int i = 0; i < kAreaCount; ++i) {
      const AreaParams& ap = params.areas[static_cast<std::size_t>(i)];
      gain[static_cast<std::size_t>(i)] = params.tau * ap.k_p / ap.t_p;
      double s = 0.0;
      for (const Topology::Neighbor& nb : topo->neighbors(i)) s += nb.coeff;
      coeff_sum[static_cast<std::size_t>(i)] = s;
    }

    qp.n = n;
    qp.linear.assign(static_cast<std::size_t>(n), 0.0);
    qp.lb.assign(static_cast<std::size_t>(n), -kInf);
    qp.ub.assign(static_cast<std::size_t>(n), kInf);

    std::vector<Triplet> h_trips;
    h_trips.reserve(static_cast<std::size_t>(3 * N * nx));
    for (int j = 1; j <= N; ++j) {
      for (int i = 0; i < kAreaCount; ++i) {
        for (int c = 0; c < 3; ++c) {
          h_trips.push_back({xvar(j, i, c), xvar(j, i, c),
                             2.0 * cfg.state_weights[static_cast<std::size_t>(c)]});
          h_trips.push_back({uvar(j - 1, i, c), uvar(j - 1, i, c),
                             2.0 * cfg.input_weights[static_cast<std::size_t>(c)]});
          if (soften) {
            h_trips.push_back({svar(j, i, c), svar(j, i, c), 2.0 * kSoftWeight});
          }
        }
      }
    }
    qp.hessian = CscMatrix::from_triplets(n, n, h_trips);

    const double tau = params.tau;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Triplet> a_trips;
    a_trips.reserve(static_cast<std::size_t>(N * (nx + 240 + 130) + (soften ? 3 * N * nx : 0)));
    for (int j = 1; j <= N; ++j) {
      for (int t = 0; t < nx; ++t) {
        a_trips.push_back({(j - 1) * nx + t, (j - 1) * nx + t, 1.0});
      }
      for (int i = 0; i < kAreaCount; ++i) {
        const AreaParams& ap = params.areas[static_cast<std::size_t>(i)];
        const double g = gain[static_cast<std::size_t>(i)];
        if (j >= 2) {
          a_trips.push_back({erow(j, i, 0), xvar(j - 1, i, 0), -1.0});
          a_trips.push_back({erow(j, i, 0), xvar(j - 1, i, 1), -tau * two_pi});
          a_trips.push_back({erow(j, i, 1), xvar(j - 1, i, 1), -(1.0 - tau / ap.t_p)});
          a_trips.push_back({erow(j, i, 1), xvar(j - 1, i, 0), g * coeff_sum[static_cast<std::size_t>(i)]});
          for (const Topology::Neighbor& nb : topo->neighbors(i)) {
            a_trips.push_back({erow(j, i, 1), xvar(j - 1, nb.area, 0), -g * nb.coeff});
          }
          a_trips.push_back({erow(j, i, 2), xvar(j - 1, i, 2), -1.0});
        }
        a_trips.push_back({erow(j, i, 1), uvar(j - 1, i, 0), -g});
        a_trips.push_back({erow(j, i, 1), uvar(j - 1, i, 1), g});
        a_trips.push_back({erow(j, i, 1), uvar(j - 1, i, 2), -g});
        a_trips.push_back({erow(j, i, 2), uvar(j - 1, i, 1), -tau * ap.eta_c});
        a_trips.push_back({erow(j, i, 2), uvar(j - 1, i, 2), tau / ap.eta_d});
      }
      if (soften) {
        for (int t = 0; t < nx; ++t) {
          const int rc = me_dyn + (j - 1) * nx + t;
          a_trips.push_back({rc, (j - 1) * nx + t, 1.0});
          a_trips.push_back({rc, 2 * N * nx + (j - 1) * nx + t, -1.0});
          a_trips.push_back({rc, 3 * N * nx + (j - 1) * nx + t, -1.0});
        }
      }
    }
    qp.eq = CscMatrix::from_triplets(me, n, a_trips);
    qp.eq_rhs.assign(static_cast<std::size_t>(me), 0.0);

    for (int i = 0; i < kAreaCount; ++i) {
      const ConstraintSet cs = constraint_set(params.areas[static_cast<std::size_t>(i)]);
      const std::array<Bounds, 3> state_box = {cs.d_delta, cs.d_f, cs.e};
      const std::array<Bounds, 3> input_box = {cs.d_p_disp, cs.p_c, cs.p_d};
      for (int j = 1; j <= N; ++j) {
        for (int c = 0; c < 3; ++c) {
          const int sv = soften ? vvar(j, i, c) : xvar(j, i, c);
          qp.lb[static_cast<std::size_t>(sv)] = state_box[static_cast<std::size_t>(c)].lo;
          qp.ub[static_cast<std::size_t>(sv)] = state_box[static_cast<std::size_t>(c)].hi;
          const int uv = uvar(j - 1, i, c);
          qp.lb[static_cast<std::size_t>(uv)] = input_box[static_cast<std::size_t>(c)].lo;
          qp.ub[static_cast<std::size_t>(uv)] = input_box[static_cast<std::size_t>(c)].hi;
        }
      }
    }
  }

  std::vector<double> rhs(const NetworkState& x, const ExogenousWindow& window) const {
    require_arg(static_cast<int>(window.size()) == N, "mpc: window length != horizon");
    std::vector<double> b(qp.eq_rhs.size(), 0.0);
    std::array<double, kAreaCount> angles{};
    for (int i = 0; i < kAreaCount; ++i) {
      angles[static_cast<std::size_t>(i)] = x.areas[static_cast<std::size_t>(i)].d_delta;
    }
    const std::array<double, kAreaCount> ties = tie_power(angles, *topo);
    const double tau = params.tau;
    for (int i = 0; i < kAreaCount; ++i) {
      const auto ai = static_cast<std::size_t>(i);
      const AreaState& s = x.areas[ai];
      const AreaParams& ap = params.areas[ai];
      b[static_cast<std::size_t>(erow(1, i, 0))] = s.d_delta + tau * 2.0 * std::numbers::pi * s.d_f;
      b[static_cast<std::size_t>(erow(1, i, 1))] = (1.0 - tau / ap.t_p) * s.d_f - gain[ai] * ties[ai];
      b[static_cast<std::size_t>(erow(1, i, 2))] = s.e;
    }
    for (int j = 1; j <= N; ++j) {
      const ExogenousVec& w = window[static_cast<std::size_t>(j - 1)];
      for (int i = 0; i < kAreaCount; ++i) {
        const auto ai = static_cast<std::size_t>(i);
        b[static_cast<std::size_t>(erow(j, i, 1))] +=
            gain[ai] * (-w[ai].d_p_load + w[ai].d_p_ren);
      }
    }
    return b;
  }
};

// The ADMM iterate can sit outside a box by up to the primal tolerance, but an
// applied command must never exceed physical capacity, so extraction projects.
void clamp_input(AreaInput& u, const ConstraintSet& cs) {
  u.d_p_disp = std::clamp(u.d_p_disp, cs.d_p_disp.lo, cs.d_p_disp.hi);
  u.p_c = std::clamp(u.p_c, cs.p_c.lo, cs.p_c.hi);
  u.p_d = std::clamp(u.p_d, cs.p_d.lo, cs.p_d.hi);
}

Plan extract_plan(const QpSolution& sol, int N, const NetworkParams& params) {
  Plan plan;
  plan.inputs.resize(static_cast<std::size_t>(N));
  std::array<ConstraintSet, kAreaCount> boxes;
  for (int i = 0; i < kAreaCount; ++i) {
    boxes[static_cast<std::size_t>(i)] = constraint_set(params.areas[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < N; ++j) {
    const std::size_t off = static_cast<std::size_t>(N + j) * kStateDim;
    NetworkInput& u = plan.inputs[static_cast<std::size_t>(j)];
    u = unflatten_input(std::span<const double>(sol.x.data() + off, kStateDim));
    for (int i = 0; i < kAreaCount; ++i) {
      clamp_input(u[static_cast<std::size_t>(i)], boxes[static_cast<std::size_t>(i)]);
    }
  }
  return plan;
}

// Shifts every stage block one step forward, duplicating the final stage, so
// the previous solution seeds the next observation.
void shift_blocks(std::vector<double>& dst, const std::vector<double>& src, int offset,
                  int blocks, int width) {
  for (int b = 0; b < blocks; ++b) {
    const int from = offset + std::min(b + 1, blocks - 1) * width;
    const int to = offset + b * width;
    std::copy(src.begin() + from, src.begin() + from + width, dst.begin() + to);
  }
}

QpSolution shifted_warm_start(const QpSolution& prev, int N, int width, bool soften) {
  QpSolution w;
  w.x.resize(prev.x.size());
  w.z.resize(prev.z.size());
  w.y.resize(prev.y.size());
  const int segments = soften ? 4 : 2;
  for (int s = 0; s < segments; ++s) {
    shift_blocks(w.x, prev.x, s * N * width, N, width);
    shift_blocks(w.z, prev.z, s * N * width, N, width);
  }
  shift_blocks(w.y, prev.y, 0, N, width);
  if (soften) shift_blocks(w.y, prev.y, N * width, N, width);
  return w;
}

SolverSettings solver_settings(const MpcConfig& cfg) {
  SolverSettings st;
  st.tol_prim = cfg.tol_prim;
  st.tol_dual = cfg.tol_dual;
  st.max_iter = cfg.max_iter;
  return st;
}

}  // namespace

QuadraticProgram build_mpc_qp(const NetworkState& x_k, const ExogenousWindow& window,
                              const Topology& topo, const NetworkParams& params,
                              const MpcConfig& cfg) {
  NetworkTemplate t;
  t.build(topo, params, cfg, false);
  t.qp.eq_rhs = t.rhs(x_k, window);
  return std::move(t.qp);
}

double evaluate_plan(const NetworkState& x_k, const Plan& plan, const ExogenousWindow& window,
                     const Topology& topo, const NetworkParams& params, const MpcConfig& cfg) {
  require_arg(!plan.inputs.empty() && plan.inputs.size() == window.size(),
              "evaluate_plan: plan and window lengths differ");
  NetworkState x = x_k;
  double cost = 0.0;
  for (std::size_t j = 0; j < plan.inputs.size(); ++j) {
    x = step_linear(x, plan.inputs[j], window[j], topo, params);
    for (int i = 0; i < kAreaCount; ++i) {
      const auto ai = static_cast<std::size_t>(i);
      const AreaState& s = x.areas[ai];
      const AreaInput& u = plan.inputs[j][ai];
      cost += cfg.state_weights[0] * s.d_delta * s.d_delta +
              cfg.state_weights[1] * s.d_f * s.d_f + cfg.state_weights[2] * s.e * s.e;
      cost += cfg.input_weights[0] * u.d_p_disp * u.d_p_disp +
              cfg.input_weights[1] * u.p_c * u.p_c + cfg.input_weights[2] * u.p_d * u.p_d;
    }
  }
  return cost;
}

struct CentralizedMpc::Impl {
  ControllerContext ctx;
  NetworkTemplate hard;
  std::unique_ptr<QpSolver> solver;
  std::optional<QpSolution> prev;
  NetworkTemplate soft;
  std::unique_ptr<QpSolver> soft_solver;
  std::optional<QpSolution> soft_prev;
  Plan plan;
  bool has_plan = false;

  explicit Impl(const ControllerContext& c) : ctx(c) {
    require_arg(ctx.topology != nullptr, "centralized: topology is required");
    hard.build(*ctx.topology, ctx.params, ctx.config, false);
    solver = std::make_unique<QpSolver>(hard.qp, solver_settings(ctx.config));
  }

  NetworkInput observe(const NetworkState& state, const ExogenousWindow& window,
                       StepDiagnostics& diag) {
    const auto t0 = std::chrono::steady_clock::now();
    const int N = hard.N;
    const std::vector<double> b = hard.rhs(state, window);
    solver->update_eq_rhs(b);
    const QpSolution& sol = (ctx.config.warm_start && prev.has_value())
                                ? solver->solve(shifted_warm_start(*prev, N, kStateDim, false))
                                : solver->solve();
    diag.iterations = sol.iterations;
    diag.status = sol.status;
    diag.softened = false;
    if (sol.status == QpStatus::optimal) {
      prev = sol;
      plan = extract_plan(sol, N, ctx.params);
      has_plan = true;
      diag.open_loop_cost = sol.objective;
      diag.wall_ms = elapsed_ms(t0);
      return plan.inputs[0];
    }

    // State boxes move to slack-penalized mirrors; dynamics and input boxes
    // stay hard.
    if (!soft_solver) {
      soft.build(*ctx.topology, ctx.params, ctx.config, true);
      soft_solver = std::make_unique<QpSolver>(soft.qp, solver_settings(ctx.config));
    }
    const std::vector<double> sb = soft.rhs(state, window);
    soft_solver->update_eq_rhs(sb);
    const QpSolution& ssol = (ctx.config.warm_start && soft_prev.has_value())
                                 ? soft_solver->solve(shifted_warm_start(*soft_prev, N, kStateDim, true))
                                 : soft_solver->solve();
    if (ssol.status != QpStatus::infeasible) soft_prev = ssol;
    plan = extract_plan(ssol, N, ctx.params);
    has_plan = true;
    diag.softened = true;
    diag.status = ssol.status;
    diag.iterations += ssol.iterations;
    diag.open_loop_cost =
        evaluate_plan(state, plan, window, *ctx.topology, ctx.params, ctx.config);
    diag.wall_ms = elapsed_ms(t0);
    return plan.inputs[0];
  }
};

CentralizedMpc::CentralizedMpc(const ControllerContext& ctx)
    : impl_(std::make_unique<Impl>(ctx)) {}
CentralizedMpc::~CentralizedMpc() = default;

int CentralizedMpc::horizon() const { return impl_->ctx.config.horizon; }

NetworkInput CentralizedMpc::observe(int, const NetworkState& state,
                                     const ExogenousWindow& window, StepDiagnostics& diag) {
  return impl_->observe(state, window, diag);
}

const Plan* CentralizedMpc::last_plan() const {
  return impl_->has_plan ? &impl_->plan : nullptr;
}

namespace {

// Single-area program with the tie-line power frozen at its measured value:
// variables [x_a(1..N); u_a(0..N-1)], three equality rows per stage.
struct AreaTemplate {
  int N = 0;
  AreaParams ap;
  MpcConfig cfg;
  double gain = 0.0;
  double tau = 0.0;
  QuadraticProgram qp;

  int xvar(int j, int c) const { return (j - 1) * 3 + c; }
  int uvar(int j, int c) const { return N * 3 + j * 3 + c; }

  void build(const AreaParams& area_params, const NetworkParams& net, const MpcConfig& config) {
    config.validate();
    ap = area_params;
    cfg = config;
    N = cfg.horizon;
    tau = net.tau;
    gain = tau * ap.k_p / ap.t_p;
    const int n = 6 * N;
    const int me = 3 * N;

    qp.n = n;
    qp.linear.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<Triplet> h_trips;
    for (int j = 1; j <= N; ++j) {
      for (int c = 0; c < 3; ++c) {
        h_trips.push_back({xvar(j, c), xvar(j, c), 2.0 * cfg.state_weights[static_cast<std::size_t>(c)]});
        h_trips.push_back({uvar(j - 1, c), uvar(j - 1, c), 2.0 * cfg.input_weights[static_cast<std::size_t>(c)]});
      }
    }
    qp.hessian = CscMatrix::from_triplets(n, n, h_trips);

    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Triplet> a_trips;
    for (int j = 1; j <= N; ++j) {
      const int r = (j - 1) * 3;
      for (int c = 0; c < 3; ++c) a_trips.push_back({r + c, xvar(j, c), 1.0});
      if (j >= 2) {
        a_trips.push_back({r + 0, xvar(j - 1, 0), -1.0});
        a_trips.push_back({r + 0, xvar(j - 1, 1), -tau * two_pi});
        a_trips.push_back({r + 1, xvar(j - 1, 1), -(1.0 - tau / ap.t_p)});
        a_trips.push_back({r + 2, xvar(j - 1, 2), -1.0});
      }
      a_trips.push_back({r + 1, uvar(j - 1, 0), -gain});
      a_trips.push_back({r + 1, uvar(j - 1, 1), gain});
      a_trips.push_back({r + 1, uvar(j - 1, 2), -gain});
      a_trips.push_back({r + 2, uvar(j - 1, 1), -tau * ap.eta_c});
      a_trips.push_back({r + 2, uvar(j - 1, 2), tau / ap.eta_d});
    }
    qp.eq = CscMatrix::from_triplets(me, n, a_trips);
    qp.eq_rhs.assign(static_cast<std::size_t>(me), 0.0);

    const ConstraintSet cs = constraint_set(ap);
    const std::array<Bounds, 3> state_box = {cs.d_delta, cs.d_f, cs.e};
    const std::array<Bounds, 3> input_box = {cs.d_p_disp, cs.p_c, cs.p_d};
    qp.lb.assign(static_cast<std::size_t>(n), 0.0);
    qp.ub.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 1; j <= N; ++j) {
      for (int c = 0; c < 3; ++c) {
        qp.lb[static_cast<std::size_t>(xvar(j, c))] = state_box[static_cast<std::size_t>(c)].lo;
        qp.ub[static_cast<std::size_t>(xvar(j, c))] = state_box[static_cast<std::size_t>(c)].hi;
        qp.lb[static_cast<std::size_t>(uvar(j - 1, c))] = input_box[static_cast<std::size_t>(c)].lo;
        qp.ub[static_cast<std::size_t>(uvar(j - 1, c))] = input_box[static_cast<std::size_t>(c)].hi;
      }
    }
  }

  std::vector<double> rhs(const AreaState& x, double tie, int area,
                          const ExogenousWindow& window) const {
    require_arg(static_cast<int>(window.size()) == N, "mpc: window length != horizon");
    std::vector<double> b(static_cast<std::size_t>(3 * N), 0.0);
    b[0] = x.d_delta + tau * 2.0 * std::numbers::pi * x.d_f;
    b[1] = (1.0 - tau / ap.t_p) * x.d_f;
    b[2] = x.e;
    for (int j = 1; j <= N; ++j) {
      const AreaExogenous& w = window[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(area)];
      b[static_cast<std::size_t>((j - 1) * 3 + 1)] += gain * (-w.d_p_load + w.d_p_ren - tie);
    }
    return b;
  }
};

QpStatus worse_status(QpStatus a, QpStatus b) {
  const auto rank = [](QpStatus s) {
    switch (s) {
      case QpStatus::optimal: return 0;
      case QpStatus::max_iter: return 1;
      case QpStatus::infeasible: return 2;
    }
    return 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

struct DecentralizedMpc::Impl {
  ControllerContext ctx;
  std::array<AreaTemplate, kAreaCount> tmpl;
  std::array<std::unique_ptr<QpSolver>, kAreaCount> solvers;
  std::array<std::optional<QpSolution>, kAreaCount> prev;
  std::array<QpSolution, kAreaCount> local;
  Plan plan;
  bool has_plan = false;

  explicit Impl(const ControllerContext& c) : ctx(c) {
    require_arg(ctx.topology != nullptr, "decentralized: topology is required");
    for (int a = 0; a < kAreaCount; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      tmpl[ai].build(ctx.params.areas[ai], ctx.params, ctx.config);
      solvers[ai] = std::make_unique<QpSolver>(tmpl[ai].qp, solver_settings(ctx.config));
    }
  }

  void solve_area(int a, const NetworkState& state, double tie, const ExogenousWindow& window) {
    const auto ai = static_cast<std::size_t>(a);
    const std::vector<double> b = tmpl[ai].rhs(state.areas[ai], tie, a, window);
    solvers[ai]->update_eq_rhs(b);
    const QpSolution& sol =
        (ctx.config.warm_start && prev[ai].has_value())
            ? solvers[ai]->solve(shifted_warm_start(*prev[ai], tmpl[ai].N, 3, false))
            : solvers[ai]->solve();
    local[ai] = sol;
    if (sol.status != QpStatus::infeasible) prev[ai] = sol;
  }

  NetworkInput observe(const NetworkState& state, const ExogenousWindow& window,
                       StepDiagnostics& diag) {
    const auto t0 = std::chrono::steady_clock::now();
    const int N = ctx.config.horizon;
    std::array<double, kAreaCount> angles{};
    for (int i = 0; i < kAreaCount; ++i) {
      angles[static_cast<std::size_t>(i)] = state.areas[static_cast<std::size_t>(i)].d_delta;
    }
    const std::array<double, kAreaCount> ties = tie_power(angles, *ctx.topology);

    const int threads = std::clamp(ctx.config.threads, 1, kAreaCount);
    if (threads == 1) {
      for (int a = 0; a < kAreaCount; ++a) solve_area(a, state, ties[static_cast<std::size_t>(a)], window);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          for (int a = t; a < kAreaCount; a += threads) {
            solve_area(a, state, ties[static_cast<std::size_t>(a)], window);
          }
        });
      }
      for (std::thread& th : pool) th.join();
    }

    plan.inputs.assign(static_cast<std::size_t>(N), NetworkInput{});
    diag.open_loop_cost = 0.0;
    diag.iterations = 0;
    diag.status = QpStatus::optimal;
    diag.softened = false;
    for (int a = 0; a < kAreaCount; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      const QpSolution& sol = local[ai];
      diag.status = worse_status(diag.status, sol.status);
      diag.iterations = std::max(diag.iterations, sol.iterations);
      if (sol.status == QpStatus::infeasible) continue;  // zero input for the area
      diag.open_loop_cost += sol.objective;
      const ConstraintSet cs = constraint_set(tmpl[ai].ap);
      for (int j = 0; j < N; ++j) {
        AreaInput& u = plan.inputs[static_cast<std::size_t>(j)][ai];
        u.d_p_disp = sol.x[static_cast<std::size_t>(tmpl[ai].uvar(j, 0))];
        u.p_c = sol.x[static_cast<std::size_t>(tmpl[ai].uvar(j, 1))];
        u.p_d = sol.x[static_cast<std::size_t>(tmpl[ai].uvar(j, 2))];
        clamp_input(u, cs);
      }
    }
    has_plan = true;
    diag.wall_ms = elapsed_ms(t0);
    return plan.inputs[0];
  }
};

DecentralizedMpc::DecentralizedMpc(const ControllerContext& ctx)
    : impl_(std::make_unique<Impl>(ctx)) {}
DecentralizedMpc::~DecentralizedMpc() = default;

int DecentralizedMpc::horizon() const { return impl_->ctx.config.horizon; }

NetworkInput DecentralizedMpc::observe(int, const NetworkState& state,
                                       const ExogenousWindow& window, StepDiagnostics& diag) {
  return impl_->observe(state, window, diag);
}

const Plan* DecentralizedMpc::last_plan() const {
  return impl_->has_plan ? &impl_->plan : nullptr;
}

namespace {

std::map<std::string, ControllerFactory>& controller_map() {
  static std::map<std::string, ControllerFactory> m;
  return m;
}

std::once_flag builtin_flag;

void ensure_builtins() {
  std::call_once(builtin_flag, [] {
    controller_map()["centralized"] = [](const ControllerContext& ctx) {
      return std::make_unique<CentralizedMpc>(ctx);
    };
    controller_map()["decentralized"] = [](const ControllerContext& ctx) {
      return std::make_unique<DecentralizedMpc>(ctx);
    };
    controller_map()["zero"] = [](const ControllerContext&) {
      return std::make_unique<ZeroController>();
    };
  });
}

}  // namespace

void register_controller(const std::string& name, ControllerFactory factory) {
  require_arg(!name.empty(), "controller name must not be empty");
  require_arg(static_cast<bool>(factory), "controller factory must not be empty");
  ensure_builtins();
  controller_map()[name] = std::move(factory);
}

std::vector<std::string> registered_controllers() {
  ensure_builtins();
  std::vector<std::string> names;
  names.reserve(controller_map().size());
  for (const auto& [name, factory] : controller_map()) names.push_back(name);
  return names;
}

std::unique_ptr<Controller> make_controller(std::string_view name, const ControllerContext& ctx) {
  ensure_builtins();
  const auto it = controller_map().find(std::string(name));
  if (it == controller_map().end()) {
    std::string msg = "unknown controller '" + std::string(name) + "'; registered:";
    for (const std::string& n : registered_controllers()) msg += " " + n;
    throw UnknownControllerError(msg);
  }
  return it->second(ctx);
}

}  // namespace lfc
