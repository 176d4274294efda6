#include "lfc/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lfc {

namespace {

void require_finite(const NetworkState& state, const NetworkInput& input,
                    const ExogenousVec& exo) {
  for (int i = 0; i < kAreaCount; ++i) {
    const AreaState& s = state.areas[i];
    const AreaInput& u = input[i];
    const AreaExogenous& w = exo[i];
    if (!std::isfinite(s.d_delta) || !std::isfinite(s.d_f) || !std::isfinite(s.e) ||
        !std::isfinite(u.d_p_disp) || !std::isfinite(u.p_c) || !std::isfinite(u.p_d) ||
        !std::isfinite(w.d_p_load) || !std::isfinite(w.d_p_ren)) {
      throw std::invalid_argument("non-finite value in dynamics step");
    }
  }
}

std::array<double, kAreaCount> angles_of(const NetworkState& state) {
  std::array<double, kAreaCount> a{};
  for (int i = 0; i < kAreaCount; ++i) a[i] = state.areas[i].d_delta;
  return a;
}

// The three baseline rows for one area, given its tie power at time k.
AreaState base_rows(const AreaState& s, double d_p_disp, double p_c, double p_d,
                    const AreaExogenous& w, double p_tie, const AreaParams& p, double tau) {
  AreaState next;
  next.d_delta = s.d_delta + tau * 2.0 * std::numbers::pi * s.d_f;
  next.d_f = (1.0 - tau / p.t_p) * s.d_f +
             tau * (p.k_p / p.t_p) *
                 (d_p_disp - w.d_p_load + w.d_p_ren - p_tie - p_c + p_d);
  next.e = s.e + tau * (p.eta_c * p_c - p_d / p.eta_d);
  return next;
}

}  // namespace

NetworkState step_linear(const NetworkState& state, const NetworkInput& input,
                         const ExogenousVec& exo, const Topology& topo,
                         const NetworkParams& params) {
  require_finite(state, input, exo);
  const auto angles = angles_of(state);
  const auto ties = tie_power(angles, topo);
  NetworkState next;
  for (int i = 0; i < kAreaCount; ++i) {
    next.areas[i] = base_rows(state.areas[i], input[i].d_p_disp, input[i].p_c, input[i].p_d,
                              exo[i], ties[i], params.areas[i], params.tau);
  }
  return next;
}

double step_pwa_ess(double e, double p_ess, const AreaParams& params, double tau) {
  if (!std::isfinite(e) || !std::isfinite(p_ess))
    throw std::invalid_argument("non-finite value in storage step");
  if (p_ess >= 0.0) return e + tau * params.eta_c * p_ess;
  return e + tau * p_ess / params.eta_d;
}

NetworkState step_turbine(const NetworkState& state, const NetworkInput& commands,
                          const ExogenousVec& exo, const Topology& topo,
                          const NetworkParams& params, const TurbineParams& turbine) {
  if (params.tau > 0.025)
    throw std::invalid_argument("turbine model requires tau <= 0.025 s");
  if (!state.turbine.has_value())
    throw std::invalid_argument("turbine model requires turbine states");
  require_finite(state, commands, exo);

  const auto angles = angles_of(state);
  const auto ties = tie_power(angles, topo);
  const double tau = params.tau;

  NetworkState next;
  next.turbine.emplace();
  for (int i = 0; i < kAreaCount; ++i) {
    const TurbineState& t = (*state.turbine)[i];
    // Baseline rows advance on the current turbine states.
    next.areas[i] = base_rows(state.areas[i], t.d_p_disp, t.p_c, t.p_d, exo[i], ties[i],
                              params.areas[i], tau);
    TurbineState& tn = (*next.turbine)[i];
    tn.d_p_disp = (1.0 - tau / turbine.t_t) * t.d_p_disp +
                  tau * (turbine.k_t / turbine.t_t) * commands[i].d_p_disp;
    tn.p_c = (1.0 - tau / turbine.t_c) * t.p_c + tau * (turbine.k_c / turbine.t_c) * commands[i].p_c;
    tn.p_d = (1.0 - tau / turbine.t_d) * t.p_d + tau * (turbine.k_d / turbine.t_d) * commands[i].p_d;
  }
  return next;
}

NetworkState step_augmented(const NetworkState& state, const NetworkInput& input,
                            const ExogenousVec& exo, const Topology& topo,
                            const NetworkParams& params) {
  if (!state.augmented.has_value())
    throw std::invalid_argument("augmented model requires augmented states");
  require_finite(state, input, exo);

  const auto angles = angles_of(state);
  const auto ties = tie_power(angles, topo);
  NetworkState next;
  next.augmented.emplace();
  for (int i = 0; i < kAreaCount; ++i) {
    next.areas[i] = base_rows(state.areas[i], input[i].d_p_disp, input[i].p_c, input[i].p_d,
                              exo[i], ties[i], params.areas[i], params.tau);
    const AugmentedState& a = (*state.augmented)[i];
    (*next.augmented)[i].p_disp = a.p_disp + params.tau * input[i].d_p_disp;
    (*next.augmented)[i].p_tie = a.p_tie + params.tau * ties[i];
  }
  return next;
}

double initial_dispatch(double load0, double ren0) {
  if (!std::isfinite(load0) || !std::isfinite(ren0))
    throw std::invalid_argument("non-finite value in initial dispatch");
  return std::max(0.0, load0 - ren0);
}

std::array<double, kStateDim> flatten(const NetworkState& state) {
  std::array<double, kStateDim> x{};
  for (int i = 0; i < kAreaCount; ++i) {
    x[3 * i] = state.areas[i].d_delta;
    x[3 * i + 1] = state.areas[i].d_f;
    x[3 * i + 2] = state.areas[i].e;
  }
  return x;
}

NetworkState unflatten_state(std::span<const double> x) {
  if (x.size() != static_cast<size_t>(kStateDim))
    throw std::invalid_argument("state vector must have 78 entries");
  NetworkState s;
  for (int i = 0; i < kAreaCount; ++i) {
    s.areas[i].d_delta = x[3 * i];
    s.areas[i].d_f = x[3 * i + 1];
    s.areas[i].e = x[3 * i + 2];
  }
  return s;
}

std::array<double, kInputDim> flatten(const NetworkInput& input) {
  std::array<double, kInputDim> u{};
  for (int i = 0; i < kAreaCount; ++i) {
    u[3 * i] = input[i].d_p_disp;
    u[3 * i + 1] = input[i].p_c;
    u[3 * i + 2] = input[i].p_d;
  }
  return u;
}

NetworkInput unflatten_input(std::span<const double> u) {
  if (u.size() != static_cast<size_t>(kInputDim))
    throw std::invalid_argument("input vector must have 78 entries");
  NetworkInput in;
  for (int i = 0; i < kAreaCount; ++i) {
    in[i].d_p_disp = u[3 * i];
    in[i].p_c = u[3 * i + 1];
    in[i].p_d = u[3 * i + 2];
  }
  return in;
}

}  // namespace lfc
