#pragma once
// Discrete-time state updates: the baseline linear network model, the
// piecewise-affine storage variant, the turbine/pump extension, and the
// augmented total-production states. All step functions are pure.

#include <array>
#include <span>

#include "lfc/model.hpp"
#include "lfc/topology.hpp"

namespace lfc {

/// Turbine / charge-pump / discharge-pump lags. Time constants sit at the
/// largest values the reduced sampling time admits (T = 2.5 s, K = 1).
struct TurbineParams {
  double t_t = 2.5;
  double t_c = 2.5;
  double t_d = 2.5;
  double k_t = 1.0;
  double k_c = 1.0;
  double k_d = 1.0;
};

/// One step of the baseline model. Per area:
///   d_delta+ = d_delta + tau*2*pi*d_f
///   d_f+     = (1 - tau/T_p)*d_f
///              + tau*(K_p/T_p)*(d_p_disp - d_p_load + d_p_ren - p_tie - p_c + p_d)
///   e+       = e + tau*(eta_c*p_c - p_d/eta_d)
/// with p_tie from tie_power on the pre-step angles. Rejects non-finite
/// inputs.
NetworkState step_linear(const NetworkState& state, const NetworkInput& input,
                         const ExogenousVec& exo, const Topology& topo,
                         const NetworkParams& params);

/// Piecewise-affine storage update with a single signed power:
///   e+ = e + tau*eta_c*p_ess        if p_ess >= 0
///   e+ = e + tau*(1/eta_d)*p_ess    if p_ess <  0
/// Both pieces agree at p_ess = 0.
double step_pwa_ess(double e, double p_ess, const AreaParams& params, double tau);

/// One step of the turbine-extended model: the baseline inputs are states
/// driven by first-order lags, the commands u drive the lags. Requires
/// tau <= 0.025 s.
NetworkState step_turbine(const NetworkState& state, const NetworkInput& commands,
                          const ExogenousVec& exo, const Topology& topo,
                          const NetworkParams& params, const TurbineParams& turbine);

/// One step of the augmented model: baseline rows plus
///   p_disp+ = p_disp + tau*d_p_disp,  p_tie+ = p_tie + tau*tie_power_i.
/// Requires state.augmented to be present.
NetworkState step_augmented(const NetworkState& state, const NetworkInput& input,
                            const ExogenousVec& exo, const Topology& topo,
                            const NetworkParams& params);

/// Scheduled dispatch at the start of a run: max(0, load0 - ren0) [GW].
double initial_dispatch(double load0, double ren0);

// Flat-vector views of the baseline model, ordered per area as
// [d_delta, d_f, e] / [d_p_disp, p_c, p_d] / [d_p_load, d_p_ren].
inline constexpr int kStateDim = 3 * kAreaCount;
inline constexpr int kInputDim = 3 * kAreaCount;
inline constexpr int kExoDim = 2 * kAreaCount;

std::array<double, kStateDim> flatten(const NetworkState& state);
NetworkState unflatten_state(std::span<const double> x);
std::array<double, kInputDim> flatten(const NetworkInput& input);
NetworkInput unflatten_input(std::span<const double> u);

}  // namespace lfc
