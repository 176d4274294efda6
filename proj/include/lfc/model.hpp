#pragma once
// Core domain types for the 26-area European load-frequency benchmark:
// physical parameters, per-area state/input/exogenous vectors, and the
// operating boxes every controller is judged against.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lfc {

inline constexpr int kAreaCount = 26;

/// ISO 3166-1 alpha-2 codes of the modeled areas, in canonical index order.
inline constexpr std::array<std::string_view, kAreaCount> kIsoCodes = {
    "AT", "BE", "BG", "HR", "CZ", "DK", "EE", "FI", "FR", "DE", "GR", "HU", "IE",
    "IT", "LV", "LT", "NL", "NO", "PL", "PT", "RO", "SK", "SI", "ES", "SE", "CH"};

/// Index of an ISO code in kIsoCodes, or nullopt if unknown.
std::optional<int> area_index(std::string_view iso);

/// Per-area physical constants. Storage is sized to one hour of full
/// dispatch, so e_max numerically equals p_disp_max.
struct AreaParams {
  double t_p = 25.0;        // rotating-mass time constant [s]
  double k_p = 0.05;        // rotating-mass gain [Hz/GW]
  double eta_c = 0.9;       // charge efficiency
  double eta_d = 1.1;       // discharge efficiency
  double p_disp_max = 0.0;  // dispatchable capacity [GW]
  double e_max = 0.0;       // storage capacity [GWh], kept equal to p_disp_max

  /// Sets p_disp_max and e_max together. Rejects negative capacity.
  void set_capacity(double cap);
};

struct NetworkParams {
  double tau = 2.5;            // sampling time [s]
  double delta0 = 30.0;        // angle operating point [deg]
  double f0 = 50.0;            // frequency operating point [Hz]
  int steps_per_hour = 1440;   // exogenous data rate: one hour = 1440 steps
  std::array<AreaParams, kAreaCount> areas{};
};

/// Benchmark parameter set: tau = 2.5 s, T_p = 25 s, K_p = 0.05 Hz/GW,
/// eta_c = 0.9, eta_d = 1.1 for every area. Capacities stay 0 until a
/// scenario supplies them.
NetworkParams default_params();

struct AreaState {
  double d_delta = 0.0;  // machine angle deviation [deg]
  double d_f = 0.0;      // frequency deviation [Hz]
  double e = 0.0;        // stored energy [GWh]
};

struct AreaInput {
  double d_p_disp = 0.0;  // dispatch deviation [GW]
  double p_c = 0.0;       // ESS charge power [GW], >= 0
  double p_d = 0.0;       // ESS discharge power [GW], >= 0
};

struct AreaExogenous {
  double d_p_load = 0.0;  // load deviation [GW]
  double d_p_ren = 0.0;   // renewable deviation [GW]
};

/// Extra per-area states tracked in the augmented model variant.
struct AugmentedState {
  double p_disp = 0.0;  // total dispatchable production [GW]
  double p_tie = 0.0;   // integrated tie-line deviation [GW]
};

/// Turbine-mode per-area states: the baseline inputs promoted to states.
struct TurbineState {
  double d_p_disp = 0.0;
  double p_c = 0.0;
  double p_d = 0.0;
};

struct NetworkState {
  std::array<AreaState, kAreaCount> areas{};
  // Present iff the corresponding model variant is selected.
  std::optional<std::array<AugmentedState, kAreaCount>> augmented;
  std::optional<std::array<TurbineState, kAreaCount>> turbine;
};

using NetworkInput = std::array<AreaInput, kAreaCount>;
using ExogenousVec = std::array<AreaExogenous, kAreaCount>;

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Operating boxes for one area. Input bounds carry the one-hour allocation
/// rule: |d_p_disp| and the ESS powers are limited to p_disp_max / 1440.
struct ConstraintSet {
  Bounds d_delta{-30.0, 30.0};
  Bounds d_f{-0.04, 0.04};
  Bounds e{0.0, 0.0};
  Bounds d_p_disp{0.0, 0.0};
  Bounds p_c{0.0, 0.0};
  Bounds p_d{0.0, 0.0};
};

ConstraintSet constraint_set(const AreaParams& params);

/// Plant variants the run engine can step.
enum class ModelVariant { linear, pwa_ess, turbine, augmented };
std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> variant_from_string(std::string_view s);

enum class Quantity : std::uint8_t { d_delta, d_f, e, d_p_disp, p_c, p_d, p_disp_total };
enum class Side : std::uint8_t { lower, upper };

std::string_view quantity_name(Quantity q);

struct Violation {
  int area = 0;
  Quantity quantity = Quantity::d_delta;
  Side side = Side::lower;
  double amount = 0.0;  // positive distance outside the box
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool empty() const { return violations.empty(); }
};

/// Checks every scalar of (state, input) against its closed box. States are
/// never clamped; out-of-box values are reported so controller comparisons
/// can observe them.
ViolationReport check_violations(const NetworkState& state, const NetworkInput& input,
                                 const std::array<ConstraintSet, kAreaCount>& sets);

}  // namespace lfc
