#pragma once
// Scenario data: per-area hourly day-ahead series (load and renewables,
// measured and forecast), capacity, CSV persistence with strict schema
// checks, missing-value repair, per-step interpolation, and a deterministic
// synthetic generator.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lfc/model.hpp"

namespace lfc {

inline constexpr int kHoursPerDay = 24;

enum class SeriesKind { load_meas, load_for, ren_meas, ren_for };
inline constexpr std::array<SeriesKind, 4> kSeriesKinds = {
    SeriesKind::load_meas, SeriesKind::load_for, SeriesKind::ren_meas, SeriesKind::ren_for};

std::string_view to_string(SeriesKind kind);
std::optional<SeriesKind> series_kind_from_string(std::string_view s);

/// One day of hourly values in GW; NaN marks a missing entry.
struct HourlySeries {
  std::array<double, kHoursPerDay> values{};
  bool has_missing() const;
  int missing_count() const;
};

struct AreaScenario {
  double p_disp_max = 0.0;  // GW; storage capacity in GWh shares the number
  std::array<HourlySeries, 4> series{};
  HourlySeries& at(SeriesKind kind) { return series[static_cast<std::size_t>(kind)]; }
  const HourlySeries& at(SeriesKind kind) const { return series[static_cast<std::size_t>(kind)]; }
};

struct Scenario {
  std::array<AreaScenario, kAreaCount> areas{};
  std::string provenance;
  bool has_missing() const;
};

/// Data-file problem: malformed header, unknown area or kind, missing or
/// duplicated rows, bad numeric cells, inconsistent capacity. `line` is the
/// 1-based file line when known, 0 otherwise.
struct SchemaError : std::runtime_error {
  int line = 0;
  explicit SchemaError(const std::string& msg, int line_no = 0)
      : std::runtime_error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

/// Fill gaps by linear interpolation between the nearest present hours;
/// leading/trailing gaps copy the nearest present value. Present entries are
/// never altered. Throws SchemaError when fewer than 2 entries are present.
HourlySeries repair_missing(const HourlySeries& s);
Scenario repair_scenario(const Scenario& sc);

/// Per-step signals on the control grid: deviations from each series' own
/// hour-1 value, plus the absolute hour-1 measured levels.
struct StepSignals {
  int steps = 0;  // 24 * steps_per_hour
  std::array<std::vector<double>, kAreaCount> d_load_meas, d_load_for, d_ren_meas, d_ren_for;
  std::array<double, kAreaCount> load0{}, ren0{};
};

/// Piecewise-linear interpolation between hourly values. Step k sits at
/// position k/steps_per_hour within the day, step 0 on hour 1; steps beyond
/// hour 24 hold the hour-24 value. Requires a fully repaired scenario.
StepSignals interpolate_to_steps(const Scenario& sc, int steps_per_hour);

void write_step_signals_csv(const StepSignals& sig, const std::string& path);

enum class ScenarioProfile { calm, volatile_day };
std::string_view to_string(ScenarioProfile profile);
std::optional<ScenarioProfile> profile_from_string(std::string_view s);

/// Deterministic in (seed, profile). Calm keeps forecast error within 3%,
/// volatile allows 30%; capacities are sized so the tracking demand stays
/// well inside the per-step input boxes.
Scenario synthetic_scenario(std::uint64_t seed, ScenarioProfile profile);

}  // namespace lfc
