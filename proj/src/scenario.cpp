#include "lfc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "lfc/fileio.hpp"

namespace lfc {

namespace {

constexpr const char* kHeader =
    "iso,kind,p_disp_max,h01,h02,h03,h04,h05,h06,h07,h08,h09,h10,h11,h12,h13,h14,h15,h16,h17,"
    "h18,h19,h20,h21,h22,h23,h24";

double parse_number(const std::string& cell, int line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw SchemaError(std::string("bad ") + what + " value '" + cell + "'", line_no);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::load_meas: return "load_meas";
    case SeriesKind::load_for: return "load_for";
    case SeriesKind::ren_meas: return "ren_meas";
    case SeriesKind::ren_for: return "ren_for";
  }
  return "unknown";
}

std::optional<SeriesKind> series_kind_from_string(std::string_view s) {
  for (SeriesKind k : kSeriesKinds) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

bool HourlySeries::has_missing() const { return missing_count() > 0; }

int HourlySeries::missing_count() const {
  int n = 0;
  for (double v : values) {
    if (std::isnan(v)) ++n;
  }
  return n;
}

bool Scenario::has_missing() const {
  for (const AreaScenario& a : areas) {
    for (const HourlySeries& s : a.series) {
      if (s.has_missing()) return true;
    }
  }
  return false;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file " + path);

  Scenario sc;
  std::array<std::array<bool, 4>, kAreaCount> seen{};
  std::array<bool, kAreaCount> cap_set{};

  std::string line;
  int line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view tag = "# provenance: ";
      if (line.rfind(tag, 0) == 0) sc.provenance = line.substr(tag.size());
      continue;
    }
    if (!header_done) {
      if (line != kHeader) {
        throw SchemaError("malformed header, expected '" + std::string(kHeader) + "'", line_no);
      }
      header_done = true;
      continue;
    }

    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3 + kHoursPerDay) {
      throw SchemaError("expected " + std::to_string(3 + kHoursPerDay) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no);
    }
    const std::optional<int> area = area_index(fields[0]);
    if (!area) throw SchemaError("unknown area code '" + fields[0] + "'", line_no);
    const std::optional<SeriesKind> kind = series_kind_from_string(fields[1]);
    if (!kind) throw SchemaError("unknown series kind '" + fields[1] + "'", line_no);
    const auto ki = static_cast<std::size_t>(*kind);
    if (seen[static_cast<std::size_t>(*area)][ki]) {
      throw SchemaError("duplicate row for " + fields[0] + " " + fields[1], line_no);
    }
    seen[static_cast<std::size_t>(*area)][ki] = true;

    const double cap = parse_number(fields[2], line_no, "capacity");
    if (cap < 0.0) throw SchemaError("negative capacity for " + fields[0], line_no);
    AreaScenario& dst = sc.areas[static_cast<std::size_t>(*area)];
    if (cap_set[static_cast<std::size_t>(*area)]) {
      if (dst.p_disp_max != cap) {
        throw SchemaError("capacity mismatch for " + fields[0], line_no);
      }
    } else {
      dst.p_disp_max = cap;
      cap_set[static_cast<std::size_t>(*area)] = true;
    }

    HourlySeries& series = dst.at(*kind);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const std::string& cell = fields[static_cast<std::size_t>(3 + h)];
      if (cell.empty()) {
        series.values[static_cast<std::size_t>(h)] = std::nan("");
        continue;
      }
      const double v = parse_number(cell, line_no, "series");
      if (v < 0.0) throw SchemaError("negative value in " + fields[0] + " " + fields[1], line_no);
      series.values[static_cast<std::size_t>(h)] = v;
    }
  }
  if (!header_done) throw SchemaError("empty scenario file " + path);

  std::string missing;
  for (int a = 0; a < kAreaCount; ++a) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (!seen[static_cast<std::size_t>(a)][k]) {
        if (!missing.empty()) missing += ", ";
        missing += std::string(kIsoCodes[static_cast<std::size_t>(a)]) + " " +
                   std::string(to_string(kSeriesKinds[k]));
      }
    }
  }
  if (!missing.empty()) throw SchemaError("missing series: " + missing);
  return sc;
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::string out;
  out.reserve(64 * 1024);
  if (!sc.provenance.empty()) {
    out += "# provenance: ";
    out += sc.provenance;
    out += '\n';
  }
  out += kHeader;
  out += '\n';
  char buf[64];
  for (int a = 0; a < kAreaCount; ++a) {
    const AreaScenario& area = sc.areas[static_cast<std::size_t>(a)];
    for (SeriesKind kind : kSeriesKinds) {
      out += kIsoCodes[static_cast<std::size_t>(a)];
      out += ',';
      out += to_string(kind);
      std::snprintf(buf, sizeof(buf), ",%.17g", area.p_disp_max);
      out += buf;
      for (double v : area.at(kind).values) {
        if (std::isnan(v)) {
          out += ',';
        } else {
          std::snprintf(buf, sizeof(buf), ",%.17g", v);
          out += buf;
        }
      }
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

HourlySeries repair_missing(const HourlySeries& s) {
  const int present = kHoursPerDay - s.missing_count();
  if (present < 2) {
    throw SchemaError("series has fewer than 2 present entries (" + std::to_string(present) + ")");
  }
  HourlySeries out = s;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (!std::isnan(out.values[static_cast<std::size_t>(h)])) continue;
    int prev = h - 1;
    while (prev >= 0 && std::isnan(s.values[static_cast<std::size_t>(prev)])) --prev;
    int next = h + 1;
    while (next < kHoursPerDay && std::isnan(s.values[static_cast<std::size_t>(next)])) ++next;
    if (prev >= 0 && next < kHoursPerDay) {
      const double a = s.values[static_cast<std::size_t>(prev)];
      const double b = s.values[static_cast<std::size_t>(next)];
      const double t = static_cast<double>(h - prev) / static_cast<double>(next - prev);
      out.values[static_cast<std::size_t>(h)] = a + t * (b - a);
    } else if (prev >= 0) {
      out.values[static_cast<std::size_t>(h)] = s.values[static_cast<std::size_t>(prev)];
    } else {
      out.values[static_cast<std::size_t>(h)] = s.values[static_cast<std::size_t>(next)];
    }
  }
  return out;
}

Scenario repair_scenario(const Scenario& sc) {
  Scenario out = sc;
  for (AreaScenario& area : out.areas) {
    for (HourlySeries& s : area.series) {
      if (s.has_missing()) s = repair_missing(s);
    }
  }
  return out;
}

namespace {

// value at step k for one hourly series, linear between hours, hold past hour 24
double step_value(const HourlySeries& s, int k, int steps_per_hour) {
  const int i = k / steps_per_hour;
  if (i >= kHoursPerDay - 1) return s.values[kHoursPerDay - 1];
  const double r =
      static_cast<double>(k - i * steps_per_hour) / static_cast<double>(steps_per_hour);
  const double a = s.values[static_cast<std::size_t>(i)];
  const double b = s.values[static_cast<std::size_t>(i + 1)];
  return a + r * (b - a);
}

}  // namespace

StepSignals interpolate_to_steps(const Scenario& sc, int steps_per_hour) {
  if (steps_per_hour < 1) throw std::invalid_argument("steps_per_hour must be positive");
  if (sc.has_missing()) {
    throw std::invalid_argument("scenario has missing entries; repair before interpolation");
  }
  StepSignals sig;
  sig.steps = kHoursPerDay * steps_per_hour;
  for (int a = 0; a < kAreaCount; ++a) {
    const AreaScenario& area = sc.areas[static_cast<std::size_t>(a)];
    sig.load0[static_cast<std::size_t>(a)] = area.at(SeriesKind::load_meas).values[0];
    sig.ren0[static_cast<std::size_t>(a)] = area.at(SeriesKind::ren_meas).values[0];
    const auto fill = [&](SeriesKind kind, std::vector<double>& dst) {
      const HourlySeries& s = area.at(kind);
      const double base = s.values[0];
      dst.resize(static_cast<std::size_t>(sig.steps));
      for (int k = 0; k < sig.steps; ++k) {
        dst[static_cast<std::size_t>(k)] = step_value(s, k, steps_per_hour) - base;
      }
    };
    fill(SeriesKind::load_meas, sig.d_load_meas[static_cast<std::size_t>(a)]);
    fill(SeriesKind::load_for, sig.d_load_for[static_cast<std::size_t>(a)]);
    fill(SeriesKind::ren_meas, sig.d_ren_meas[static_cast<std::size_t>(a)]);
    fill(SeriesKind::ren_for, sig.d_ren_for[static_cast<std::size_t>(a)]);
  }
  return sig;
}

void write_step_signals_csv(const StepSignals& sig, const std::string& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(sig.steps) * kAreaCount * 48 + 64);
  out += "k,iso,d_load_meas,d_load_for,d_ren_meas,d_ren_for\n";
  char buf[160];
  for (int k = 0; k < sig.steps; ++k) {
    for (int a = 0; a < kAreaCount; ++a) {
      const auto idx = static_cast<std::size_t>(k);
      const auto ai = static_cast<std::size_t>(a);
      std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%.17g,%.17g\n", k,
                    std::string(kIsoCodes[ai]).c_str(), sig.d_load_meas[ai][idx],
                    sig.d_load_for[ai][idx], sig.d_ren_meas[ai][idx], sig.d_ren_for[ai][idx]);
      out += buf;
    }
  }
  write_file_atomic(path, out);
}

std::string_view to_string(ScenarioProfile profile) {
  return profile == ScenarioProfile::calm ? "calm" : "volatile";
}

std::optional<ScenarioProfile> profile_from_string(std::string_view s) {
  if (s == "calm") return ScenarioProfile::calm;
  if (s == "volatile") return ScenarioProfile::volatile_day;
  return std::nullopt;
}

namespace {

// Daily demand pattern, bounded to [-1, 1]: night trough, evening peak.
double day_shape(double t) {
  constexpr double w = 2.0 * std::numbers::pi / 24.0;
  return 0.6 * std::sin(w * (t - 9.0)) + 0.4 * std::sin(2.0 * w * (t - 7.0));
}

double solar_bell(double t) { return std::exp(-(t - 13.0) * (t - 13.0) / 18.0); }

}  // namespace

Scenario synthetic_scenario(std::uint64_t seed, ScenarioProfile profile) {
  const bool calm = profile == ScenarioProfile::calm;
  const double amp = calm ? 0.02 : 0.08;
  const double sigma = calm ? 0.01 : 0.10;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + (calm ? 1 : 2));

  const auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const auto noise_factor = [&rng, sigma]() {
    const double n = std::clamp(std::normal_distribution<double>(0.0, 1.0)(rng), -3.0, 3.0);
    return 1.0 + sigma * n;
  };

  Scenario sc;
  sc.provenance =
      "synthetic profile=" + std::string(to_string(profile)) + " seed=" + std::to_string(seed);
  for (int a = 0; a < kAreaCount; ++a) {
    AreaScenario& area = sc.areas[static_cast<std::size_t>(a)];
    const double level = uniform(5.0, 80.0);
    const double phase = uniform(-1.5, 1.5);
    const double sharp = uniform(0.8, 1.2);
    const double solar = uniform(0.3, 0.7) * level * amp;
    const double wind = uniform(0.2, 0.5) * level * amp;
    std::array<double, kHoursPerDay> gusts{};
    for (double& g : gusts) g = uniform(0.0, 1.0);

    HourlySeries& load_meas = area.at(SeriesKind::load_meas);
    HourlySeries& ren_meas = area.at(SeriesKind::ren_meas);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double t = static_cast<double>(h + 1);
      load_meas.values[static_cast<std::size_t>(h)] =
          level * (1.0 + amp * sharp * day_shape(t + phase));
      const auto hi = static_cast<std::size_t>(h);
      const double smooth = (gusts[(hi + kHoursPerDay - 1) % kHoursPerDay] + gusts[hi] +
                             gusts[(hi + 1) % kHoursPerDay]) /
                            3.0;
      ren_meas.values[hi] = solar * solar_bell(t) + wind * smooth;
    }
    HourlySeries& load_for = area.at(SeriesKind::load_for);
    HourlySeries& ren_for = area.at(SeriesKind::ren_for);
    for (int h = 0; h < kHoursPerDay; ++h) {
      load_for.values[static_cast<std::size_t>(h)] =
          load_meas.values[static_cast<std::size_t>(h)] * noise_factor();
    }
    for (int h = 0; h < kHoursPerDay; ++h) {
      ren_for.values[static_cast<std::size_t>(h)] =
          ren_meas.values[static_cast<std::size_t>(h)] * noise_factor();
    }

    // Capacity sizing: the per-step input box cap/steps_per_day must comfortably
    // exceed the largest net deviation the controller may have to track.
    double dev_load = 0.0, dev_ren = 0.0, peak = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto hi = static_cast<std::size_t>(h);
      dev_load = std::max(dev_load, std::abs(load_meas.values[hi] - load_meas.values[0]));
      dev_load = std::max(dev_load, std::abs(load_for.values[hi] - load_for.values[0]));
      dev_ren = std::max(dev_ren, std::abs(ren_meas.values[hi] - ren_meas.values[0]));
      dev_ren = std::max(dev_ren, std::abs(ren_for.values[hi] - ren_for.values[0]));
      peak = std::max(peak, load_meas.values[hi]);
    }
    area.p_disp_max = std::max({2.0 * peak, 2.5 * 1440.0 * (dev_load + dev_ren), 1.0});
  }
  return sc;
}

}  // namespace lfc
