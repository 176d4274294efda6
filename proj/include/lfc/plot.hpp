#pragma once
// Self-contained SVG line charts for run logs: one polyline per area over
// shared axes, a legend, and point decimation for long runs.

#include <string>
#include <vector>

#include "lfc/logio.hpp"

namespace lfc {

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // x is the sample index
};

struct PlotSpec {
  std::string title;
  std::string y_label;
  int width = 960;
  int height = 520;
  int max_points = 2000;  // per-series decimation cap
};

/// A complete standalone SVG document.
std::string line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Writes the standard figure set for a run log table into out_dir: one
/// chart per area-signal group present in the header plus the cumulative
/// stage cost. Files are named <base>_<group>.svg; returns the paths.
std::vector<std::string> write_log_charts(const LogTable& table, const std::string& out_dir,
                                          const std::string& base);

}  // namespace lfc
