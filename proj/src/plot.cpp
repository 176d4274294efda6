#include "lfc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "lfc/fileio.hpp"
#include "lfc/model.hpp"

namespace lfc {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 42;
constexpr int kMarginBottom = 46;

std::string color_of(std::size_t index) {
  const int hue = static_cast<int>(std::fmod(static_cast<double>(index) * 137.508, 360.0));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "hsl(%d,70%%,38%%)", hue);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void append_text(std::string& out, double x, double y, const std::string& text,
                 const char* anchor, int size, const char* extra = "") {
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"%d\" font-family=\"sans-serif\" "
                "text-anchor=\"%s\"%s>",
                x, y, size, anchor, extra);
  out += buf;
  out += text;
  out += "</text>\n";
}

struct SignalGroup {
  const char* prefix;
  const char* title;
  const char* unit;
};

constexpr SignalGroup kGroups[] = {
    {"d_delta", "Angle deviation", "deg"},
    {"d_f", "Frequency deviation", "Hz"},
    {"e", "Stored energy", "GWh"},
    {"d_p_disp", "Dispatch deviation", "GW"},
    {"p_c", "Charge power", "GW"},
    {"p_d", "Discharge power", "GW"},
    {"p_tie", "Tie-line power", "GW"},
    {"p_disp", "Total dispatch", "GW"},
    {"p_tie_int", "Integrated tie deviation", "GW"},
    {"t_d_p_disp", "Turbine dispatch state", "GW"},
    {"t_p_c", "Turbine charge state", "GW"},
    {"t_p_d", "Turbine discharge state", "GW"},
};

}  // namespace

std::string line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double plot_w = spec.width - kMarginLeft - kMarginRight;
  const double plot_h = spec.height - kMarginTop - kMarginBottom;

  std::size_t n = 0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const PlotSeries& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (n == 0 || !std::isfinite(y_min)) {
    y_min = 0.0;
    y_max = 1.0;
    n = 1;
  }
  if (y_max - y_min < 1e-12) {
    const double pad = std::max(1.0, std::abs(y_max)) * 0.1;
    y_min -= pad;
    y_max += pad;
  } else {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }
  const double x_max = static_cast<double>(n > 1 ? n - 1 : 1);

  const auto px = [&](double x) { return kMarginLeft + plot_w * (x / x_max); };
  const auto py = [&](double y) {
    return kMarginTop + plot_h * (1.0 - (y - y_min) / (y_max - y_min));
  };

  std::string out;
  out.reserve(64 * 1024);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                spec.width, spec.height, spec.width, spec.height);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  append_text(out, spec.width / 2.0, 24, spec.title, "middle", 15);

  constexpr int kTicks = 6;
  for (int t = 0; t <= kTicks; ++t) {
    const double frac = static_cast<double>(t) / kTicks;
    const double gy = kMarginTop + plot_h * frac;
    const double gx = kMarginLeft + plot_w * frac;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                  kMarginLeft, gy, kMarginLeft + plot_w, gy);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", gx,
                  kMarginTop, gx, kMarginTop + plot_h);
    out += buf;
    append_text(out, kMarginLeft - 6, gy + 4, fmt_tick(y_max - frac * (y_max - y_min)), "end", 11);
    append_text(out, gx, kMarginTop + plot_h + 16, fmt_tick(frac * x_max), "middle", 11);
  }
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%d\" y=\"%d\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"#444\"/>\n",
                kMarginLeft, kMarginTop, plot_w, plot_h);
  out += buf;
  append_text(out, kMarginLeft + plot_w / 2.0, spec.height - 10, "step", "middle", 12);
  std::snprintf(buf, sizeof(buf), " transform=\"rotate(-90 16 %.1f)\"",
                kMarginTop + plot_h / 2.0);
  append_text(out, 16, kMarginTop + plot_h / 2.0, spec.y_label, "middle", 12, buf);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    if (s.values.empty()) continue;
    const std::size_t stride =
        std::max<std::size_t>(1, (s.values.size() + static_cast<std::size_t>(spec.max_points) - 1) /
                                     static_cast<std::size_t>(spec.max_points));
    out += "<polyline fill=\"none\" stroke=\"" + color_of(si) + "\" stroke-width=\"1.1\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); i += stride) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(static_cast<double>(i)), py(s.values[i]));
      out += buf;
    }
    const std::size_t last = s.values.size() - 1;
    if (last % stride != 0) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(static_cast<double>(last)),
                    py(s.values[last]));
      out += buf;
    }
    out += "\"/>\n";
  }

  const double lx = kMarginLeft + plot_w + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double ly = kMarginTop + 6 + 16.0 * static_cast<double>(si);
    if (ly > spec.height - kMarginBottom) break;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  lx, ly - 4, lx + 16, ly - 4, color_of(si).c_str());
    out += buf;
    append_text(out, lx + 20, ly, series[si].label, "start", 11);
  }

  out += "</svg>\n";
  return out;
}

std::vector<std::string> write_log_charts(const LogTable& table, const std::string& out_dir,
                                          const std::string& base) {
  std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
  const std::string stem = (out_dir.empty() ? "." : out_dir) + "/" + base;
  std::vector<std::string> written;

  for (const SignalGroup& g : kGroups) {
    std::vector<PlotSeries> series;
    series.reserve(kAreaCount);
    bool complete = true;
    for (std::string_view iso : kIsoCodes) {
      const int col = table.column(std::string(g.prefix) + "_" + std::string(iso));
      if (col < 0) {
        complete = false;
        break;
      }
      series.push_back({std::string(iso), table.values(col)});
    }
    if (!complete) continue;
    PlotSpec spec;
    spec.title = g.title;
    spec.y_label = g.unit;
    const std::string path = stem + "_" + g.prefix + ".svg";
    write_file_atomic(path, line_chart_svg(spec, series));
    written.push_back(path);
  }

  const int cost_col = table.column("stage_cost");
  if (cost_col >= 0) {
    PlotSeries cum{"cumulative", table.values(cost_col)};
    double acc = 0.0;
    for (double& v : cum.values) {
      acc += v;
      v = acc;
    }
    PlotSpec spec;
    spec.title = "Cumulative stage cost";
    spec.y_label = "cost";
    const std::string path = stem + "_cost.svg";
    write_file_atomic(path, line_chart_svg(spec, {cum}));
    written.push_back(path);
  }
  return written;
}

}  // namespace lfc
