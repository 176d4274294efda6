#include "lfc/model.hpp"

#include <stdexcept>

namespace lfc {

std::optional<int> area_index(std::string_view iso) {
  for (int i = 0; i < kAreaCount; ++i) {
    if (kIsoCodes[i] == iso) return i;
  }
  return std::nullopt;
}

void AreaParams::set_capacity(double cap) {
  if (cap < 0.0) throw std::invalid_argument("dispatchable capacity must be >= 0");
  p_disp_max = cap;
  e_max = cap;
}

NetworkParams default_params() {
  NetworkParams p;
  p.tau = 2.5;
  p.delta0 = 30.0;
  p.f0 = 50.0;
  p.steps_per_hour = 1440;
  for (auto& a : p.areas) {
    a.t_p = 25.0;
    a.k_p = 0.05;
    a.eta_c = 0.9;
    a.eta_d = 1.1;
    a.p_disp_max = 0.0;
    a.e_max = 0.0;
  }
  return p;
}

ConstraintSet constraint_set(const AreaParams& params) {
  if (params.p_disp_max < 0.0) throw std::invalid_argument("p_disp_max must be >= 0");
  const double hourly = params.p_disp_max / 1440.0;
  ConstraintSet s;
  s.d_delta = {-30.0, 30.0};
  s.d_f = {-0.04, 0.04};
  s.e = {0.0, params.e_max};
  s.d_p_disp = {-hourly, hourly};
  s.p_c = {0.0, hourly};
  s.p_d = {0.0, hourly};
  return s;
}

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::linear: return "linear";
    case ModelVariant::pwa_ess: return "pwa_ess";
    case ModelVariant::turbine: return "turbine";
    case ModelVariant::augmented: return "augmented";
  }
  return "?";
}

std::optional<ModelVariant> variant_from_string(std::string_view s) {
  for (ModelVariant v : {ModelVariant::linear, ModelVariant::pwa_ess, ModelVariant::turbine,
                         ModelVariant::augmented}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::d_delta: return "d_delta";
    case Quantity::d_f: return "d_f";
    case Quantity::e: return "e";
    case Quantity::d_p_disp: return "d_p_disp";
    case Quantity::p_c: return "p_c";
    case Quantity::p_d: return "p_d";
    case Quantity::p_disp_total: return "p_disp_total";
  }
  return "?";
}

namespace {

void check_scalar(std::vector<Violation>& out, int area, Quantity q, double v, const Bounds& b) {
  if (v < b.lo) out.push_back({area, q, Side::lower, b.lo - v});
  if (v > b.hi) out.push_back({area, q, Side::upper, v - b.hi});
}

}  // namespace

ViolationReport check_violations(const NetworkState& state, const NetworkInput& input,
                                 const std::array<ConstraintSet, kAreaCount>& sets) {
  ViolationReport report;
  for (int i = 0; i < kAreaCount; ++i) {
    const ConstraintSet& s = sets[i];
    check_scalar(report.violations, i, Quantity::d_delta, state.areas[i].d_delta, s.d_delta);
    check_scalar(report.violations, i, Quantity::d_f, state.areas[i].d_f, s.d_f);
    check_scalar(report.violations, i, Quantity::e, state.areas[i].e, s.e);
    check_scalar(report.violations, i, Quantity::d_p_disp, input[i].d_p_disp, s.d_p_disp);
    check_scalar(report.violations, i, Quantity::p_c, input[i].p_c, s.p_c);
    check_scalar(report.violations, i, Quantity::p_d, input[i].p_d, s.p_d);
  }
  return report;
}

}  // namespace lfc
