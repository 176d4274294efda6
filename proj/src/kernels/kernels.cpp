#include "lfc/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string>

namespace lfc::kernels {

namespace scalar {

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a * x[i] + b * y[i];
}

void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  assert(x.size() == lo.size() && x.size() == hi.size() && x.size() == out.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  assert(x.size() == out.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double inf_norm_diff(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace scalar

namespace {

Backend resolve_backend() {
  if (const char* env = std::getenv("LFCBENCH_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && avx2::supported()) return Backend::avx2;
    // Unknown or unsupported request falls through to auto-detection.
  }
  return avx2::supported() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = resolve_backend();
  return b;
}

std::string_view backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  if (active_backend() == Backend::avx2) return avx2::axpby(a, x, b, y);
  scalar::axpby(a, x, b, y);
}

void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  if (active_backend() == Backend::avx2) return avx2::clamp(x, lo, hi, out);
  scalar::clamp(x, lo, hi, out);
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  if (active_backend() == Backend::avx2) return avx2::mul(x, y, out);
  scalar::mul(x, y, out);
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  if (active_backend() == Backend::avx2) return avx2::scale(a, x, out);
  scalar::scale(a, x, out);
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (active_backend() == Backend::avx2) return avx2::dot(x, y);
  return scalar::dot(x, y);
}

double inf_norm(std::span<const double> x) {
  if (active_backend() == Backend::avx2) return avx2::inf_norm(x);
  return scalar::inf_norm(x);
}

double inf_norm_diff(std::span<const double> x, std::span<const double> y) {
  if (active_backend() == Backend::avx2) return avx2::inf_norm_diff(x, y);
  return scalar::inf_norm_diff(x, y);
}

}  // namespace lfc::kernels
