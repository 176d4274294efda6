#pragma once
// Dense vector kernels used in the solver's hot loops. Each kernel has a
// scalar reference implementation and an AVX2 variant; the backend is chosen
// once at startup from CPU support, overridable with LFCBENCH_KERNELS=scalar.
//
// Elementwise kernels (axpby, clamp, mul, scale) round identically in every
// backend; reductions (dot, inf_norm) may differ by summation order only.

#include <cstddef>
#include <span>
#include <string_view>

namespace lfc::kernels {

enum class Backend { scalar, avx2 };

/// Backend the process resolved at first use.
Backend active_backend();
std::string_view backend_name();

/// y = a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
/// out = min(max(x, lo), hi), elementwise
void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out);
/// out = x .* y
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
/// out = a*x
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double inf_norm(std::span<const double> x);
/// max_i |x_i - y_i|
double inf_norm_diff(std::span<const double> x, std::span<const double> y);

// Direct access to both implementations for equivalence tests.
namespace scalar {
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out);
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double inf_norm(std::span<const double> x);
double inf_norm_diff(std::span<const double> x, std::span<const double> y);
}  // namespace scalar

namespace avx2 {
bool supported();
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out);
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
void scale(double a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> x, std::span<const double> y);
double inf_norm(std::span<const double> x);
double inf_norm_diff(std::span<const double> x, std::span<const double> y);
}  // namespace avx2

}  // namespace lfc::kernels
