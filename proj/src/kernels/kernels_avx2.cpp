// AVX2 variants of the vector kernels. Compiled with -mavx2 only; callers
// must gate on supported(). Elementwise kernels use plain mul/add so they
// round exactly like the scalar reference. Reductions keep four lanes and
// combine at the end, so their rounding may differ from scalar by summation
// order.

#include <cmath>
#include <cstddef>

#include "lfc/kernels.hpp"

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace lfc::kernels::avx2 {

bool supported() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

#if defined(__x86_64__)

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  const size_t n = y.size();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_mul_pd(va, vx), _mm256_mul_pd(vb, vy)));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  const size_t n = x.size();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vl = _mm256_loadu_pd(lo.data() + i);
    const __m256d vh = _mm256_loadu_pd(hi.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_min_pd(_mm256_max_pd(vx, vl), vh));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  const size_t n = x.size();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(vx, vy));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale(double a, std::span<const double> x, std::span<double> out) {
  const size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
  }
  for (; i < n; ++i) out[i] = a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x.data() + i);
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

}  // namespace

double inf_norm(std::span<const double> x) {
  const size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(x.data() + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double inf_norm_diff(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

#else  // !__x86_64__: never selected, stubs keep the link happy.

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  scalar::axpby(a, x, b, y);
}
void clamp(std::span<const double> x, std::span<const double> lo, std::span<const double> hi,
           std::span<double> out) {
  scalar::clamp(x, lo, hi, out);
}
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  scalar::mul(x, y, out);
}
void scale(double a, std::span<const double> x, std::span<double> out) {
  scalar::scale(a, x, out);
}
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
double inf_norm(std::span<const double> x) { return scalar::inf_norm(x); }
double inf_norm_diff(std::span<const double> x, std::span<const double> y) {
  return scalar::inf_norm_diff(x, y);
}

#endif

}  // namespace lfc::kernels::avx2
