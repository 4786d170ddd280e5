#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "tangle/kernels.hpp"

// Compiled with -mavx2 for this translation unit only; callers reach it
// through the runtime dispatch in kernels.cpp. No FMA: mul and sub are kept
// separate so lanes round exactly like the scalar reference.

namespace tangle::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign_mask, v);
}

inline double hmax_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m2 = _mm_max_pd(lo, hi);
  const __m128d m1 = _mm_max_sd(m2, _mm_unpackhi_pd(m2, m2));
  return _mm_cvtsd_f64(m1);
}

inline double hmin_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m2 = _mm_min_pd(lo, hi);
  const __m128d m1 = _mm_min_sd(m2, _mm_unpackhi_pd(m2, m2));
  return _mm_cvtsd_f64(m1);
}

}  // namespace

double max_abs_scaled_diff_avx2(const double* a, const double* b, std::size_t n, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d d = _mm256_sub_pd(_mm256_mul_pd(va, s), vb);
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  double m = hmax_pd(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] * scale - b[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  double m = hmax_pd(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void scale_in_place_avx2(double* w, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), f));
  for (; i < n; ++i) w[i] *= factor;
}

double min_value_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(a + i));
  double m = hmin_pd(acc);
  for (; i < n; ++i)
    if (a[i] < m) m = a[i];
  return m;
}

double max_value_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a + i));
  double m = hmax_pd(acc);
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

}  // namespace tangle::kernels::detail

#endif  // x86_64
