#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "tangle/kernels.hpp"

namespace tangle::kernels::detail {

double max_abs_scaled_diff_neon(const double* a, const double* b, std::size_t n, double scale) {
  const float64x2_t s = vdupq_n_f64(scale);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vmulq_f64(vld1q_f64(a + i), s), vld1q_f64(b + i));
    acc = vmaxq_f64(acc, vabsq_f64(d));
  }
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] * scale - b[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vmaxq_f64(acc, vabsq_f64(d));
  }
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void scale_in_place_neon(double* w, std::size_t n, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(w + i, vmulq_f64(vld1q_f64(w + i), f));
  for (; i < n; ++i) w[i] *= factor;
}

double min_value_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vminq_f64(acc, vld1q_f64(a + i));
  double m = vminvq_f64(acc);
  for (; i < n; ++i)
    if (a[i] < m) m = a[i];
  return m;
}

double max_value_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(a + i));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

}  // namespace tangle::kernels::detail

#endif  // aarch64
