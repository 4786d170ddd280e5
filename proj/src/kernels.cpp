#include "tangle/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace tangle::kernels {

namespace detail {

double max_abs_scaled_diff_scalar(const double* a, const double* b, std::size_t n, double scale) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] * scale - b[i]);
    if (d > m) m = d;
  }
  return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void scale_in_place_scalar(double* w, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) w[i] *= factor;
}

double min_value_scalar(const double* a, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] < m) m = a[i];
  return m;
}

double max_value_scalar(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

}  // namespace detail

namespace {

struct Backend {
  const char* name;
  double (*max_abs_scaled_diff)(const double*, const double*, std::size_t, double);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  void (*scale_in_place)(double*, std::size_t, double);
  double (*min_value)(const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
};

constexpr Backend scalar_backend = {
    "scalar",
    detail::max_abs_scaled_diff_scalar,
    detail::max_abs_diff_scalar,
    detail::scale_in_place_scalar,
    detail::min_value_scalar,
    detail::max_value_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Backend avx2_backend = {
    "avx2",
    detail::max_abs_scaled_diff_avx2,
    detail::max_abs_diff_avx2,
    detail::scale_in_place_avx2,
    detail::min_value_avx2,
    detail::max_value_avx2,
};
#endif
#if defined(__aarch64__)
constexpr Backend neon_backend = {
    "neon",
    detail::max_abs_scaled_diff_neon,
    detail::max_abs_diff_neon,
    detail::scale_in_place_neon,
    detail::min_value_neon,
    detail::max_value_neon,
};
#endif

const Backend& detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return avx2_backend;
#endif
#if defined(__aarch64__)
  return neon_backend;
#endif
  return scalar_backend;
}

std::atomic<bool> force_scalar{false};

const Backend& active() {
  static const Backend& detected = detect_backend();
  return force_scalar.load(std::memory_order_relaxed) ? scalar_backend : detected;
}

}  // namespace

double max_abs_scaled_diff(const double* a, const double* b, std::size_t n, double scale) {
  return active().max_abs_scaled_diff(a, b, n, scale);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return active().max_abs_diff(a, b, n);
}

void scale_in_place(double* w, std::size_t n, double factor) {
  active().scale_in_place(w, n, factor);
}

double min_value(const double* a, std::size_t n) { return active().min_value(a, n); }

double max_value(const double* a, std::size_t n) { return active().max_value(a, n); }

const std::string& backend_name() {
  static const std::string name = detect_backend().name;
  static const std::string scalar = "scalar";
  return force_scalar.load(std::memory_order_relaxed) ? scalar : name;
}

bool set_force_scalar(bool force) { return force_scalar.exchange(force); }

}  // namespace tangle::kernels
