#pragma once

#include <cstddef>
#include <string>

namespace tangle::kernels {

// Data-parallel inner loops of the fluid integrator and the deviation
// metric, with scalar reference implementations and SIMD variants selected
// at runtime. Every operation is built from element-wise mul/sub/abs and
// min/max reductions, so the SIMD results are bit-identical to scalar.

/// max_i |a[i] * scale - b[i]|; 0 for n == 0.
double max_abs_scaled_diff(const double* a, const double* b, std::size_t n, double scale);

/// max_i |a[i] - b[i]|; 0 for n == 0.
double max_abs_diff(const double* a, const double* b, std::size_t n);

/// w[i] *= factor for i in [0, n).
void scale_in_place(double* w, std::size_t n, double factor);

/// Reductions; +inf / -inf for n == 0.
double min_value(const double* a, std::size_t n);
double max_value(const double* a, std::size_t n);

/// Name of the active backend ("scalar", "avx2", ...).
const std::string& backend_name();

/// Force the scalar reference path (used by equivalence tests); returns the
/// previous setting.
bool set_force_scalar(bool force);

namespace detail {
double max_abs_scaled_diff_scalar(const double* a, const double* b, std::size_t n, double scale);
double max_abs_diff_scalar(const double* a, const double* b, std::size_t n);
void scale_in_place_scalar(double* w, std::size_t n, double factor);
double min_value_scalar(const double* a, std::size_t n);
double max_value_scalar(const double* a, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double max_abs_scaled_diff_avx2(const double* a, const double* b, std::size_t n, double scale);
double max_abs_diff_avx2(const double* a, const double* b, std::size_t n);
void scale_in_place_avx2(double* w, std::size_t n, double factor);
double min_value_avx2(const double* a, std::size_t n);
double max_value_avx2(const double* a, std::size_t n);
#endif
#if defined(__aarch64__)
double max_abs_scaled_diff_neon(const double* a, const double* b, std::size_t n, double scale);
double max_abs_diff_neon(const double* a, const double* b, std::size_t n);
void scale_in_place_neon(double* w, std::size_t n, double factor);
double min_value_neon(const double* a, std::size_t n);
double max_value_neon(const double* a, std::size_t n);
#endif
}  // namespace detail

}  // namespace tangle::kernels
