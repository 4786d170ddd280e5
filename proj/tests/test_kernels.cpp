#include <cstring>
#include <vector>

#include "doctest.h"
#include "tangle/kernels.hpp"
#include "tangle/rng.hpp"

using namespace tangle;

namespace {

std::vector<double> random_values(Rng& rng, size_t n) {
  std::vector<double> v(n);
  for (double& x : v) {
    const double u = rng.next_unit();
    x = (u - 0.5) * 2000.0;
    if (rng.next_below(16) == 0) x = 0.0;  // sprinkle exact zeros
  }
  return v;
}

}  // namespace

TEST_CASE("dispatched kernels are bit-identical to the scalar reference") {
  Rng rng(123);
  for (size_t n : {size_t{0}, size_t{1}, size_t{2}, size_t{3}, size_t{4}, size_t{5},
                   size_t{7}, size_t{8}, size_t{15}, size_t{16}, size_t{33}, size_t{64},
                   size_t{101}, size_t{1024}}) {
    const std::vector<double> a = random_values(rng, n);
    const std::vector<double> b = random_values(rng, n);
    const double scale = rng.next_unit() * 3.0 + 0.01;
    const double factor = 1.0 - rng.next_unit() * 0.2;

    CHECK(kernels::max_abs_scaled_diff(a.data(), b.data(), n, scale) ==
          kernels::detail::max_abs_scaled_diff_scalar(a.data(), b.data(), n, scale));
    CHECK(kernels::max_abs_diff(a.data(), b.data(), n) ==
          kernels::detail::max_abs_diff_scalar(a.data(), b.data(), n));
    CHECK(kernels::min_value(a.data(), n) == kernels::detail::min_value_scalar(a.data(), n));
    CHECK(kernels::max_value(a.data(), n) == kernels::detail::max_value_scalar(a.data(), n));

    std::vector<double> w1 = a;
    std::vector<double> w2 = a;
    kernels::scale_in_place(w1.data(), n, factor);
    kernels::detail::scale_in_place_scalar(w2.data(), n, factor);
    CHECK(std::memcmp(w1.data(), w2.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("forcing the scalar backend changes only the dispatch") {
  const std::vector<double> a = {1.0, -2.0, 3.5, -4.25, 5.0};
  const std::vector<double> b = {0.5, -1.0, 3.0, -9.0, 5.0};
  const double via_active = kernels::max_abs_scaled_diff(a.data(), b.data(), a.size(), 2.0);
  const bool previous = kernels::set_force_scalar(true);
  CHECK(kernels::backend_name() == "scalar");
  const double via_scalar = kernels::max_abs_scaled_diff(a.data(), b.data(), a.size(), 2.0);
  kernels::set_force_scalar(previous);
  CHECK(via_active == via_scalar);
  CHECK(via_active == 5.0);  // |5*2 - 5|
}

TEST_CASE("kernel reductions on tiny known inputs") {
  const std::vector<double> a = {1.0, -2.0, 3.0};
  const std::vector<double> b = {2.0, -2.0, 2.0};
  CHECK(kernels::max_abs_diff(a.data(), b.data(), 3) == 1.0);
  CHECK(kernels::max_abs_scaled_diff(a.data(), b.data(), 3, 2.0) == 4.0);  // |3*2-2|
  CHECK(kernels::min_value(a.data(), 3) == -2.0);
  CHECK(kernels::max_value(a.data(), 3) == 3.0);
  CHECK(kernels::min_value(a.data(), 0) > 1e300);
}
