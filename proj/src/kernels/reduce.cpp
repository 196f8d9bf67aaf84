#include <cmath>

#include "lagom/kernels.hpp"

namespace lagom::kernels {

namespace detail {

double neumaier(std::span<const double> v) {
  double s = 0.0, c = 0.0;
  for (const double x : v) {
    const double t = s + x;
    c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

double pairwise_merge(std::span<double> partial) {
  std::size_t n = partial.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) partial[i] = partial[2 * i] + partial[2 * i + 1];
    if (n % 2) partial[half] = partial[n - 1];
    n = half + n % 2;
  }
  return n ? partial[0] : 0.0;
}

}  // namespace detail

double sum(std::span<const double> v, Exec exec) {
  return sum_of(v.size(), [v](std::size_t i) { return v[i]; }, exec);
}

}  // namespace lagom::kernels
