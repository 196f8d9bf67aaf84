#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference that
// the OpenMP variant is tested against; Exec selects the path at runtime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace lagom::kernels {

enum class Exec { Serial, Parallel };

inline constexpr std::size_t kSumBlock = 2048;

/// Compensated (Neumaier) sums over fixed blocks of kSumBlock, blocks merged
/// by a fixed pairwise tree. Bitwise identical for both Exec values.
double sum(std::span<const double> v, Exec exec = Exec::Parallel);

/// Same reduction tree as sum(), applied to f(i) for i in [0, n).
template <typename F>
double sum_of(std::size_t n, F&& f, Exec exec = Exec::Parallel);

/// Runs f(i) for i in [0, n), over OpenMP threads when exec is Parallel.
template <typename F>
void for_range(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

/// y = A x for a dense row-major n x n matrix.
void matvec_dense(std::span<const double> a, std::span<const double> x, std::span<double> y,
                  Exec exec = Exec::Parallel);

/// y = A^T x for a dense row-major n x n matrix.
void matvec_dense_transposed(std::span<const double> a, std::span<const double> x, std::span<double> y,
                             Exec exec = Exec::Parallel);

/// y_i = sum_j g[j - i + n - 1] * w[i + j] * x_j  (Toeplitz times Hankel,
/// elementwise). g and w have length 2n - 1.
void matvec_toeplitz_hankel(std::span<const double> g, std::span<const double> w,
                            std::span<const double> x, std::span<double> y,
                            Exec exec = Exec::Parallel);

/// Pure Toeplitz product y_i = sum_j g[j - i + n - 1] x_j through a circulant
/// FFT embedding. Plans are built once per instance.
class ToeplitzFft {
 public:
  explicit ToeplitzFft(std::span<const double> g);
  ~ToeplitzFft();
  ToeplitzFft(const ToeplitzFft&) = delete;
  ToeplitzFft& operator=(const ToeplitzFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  struct Impl;
  std::size_t n_ = 0;
  std::unique_ptr<Impl> impl_;
};

namespace detail {
double neumaier(std::span<const double> v);
double pairwise_merge(std::span<double> partial);
}  // namespace detail

template <typename F>
double sum_of(std::size_t n, F&& f, Exec exec) {
  const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
  if (blocks == 0) return 0.0;
  auto partial = std::make_unique<double[]>(blocks);
  auto block_sum = [&](std::size_t b) {
    double s = 0.0, c = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) {
      const double x = f(i);
      const double t = s + x;
      c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
      s = t;
    }
    return s + c;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b)
      partial[b] = block_sum(static_cast<std::size_t>(b));
  } else {
    for (std::size_t b = 0; b < blocks; ++b) partial[b] = block_sum(b);
  }
  return detail::pairwise_merge({partial.get(), blocks});
}

}  // namespace lagom::kernels
