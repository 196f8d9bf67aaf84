#include <fftw3.h>

#include <cassert>
#include <cstring>
#include <mutex>

#include "lagom/kernels.hpp"

namespace lagom::kernels {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// sum_j a[j] b[j] c[j] with kLanes independent partial sums, so the loop is
// not bound by the latency of a single accumulator.
constexpr std::size_t kLanes = 32;

double lane_dot3(const double* a, const double* b, const double* c, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
#pragma omp simd
    for (std::size_t k = 0; k < kLanes; ++k) acc[k] += a[j + k] * b[j + k] * c[j + k];
  }
  double tail = 0.0;
  for (; j < n; ++j) tail += a[j] * b[j] * c[j];
  for (std::size_t w = kLanes / 2; w > 0; w /= 2)
    for (std::size_t k = 0; k < w; ++k) acc[k] += acc[k + w];
  return acc[0] + tail;
}

double lane_dot2(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
#pragma omp simd
    for (std::size_t k = 0; k < kLanes; ++k) acc[k] += a[j + k] * b[j + k];
  }
  double tail = 0.0;
  for (; j < n; ++j) tail += a[j] * b[j];
  for (std::size_t w = kLanes / 2; w > 0; w /= 2)
    for (std::size_t k = 0; k < w; ++k) acc[k] += acc[k + w];
  return acc[0] + tail;
}

}  // namespace

void matvec_dense(std::span<const double> a, std::span<const double> x, std::span<double> y,
                  Exec exec) {
  const std::size_t n = x.size();
  assert(a.size() == n * n && y.size() == n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
      y[i] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    y[i] = lane_dot2(a.data() + static_cast<std::size_t>(i) * n, x.data(), n);
  }
}

void matvec_dense_transposed(std::span<const double> a, std::span<const double> x, std::span<double> y,
                             Exec exec) {
  const std::size_t n = x.size();
  assert(a.size() == n * n && y.size() == n);
  if (exec == Exec::Serial) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += a[i * n + j] * x[i];
      y[j] = acc;
    }
    return;
  }
  // column blocks per thread; each y_j still accumulates over i in order
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t j0 = static_cast<std::size_t>(b) * kBlock;
    const std::size_t j1 = std::min(n, j0 + kBlock);
    double acc[kBlock] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = a.data() + i * n;
      const double xi = x[i];
#pragma omp simd
      for (std::size_t j = j0; j < j1; ++j) acc[j - j0] += row[j] * xi;
    }
    for (std::size_t j = j0; j < j1; ++j) y[j] = acc[j - j0];
  }
}

void matvec_toeplitz_hankel(std::span<const double> g, std::span<const double> w,
                            std::span<const double> x, std::span<double> y, Exec exec) {
  const std::size_t n = x.size();
  assert(g.size() == 2 * n - 1 && w.size() == 2 * n - 1 && y.size() == n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += g[j + n - 1 - i] * w[i + j] * x[j];
      y[i] = acc;
    }
    return;
  }
  // Row blocks times column chunks: the slices of g, w and x touched by one
  // tile stay in L1 while every row of the block passes over them.
  constexpr std::size_t kRows = 64;
  constexpr std::size_t kCols = 1024;
  const std::size_t blocks = (n + kRows - 1) / kRows;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t i0 = static_cast<std::size_t>(b) * kRows;
    const std::size_t i1 = std::min(n, i0 + kRows);
    double acc[kRows] = {};
    for (std::size_t j0 = 0; j0 < n; j0 += kCols) {
      const std::size_t len = std::min(kCols, n - j0);
      for (std::size_t i = i0; i < i1; ++i)
        acc[i - i0] += lane_dot3(g.data() + (j0 + n - 1 - i), w.data() + (i + j0), x.data() + j0, len);
    }
    for (std::size_t i = i0; i < i1; ++i) y[i] = acc[i - i0];
  }
}

struct ToeplitzFft::Impl {
  std::size_t m = 0;  // circulant size
  double* buf = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* kernel = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  mutable std::mutex use;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(buf);
    fftw_free(spec);
    fftw_free(kernel);
  }
};

ToeplitzFft::ToeplitzFft(std::span<const double> g) : impl_(std::make_unique<Impl>()) {
  n_ = (g.size() + 1) / 2;
  auto& s = *impl_;
  s.m = next_pow2(2 * n_);
  const std::size_t half = s.m / 2 + 1;
  s.buf = fftw_alloc_real(s.m);
  s.spec = fftw_alloc_complex(half);
  s.kernel = fftw_alloc_complex(half);
  {
    std::lock_guard lock(planner_mutex());
    s.forward = fftw_plan_dft_r2c_1d(static_cast<int>(s.m), s.buf, s.spec, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_1d(static_cast<int>(s.m), s.spec, s.buf, FFTW_ESTIMATE);
  }
  // y_i = sum_j c[i - j] x_j with c[k] = g[n - 1 - k]; circulant first column
  std::memset(s.buf, 0, sizeof(double) * s.m);
  for (std::size_t k = 0; k < n_; ++k) s.buf[k] = g[n_ - 1 - k];
  for (std::size_t k = 1; k < n_; ++k) s.buf[s.m - k] = g[n_ - 1 + k];
  fftw_execute(s.forward);
  std::memcpy(s.kernel, s.spec, sizeof(fftw_complex) * half);
}

ToeplitzFft::~ToeplitzFft() = default;

void ToeplitzFft::apply(std::span<const double> x, std::span<double> y) const {
  auto& s = *impl_;
  std::lock_guard lock(s.use);
  const std::size_t half = s.m / 2 + 1;
  std::memset(s.buf, 0, sizeof(double) * s.m);
  std::memcpy(s.buf, x.data(), sizeof(double) * n_);
  fftw_execute(s.forward);
  for (std::size_t k = 0; k < half; ++k) {
    const double re = s.spec[k][0] * s.kernel[k][0] - s.spec[k][1] * s.kernel[k][1];
    const double im = s.spec[k][0] * s.kernel[k][1] + s.spec[k][1] * s.kernel[k][0];
    s.spec[k][0] = re;
    s.spec[k][1] = im;
  }
  fftw_execute(s.backward);
  const double scale = 1.0 / static_cast<double>(s.m);
  for (std::size_t i = 0; i < n_; ++i) y[i] = s.buf[i] * scale;
}

}  // namespace lagom::kernels
