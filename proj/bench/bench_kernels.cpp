// Serial reference against the OpenMP path for each parallel kernel.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lagom/haar.hpp"
#include "lagom/kernels.hpp"

using lagom::Exec;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_Sum(benchmark::State& state) {
  const auto v = random_vector(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(lagom::kernels::sum(v, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MatvecDense(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 2), x = random_vector(n, 3);
  std::vector<double> y(n);
  for (auto _ : state) {
    lagom::kernels::matvec_dense(a, x, y, exec_of(state));
    benchmark::ClobberMemory();
  }
}

void BM_MatvecDenseTransposed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 2), x = random_vector(n, 3);
  std::vector<double> y(n);
  for (auto _ : state) {
    lagom::kernels::matvec_dense_transposed(a, x, y, exec_of(state));
    benchmark::ClobberMemory();
  }
}

void BM_MatvecToeplitzHankel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = random_vector(2 * n - 1, 4), w = random_vector(2 * n - 1, 5), x = random_vector(n, 6);
  std::vector<double> y(n);
  for (auto _ : state) {
    lagom::kernels::matvec_toeplitz_hankel(g, w, x, y, exec_of(state));
    benchmark::ClobberMemory();
  }
}

void BM_HaarAnalyze(benchmark::State& state) {
  const lagom::GridSpec spec{1, 8, static_cast<int>(state.range(0))};
  const auto v = random_vector(spec.cell_count(), 7);
  const lagom::GridFunction f(spec, std::vector<lagom::complex>(v.begin(), v.end()));
  for (auto _ : state) benchmark::DoNotOptimize(lagom::analyze(f, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_Sum)->ArgsProduct({{1 << 16, 1 << 22}, {0, 1}});
BENCHMARK(BM_MatvecDense)->ArgsProduct({{1024, 4096}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatvecDenseTransposed)->ArgsProduct({{1024, 4096}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MatvecToeplitzHankel)->ArgsProduct({{4096, 32768}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HaarAnalyze)->ArgsProduct({{4, 8}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
