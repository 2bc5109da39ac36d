// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "mlheat/grid.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/parallel.hpp"

namespace {

using namespace mlheat;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<double> symbols(std::size_t n) {
  const Grid g = Grid::make(1, n, 64.0);
  const MixedOperator op(OperatorParams::make(0.5), g);
  return {op.symbols().begin(), op.symbols().end()};
}

template <bool Parallel>
void BM_PowerSum(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)), 1);
  for (auto _ : st) {
    double r = Parallel ? kernels::power_sum(v, 4.5, 1.0) : kernels::serial::power_sum(v, 4.5, 1.0);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_ExpYoungSum(benchmark::State& st) {
  const auto v = random_values(static_cast<std::size_t>(st.range(0)), 2);
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) a[i] = v[i] * v[i];
  for (auto _ : st) {
    double r = Parallel ? kernels::exp_young_sum(a, 0.7, false) : kernels::serial::exp_young_sum(a, 0.7, false);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_ExpMultiplier(benchmark::State& st) {
  const auto sym = symbols(static_cast<std::size_t>(st.range(0)));
  std::vector<double> out(sym.size());
  for (auto _ : st) {
    if (Parallel) kernels::exp_multiplier(sym, 0.01, out);
    else kernels::serial::exp_multiplier(sym, 0.01, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_Combine(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_values(n, 3), b = random_values(n, 4), re = random_values(n, 5);
  std::vector<std::complex<double>> x(n), y(n), out(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] = {re[i], -re[i]};
  for (auto _ : st) {
    if (Parallel) kernels::combine(out, a, x, b, y);
    else kernels::serial::combine(out, a, x, b, y);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_MaxAbsDiff(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = random_values(n, 6), b = random_values(n, 7);
  for (auto _ : st) {
    double r = Parallel ? kernels::max_abs_diff(a, b) : kernels::serial::max_abs_diff(a, b);
    benchmark::DoNotOptimize(r);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_PowerSum<true>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_PowerSum<false>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_ExpYoungSum<true>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_ExpYoungSum<false>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_ExpMultiplier<true>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_ExpMultiplier<false>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_Combine<true>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_Combine<false>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_MaxAbsDiff<true>)->Range(1 << 12, 1 << 20);
BENCHMARK(BM_MaxAbsDiff<false>)->Range(1 << 12, 1 << 20);

BENCHMARK_MAIN();
