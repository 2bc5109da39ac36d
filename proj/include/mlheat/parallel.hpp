#pragma once

// Data-parallel inner loops shared by every module.
//
// kernels::   OpenMP versions. Reductions are split into fixed-size blocks
//             whose partial sums are combined serially, so results do not
//             depend on the thread count.
// kernels::serial::  plain single-loop references used by the tests and by
//             bench_kernels.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mlheat::kernels {

inline constexpr std::size_t kBlock = 4096;

int num_threads();

/// Sum over blocks of `partial(begin, end)`; deterministic for any thread count.
template <class Partial>
double blocked_sum(std::size_t n, Partial&& partial) {
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> parts(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
    parts[static_cast<std::size_t>(b)] = partial(lo, hi);
  }
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

/// out[i] = fn(in[i]).
template <class Fn>
void map(std::span<const double> in, std::span<double> out, Fn&& fn) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(in.size()); ++i)
    out[static_cast<std::size_t>(i)] = fn(in[static_cast<std::size_t>(i)]);
}

double max_abs(std::span<const double> v);
double abs_sum(std::span<const double> v);
/// sum (|v_i| / scale)^q.
double power_sum(std::span<const double> v, double q, double scale);
/// out[i] = exp(-t * symbol[i]).
void exp_multiplier(std::span<const double> symbol, double t, std::span<double> out);
/// c[i] *= m[i].
void multiply(std::span<std::complex<double>> c, std::span<const double> m);
/// out[i] = a[i] * x[i] + b[i] * y[i].
void combine(std::span<std::complex<double>> out, std::span<const double> a,
             std::span<const std::complex<double>> x, std::span<const double> b,
             std::span<const std::complex<double>> y);
/// out[i] += w * m[i] * x[i].
void accumulate(std::span<std::complex<double>> out, double w, std::span<const double> m,
                std::span<const std::complex<double>> x);
/// max_i |a[i] - b[i]|.
double max_abs_diff(std::span<const double> a, std::span<const double> b);
/// sum_i g(mu * a[i]) with g(x) = e^x - 1, or e^x - 1 - x when `reduced`.
double exp_young_sum(std::span<const double> a, double mu, bool reduced);

/// e^x - 1 - x without cancellation for small x.
double expm1_minus_x(double x);

namespace serial {

double max_abs(std::span<const double> v);
double abs_sum(std::span<const double> v);
double power_sum(std::span<const double> v, double q, double scale);
void exp_multiplier(std::span<const double> symbol, double t, std::span<double> out);
void multiply(std::span<std::complex<double>> c, std::span<const double> m);
void combine(std::span<std::complex<double>> out, std::span<const double> a,
             std::span<const std::complex<double>> x, std::span<const double> b,
             std::span<const std::complex<double>> y);
void accumulate(std::span<std::complex<double>> out, double w, std::span<const double> m,
                std::span<const std::complex<double>> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double exp_young_sum(std::span<const double> a, double mu, bool reduced);

template <class Fn>
void map(std::span<const double> in, std::span<double> out, Fn&& fn) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
}

}  // namespace serial
}  // namespace mlheat::kernels
