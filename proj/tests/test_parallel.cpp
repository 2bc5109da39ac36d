#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mlheat/parallel.hpp"

using namespace mlheat;
namespace k = mlheat::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<std::complex<double>> random_complex(std::size_t n, std::uint64_t seed) {
  const auto re = random_values(n, seed), im = random_values(n, seed + 1000);
  std::vector<std::complex<double>> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = {re[i], im[i]};
  return c;
}

}  // namespace

// Sizes straddle the reduction block so partial blocks are exercised.
TEST_CASE("parallel reductions agree with the serial references") {
  for (std::size_t n : {1UL, 17UL, 4096UL, 4097UL, 50000UL}) {
    const auto v = random_values(n, n);
    CHECK(k::max_abs(v) == k::serial::max_abs(v));
    CHECK(k::abs_sum(v) == doctest::Approx(k::serial::abs_sum(v)).epsilon(1e-13));
    CHECK(k::power_sum(v, 3.5, 0.7) == doctest::Approx(k::serial::power_sum(v, 3.5, 0.7)).epsilon(1e-13));
    const auto w = random_values(n, n + 1);
    CHECK(k::max_abs_diff(v, w) == k::serial::max_abs_diff(v, w));
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = v[i] * v[i];
    for (bool reduced : {false, true})
      CHECK(k::exp_young_sum(a, 1.3, reduced) ==
            doctest::Approx(k::serial::exp_young_sum(a, 1.3, reduced)).epsilon(1e-13));
  }
}

TEST_CASE("parallel reductions are reproducible") {
  const auto v = random_values(100000, 42);
  const double first = k::power_sum(v, 2.5, 1.0);
  for (int rep = 0; rep < 5; ++rep) CHECK(k::power_sum(v, 2.5, 1.0) == first);
}

TEST_CASE("elementwise kernels agree with the serial references") {
  const std::size_t n = 9000;
  const auto sym = random_values(n, 1, 0.0, 50.0);
  std::vector<double> m1(n), m2(n);
  k::exp_multiplier(sym, 0.3, m1);
  k::serial::exp_multiplier(sym, 0.3, m2);
  CHECK(m1 == m2);

  auto c1 = random_complex(n, 2), c2 = c1;
  k::multiply(c1, m1);
  k::serial::multiply(c2, m1);
  CHECK(c1 == c2);

  const auto x = random_complex(n, 3), y = random_complex(n, 4);
  const auto a = random_values(n, 5), b = random_values(n, 6);
  std::vector<std::complex<double>> o1(n), o2(n);
  k::combine(o1, a, x, b, y);
  k::serial::combine(o2, a, x, b, y);
  CHECK(o1 == o2);
  k::accumulate(o1, 0.25, a, x);
  k::serial::accumulate(o2, 0.25, a, x);
  CHECK(o1 == o2);

  const auto in = random_values(n, 7);
  std::vector<double> r1(n), r2(n);
  auto fn = [](double u) { return u * std::exp(u); };
  k::map(in, r1, fn);
  k::serial::map(in, r2, fn);
  CHECK(r1 == r2);
}

TEST_CASE("expm1_minus_x") {
  for (double x : {1e-12, 1e-6, 1e-3, -1e-3}) {
    const double ref = x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x * (1.0 / 120 + x / 720))));
    CHECK(k::expm1_minus_x(x) == doctest::Approx(ref).epsilon(1e-14));
  }
  for (double x : {0.05, 0.099, 0.5, 3.0, -0.05, -2.0})
    CHECK(k::expm1_minus_x(x) == doctest::Approx(std::expm1(x) - x).epsilon(1e-13));
  CHECK(k::expm1_minus_x(0.0) == 0.0);
}
