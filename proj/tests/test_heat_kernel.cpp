#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mlheat/experiments.hpp"
#include "mlheat/heat_kernel.hpp"
#include "mlheat/mixed_operator.hpp"

using namespace mlheat;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("Fourier route reproduces the Gaussian when b = 0") {
  const auto p = OperatorParams::make(0.5, 1.0, 0.0);
  const auto x = linspace(0.0, 6.0, 41);
  for (double t : {0.1, 1.0}) {
    for (int dim : {1, 2}) {
      const auto k = heat_kernel_fourier(p, dim, t, x);
      CHECK(k.converged);
      std::vector<double> ref;
      for (double r : x) ref.push_back(std::exp(-r * r / (4 * t)) / std::pow(4 * kPi * t, dim / 2.0));
      // Relative error wherever the Gaussian exceeds 1e-6 of its peak.
      CHECK(max_relative_difference(k.values, ref, 1e-6) < 1e-8);
    }
  }
}

TEST_CASE("Fourier route reproduces the Poisson kernel when a = 0, s = 1/2") {
  const auto p = OperatorParams::make(0.5, 0.0, 1.0);
  const auto x = linspace(-50.0, 50.0, 201);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto k = heat_kernel_fourier(p, 1, t, x);
    std::vector<double> ref;
    for (double xi : x) ref.push_back(t / (kPi * (t * t + xi * xi)));
    CHECK(max_relative_difference(k.values, ref) < 1e-6);
  }
  const auto r = linspace(0.0, 20.0, 41);
  const auto k2 = heat_kernel_fourier(p, 2, 1.0, r);
  std::vector<double> ref2;
  for (double ri : r) ref2.push_back(1.0 / (2 * kPi * std::pow(1.0 + ri * ri, 1.5)));
  CHECK(max_relative_difference(k2.values, ref2) < 1e-6);
}

// Reference values from 30-digit quadrature of the inverse transform.
TEST_CASE("kernel values against frozen high-precision quadrature") {
  const auto half = OperatorParams::make(0.5);
  const std::vector<double> x = {0.0, 1.5};
  const auto f = heat_kernel_fourier(half, 1, 1.0, x);
  const auto s = heat_kernel_subordination(half, 1, 1.0, x);
  CHECK(f.values[0] == doctest::Approx(0.173683039442290789).epsilon(1e-9));
  CHECK(f.values[1] == doctest::Approx(0.126356832885916790).epsilon(1e-9));
  CHECK(s.values[0] == doctest::Approx(0.173683039442290789).epsilon(1e-6));
  CHECK(s.values[1] == doctest::Approx(0.126356832885916790).epsilon(1e-6));

  const auto quarter = OperatorParams::make(0.25);
  const std::vector<double> x2 = {0.7};
  CHECK(heat_kernel_fourier(quarter, 1, 0.1, x2).values[0] == doctest::Approx(0.256689411733406451).epsilon(1e-9));
  CHECK(heat_kernel_subordination(quarter, 1, 0.1, x2).values[0] ==
        doctest::Approx(0.256689411733406451).epsilon(1e-6));

  const auto three = OperatorParams::make(0.75);
  const std::vector<double> r = {0.5};
  CHECK(heat_kernel_fourier(three, 2, 1.0, r).values[0] == doctest::Approx(0.0369374692809142247).epsilon(1e-9));
  CHECK(heat_kernel_subordination(three, 2, 1.0, r).values[0] ==
        doctest::Approx(0.0369374692809142247).epsilon(1e-6));
}

TEST_CASE("fractional heat kernel") {
  SUBCASE("frozen values") {
    CHECK(fractional_heat_kernel(1, 0.25, 1.0, 1.0) == doctest::Approx(0.0861071469126041202).epsilon(1e-9));
    CHECK(fractional_heat_kernel(1, 0.75, 1.0, 2.0) == doctest::Approx(0.0845396231261375201).epsilon(1e-9));
  }
  SUBCASE("Poisson kernel at s = 1/2") {
    for (double tau : {0.1, 1.0, 7.0})
      for (double r : {0.0, 0.3, 5.0, 80.0}) {
        CHECK(fractional_heat_kernel(1, 0.5, tau, r) == doctest::Approx(tau / (kPi * (tau * tau + r * r))).epsilon(1e-12));
        CHECK(fractional_heat_kernel(2, 0.5, tau, r) ==
              doctest::Approx(tau / (2 * kPi * std::pow(tau * tau + r * r, 1.5))).epsilon(1e-12));
      }
  }
  SUBCASE("scaling law H_tau(r) = tau^{-d/2s} H_1(r tau^{-1/2s})") {
    for (int dim : {1, 2})
      for (double s : {0.3, 0.75}) {
        const double tau = 8.0, sc = std::pow(tau, 1.0 / (2 * s));
        for (double r : {0.0, 1.0, 20.0}) {
          const double lhs = fractional_heat_kernel(dim, s, tau, r);
          const double rhs = std::pow(sc, -dim) * fractional_heat_kernel(dim, s, 1.0, r / sc);
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
      }
  }
  SUBCASE("unit mass") {
    for (double s : {0.25, 0.5, 0.75}) CHECK(fractional_kernel_mass(1, s, 1.0, 30.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double s : {0.5, 0.75}) CHECK(fractional_kernel_mass(2, s, 1.0, 30.0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("positivity and tables") {
    for (double r : linspace(0.0, 100.0, 101)) CHECK(fractional_heat_kernel(1, 0.35, 1.0, r) > 0.0);
    CHECK(fractional_table_cache_size() > 0);
  }
  SUBCASE("concurrent evaluation matches serial evaluation") {
    const std::vector<double> ss = {0.2, 0.45, 0.65, 0.85};
    std::vector<double> par(ss.size() * 20), ser(ss.size() * 20);
#pragma omp parallel for
    for (int i = 0; i < static_cast<int>(par.size()); ++i)
      par[i] = fractional_heat_kernel(1, ss[i / 20], 1.0, 0.5 * (i % 20));
    for (std::size_t i = 0; i < ser.size(); ++i) ser[i] = fractional_heat_kernel(1, ss[i / 20], 1.0, 0.5 * (i % 20));
    CHECK(par == ser);
  }
}

TEST_CASE("cross-route agreement") {
  const auto x = linspace(-50.0, 50.0, 161);
  SUBCASE("s = 1/2, d = 1") {
    for (double t : {0.1, 1.0, 10.0}) {
      const auto p = OperatorParams::make(0.5);
      const auto f = heat_kernel_fourier(p, 1, t, x);
      const auto s = heat_kernel_subordination(p, 1, t, x);
      CHECK(max_relative_difference(f.values, s.values) < 1e-6);
    }
  }
  SUBCASE("general s, d = 1") {
    for (double s : {0.25, 0.75}) {
      const auto p = OperatorParams::make(s);
      CHECK(max_relative_difference(heat_kernel_fourier(p, 1, 1.0, x).values,
                                    heat_kernel_subordination(p, 1, 1.0, x).values) < 1e-4);
    }
  }
  SUBCASE("s = 3/4, d = 2") {
    const auto r = linspace(0.0, 25.0, 51);
    const auto p = OperatorParams::make(0.75);
    CHECK(max_relative_difference(heat_kernel_fourier(p, 2, 1.0, r).values,
                                  heat_kernel_subordination(p, 2, 1.0, r).values) < 1e-4);
  }
}

TEST_CASE("kernel positivity") {
  const auto x = linspace(0.0, 40.0, 161);
  for (double s : {0.25, 0.5, 0.9}) {
    const auto k = heat_kernel_fourier(OperatorParams::make(s), 1, 0.5, x);
    double peak = 0.0;
    for (double v : k.values) peak = std::max(peak, v);
    for (double v : k.values) CHECK(v >= -1e-9 * peak);
  }
}

// P_t(0) = (4 pi t)^{-1/2} erfcx(sqrt(t) / 2) for s = 1/2, a = b = 1.
TEST_CASE("small-time peak follows the local Gaussian") {
  const std::vector<double> x0 = {0.0};
  const auto p = OperatorParams::make(0.5);
  for (double t : {1e-3, 1e-2}) {
    const double peak = heat_kernel_subordination(p, 1, t, x0).values[0];
    const double gauss = 1.0 / std::sqrt(4 * kPi * t);
    const double z = std::sqrt(t) / 2.0;
    CHECK(peak / gauss == doctest::Approx(std::exp(z * z) * std::erfc(z)).epsilon(1e-7));
    if (t <= 1e-3) CHECK(std::abs(peak / gauss - 1.0) < 0.02);
  }
}

TEST_CASE("subordination kernel carries unit mass") {
  const auto p = OperatorParams::make(0.5);
  const double t = 1.0, X = 200.0;
  // Kernel is even; integrate [0, X] twice.
  std::vector<double> xs;
  auto seg = [&](double a, double b, int n) {
    for (int i = 0; i <= n; ++i) xs.push_back(a + (b - a) * i / n);
  };
  seg(0.0, 10.0, 500);
  seg(10.0, X, 760);
  const auto k = heat_kernel_subordination(p, 1, t, xs);
  CHECK(k.converged);
  auto simpson_run = [&](std::size_t first, int n, double h) {
    double acc = k.values[first] + k.values[first + n];
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * k.values[first + i];
    return acc * h / 3.0;
  };
  const double inner = simpson_run(0, 500, 10.0 / 500) + simpson_run(501, 760, (X - 10.0) / 760);
  // Far field beyond X: the Poisson tail of H, 1 - (2/pi) atan(X / bt).
  const double mass = 2.0 * inner + 1.0 - 2.0 / kPi * std::atan(X / (p.b * t));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("grid kernel has exactly unit mass") {
  const Grid g = Grid::make(1, 1024, 40.0);
  const MixedOperator op(OperatorParams::make(0.5), g);
  const Field imp = make_datum(g, {DatumKind::delta});
  for (double t : {0.01, 1.0, 100.0}) {
    const Field k = op.apply_semigroup(t, imp);
    double mass = 0.0;
    for (double v : k.values) mass += v * g.cell_volume();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("argument checks and CSV export") {
  const auto p = OperatorParams::make(0.5);
  const std::vector<double> x = {0.0, 1.0};
  CHECK_THROWS_AS(heat_kernel_fourier(p, 1, 0.0, x), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel_subordination(p, 1, -1.0, x), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel_subordination(OperatorParams::make(0.5, 0.0, 1.0), 1, 1.0, x), std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel_fourier(p, 3, 1.0, x), std::invalid_argument);

  std::ostringstream os;
  const std::vector<double> a = {0.5, 0.25}, b = {0.5, 0.125};
  write_kernel_csv(os, x, a, b);
  CHECK(os.str() == "x,kernel_fourier,kernel_subordination,abs_diff\n0,0.5,0.5,0\n1,0.25,0.125,0.125\n");
}
