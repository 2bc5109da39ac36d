#include "mlheat/parallel.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlheat::kernels {

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double max_abs(std::span<const double> v) {
  const std::size_t nblocks = (v.size() + kBlock - 1) / kBlock;
  std::vector<double> parts(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, v.size());
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = std::abs(v[i]);
      // NaN must win so callers can detect it.
      if (!(a <= m)) m = a;
    }
    parts[static_cast<std::size_t>(b)] = m;
  }
  double m = 0.0;
  for (double p : parts)
    if (!(p <= m)) m = p;
  return m;
}

double abs_sum(std::span<const double> v) {
  return blocked_sum(v.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::abs(v[i]);
    return s;
  });
}

double power_sum(std::span<const double> v, double q, double scale) {
  const double inv = 1.0 / scale;
  if (q == 2.0) {
    return blocked_sum(v.size(), [&](std::size_t lo, std::size_t hi) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double a = v[i] * inv;
        s += a * a;
      }
      return s;
    });
  }
  return blocked_sum(v.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = std::abs(v[i]) * inv;
      if (a > 0.0) s += std::pow(a, q);
    }
    return s;
  });
}

void exp_multiplier(std::span<const double> symbol, double t, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(symbol.size()); ++i)
    out[static_cast<std::size_t>(i)] = std::exp(-t * symbol[static_cast<std::size_t>(i)]);
}

void multiply(std::span<std::complex<double>> c, std::span<const double> m) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(c.size()); ++i)
    c[static_cast<std::size_t>(i)] *= m[static_cast<std::size_t>(i)];
}

void combine(std::span<std::complex<double>> out, std::span<const double> a,
             std::span<const std::complex<double>> x, std::span<const double> b,
             std::span<const std::complex<double>> y) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(out.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    out[i] = a[i] * x[i] + b[i] * y[i];
  }
}

void accumulate(std::span<std::complex<double>> out, double w, std::span<const double> m,
                std::span<const std::complex<double>> x) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(out.size()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    out[i] += (w * m[i]) * x[i];
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t nblocks = (a.size() + kBlock - 1) / kBlock;
  std::vector<double> parts(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, a.size());
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = std::abs(a[i] - b[i]);
      if (!(d <= m)) m = d;
    }
    parts[static_cast<std::size_t>(blk)] = m;
  }
  double m = 0.0;
  for (double p : parts)
    if (!(p <= m)) m = p;
  return m;
}

double expm1_minus_x(double x) {
  if (std::abs(x) >= 0.1) return std::expm1(x) - x;
  double term = 0.5 * x * x, sum = term;
  for (int k = 3; k <= 14; ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

double exp_young_sum(std::span<const double> a, double mu, bool reduced) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    if (reduced) {
      for (std::size_t i = lo; i < hi; ++i) s += expm1_minus_x(mu * a[i]);
    } else {
      for (std::size_t i = lo; i < hi; ++i) s += std::expm1(mu * a[i]);
    }
    return s;
  });
}

namespace serial {

double exp_young_sum(std::span<const double> a, double mu, bool reduced) {
  double s = 0.0;
  for (double v : a) s += reduced ? expm1_minus_x(mu * v) : std::expm1(mu * v);
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    const double a = std::abs(x);
    if (!(a <= m)) m = a;
  }
  return m;
}

double abs_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double power_sum(std::span<const double> v, double q, double scale) {
  double s = 0.0;
  for (double x : v) {
    const double a = std::abs(x) / scale;
    if (a > 0.0) s += std::pow(a, q);
  }
  return s;
}

void exp_multiplier(std::span<const double> symbol, double t, std::span<double> out) {
  for (std::size_t i = 0; i < symbol.size(); ++i) out[i] = std::exp(-t * symbol[i]);
}

void multiply(std::span<std::complex<double>> c, std::span<const double> m) {
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m[i];
}

void combine(std::span<std::complex<double>> out, std::span<const double> a,
             std::span<const std::complex<double>> x, std::span<const double> b,
             std::span<const std::complex<double>> y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * x[i] + b[i] * y[i];
}

void accumulate(std::span<std::complex<double>> out, double w, std::span<const double> m,
                std::span<const std::complex<double>> x) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (w * m[i]) * x[i];
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (!(d <= m)) m = d;
  }
  return m;
}

}  // namespace serial
}  // namespace mlheat::kernels
