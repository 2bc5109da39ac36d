#include "mlheat/heat_kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>
#include <stdexcept>
#include <utility>

namespace mlheat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRefineTol = 1e-9;
constexpr double kPeakFloor = 1e-6;
constexpr int kMaxRefinements = 7;

// 20-point Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> x, w;
};

const Rule& gl20() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, 20>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
      if (a[i] != 0.0) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
      }
    }
    return r;
  }();
  return rule;
}

struct Nodes {
  std::vector<double> x, w;
};

// Appends GL nodes for each panel between consecutive breakpoints, each
// panel split into 2^level equal pieces.
Nodes panel_nodes(const std::vector<double>& breaks, int level) {
  const Rule& r = gl20();
  Nodes out;
  const int split = 1 << level;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double h = (breaks[i + 1] - breaks[i]) / split;
    if (!(h > 0.0)) continue;
    for (int k = 0; k < split; ++k) {
      const double a = breaks[i] + k * h;
      for (std::size_t j = 0; j < r.x.size(); ++j) {
        out.x.push_back(a + 0.5 * h * (r.x[j] + 1.0));
        out.w.push_back(0.5 * h * r.w[j]);
      }
    }
  }
  return out;
}

// Geometric breakpoints lo*2^-k down to lo*2^-depth, then 0.
void add_graded_origin(std::vector<double>& breaks, double lo, int depth) {
  breaks.push_back(0.0);
  for (int k = depth; k >= 1; --k) breaks.push_back(std::ldexp(lo, -k));
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double peak = 0.0;
  for (double v : b) peak = std::max(peak, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(b[i]), kPeakFloor * peak);
    if (denom > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Runs eval(level) for increasing level until successive values agree.
template <class Eval>
KernelEvaluation refine(Eval&& eval) {
  KernelEvaluation out;
  out.values = eval(0);
  for (int level = 1; level <= kMaxRefinements; ++level) {
    std::vector<double> next = eval(level);
    out.error_estimate = max_change(out.values, next);
    out.values = std::move(next);
    out.refinements = level;
    if (out.error_estimate < kRefineTol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

void check_args(int dim, double t) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("heat kernel: dim must be 1 or 2");
  if (!(t > 0.0)) throw std::invalid_argument("heat kernel: t must be positive");
}

double max_abs_point(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// e^{-z} I_0(z), with the large-argument expansion past the overflow range.
double i0e(double z) {
  if (z < 700.0) return std::cyl_bessel_i(0.0, z) * std::exp(-z);
  const double u = 1.0 / (8.0 * z);
  return (1.0 + u * (1.0 + u * (4.5 + u * (37.5 + u * 459.375)))) / std::sqrt(2.0 * kPi * z);
}

// ---------------------------------------------------------------------------
// Fractional heat kernel, scale-free form h_d(z) = H_1^s(z).

// Large-z series of the isotropic stable density (convergent for 2s < 1,
// asymptotic otherwise): h(z) = pi^{-d/2-1} z^{-d} sum_k c_k (2/z)^{2sk}.
// With `tail` set, returns int_{|y|>z} h instead (termwise integration).
// Returns NaN when the series cannot reach full accuracy at this z.
double stable_series(int dim, double s, double z, bool tail = false) {
  const double alpha = 2.0 * s;
  const double d = dim;
  double sum = 0.0, biggest = 0.0, last = kInf;
  for (int k = 1; k <= 200; ++k) {
    double lg = std::lgamma(0.5 * (alpha * k + d)) + std::lgamma(0.5 * alpha * k + 1.0) -
                std::lgamma(k + 1.0) - alpha * k * std::log(0.5 * z);
    if (tail) lg -= std::log(alpha * k);
    const double sn = std::sin(kPi * alpha * k * 0.5);
    const double mag = std::exp(lg);
    if (mag > last && mag > 1e-17 * std::abs(sum)) return std::nan("");
    last = mag;
    sum += ((k % 2 == 1) ? 1.0 : -1.0) * sn * mag;
    biggest = std::max(biggest, mag);
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  if (biggest > 1e3 * std::abs(sum)) return std::nan("");
  const double sphere = dim == 1 ? 2.0 : 2.0 * kPi;
  if (tail) return sphere * sum / std::pow(kPi, 0.5 * d + 1.0);
  return sum / (std::pow(kPi, 0.5 * d + 1.0) * std::pow(z, d));
}

double h_origin(int dim, double s) {
  // h(0) = (1/pi) Gamma(1 + 1/2s) in d = 1; Gamma(1 + 1/s) / (4 pi) in d = 2.
  if (dim == 1) return std::tgamma(1.0 + 0.5 / s) / kPi;
  return std::tgamma(1.0 + 1.0 / s) / (4.0 * kPi);
}

double h_quadrature_1d(double s, double z) {
  static thread_local boost::math::quadrature::ooura_fourier_cos<double> integ(1e-13, 8);
  auto f = [s](double e) { return std::exp(-std::pow(e, 2.0 * s)); };
  return integ.integrate(f, z).first / kPi;
}

double h_quadrature_2d(double s, double z) {
  // (1/2pi) int_0^emax exp(-eta^{2s}) J0(eta z) eta d eta; emax where eta^{2s} = 42.
  const double emax = std::pow(42.0, 0.5 / s);
  const double width = std::min(emax / 64.0, 2.0 * kPi / std::max(z, 1e-300));
  std::vector<double> breaks;
  add_graded_origin(breaks, std::min(width, 1.0), 30);
  for (double e = std::min(width, 1.0) + width; e < emax; e += width) breaks.push_back(e);
  breaks.push_back(emax);
  const Nodes nd = panel_nodes(breaks, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < nd.x.size(); ++i) {
    const double e = nd.x[i];
    sum += nd.w[i] * std::exp(-std::pow(e, 2.0 * s)) * std::cyl_bessel_j(0.0, e * z) * e;
  }
  return sum / (2.0 * kPi);
}

double h_direct(int dim, double s, double z) {
  z = std::abs(z);
  if (s == 0.5) {
    if (dim == 1) return 1.0 / (kPi * (1.0 + z * z));
    return 1.0 / (2.0 * kPi * std::pow(1.0 + z * z, 1.5));
  }
  if (z == 0.0) return h_origin(dim, s);
  if (z > 4.0) {
    const double v = stable_series(dim, s, z);
    if (std::isfinite(v)) return v;
  }
  return dim == 1 ? h_quadrature_1d(s, z) : h_quadrature_2d(s, z);
}

// Piecewise Chebyshev table of h on [0, z_max], 16 nodes per panel,
// geometric panels (ratio 1.25) from 2^-20 upwards.
class HTable {
 public:
  HTable(int dim, double s, double z_max) : z_max_(z_max) {
    constexpr int kNodes = 16;
    breaks_.push_back(0.0);
    for (double z = std::ldexp(1.0, -20); z < z_max; z *= 1.25) breaks_.push_back(z);
    breaks_.push_back(z_max * 1.25);
    for (int j = 0; j < kNodes; ++j) {
      cheb_.push_back(std::cos(kPi * (2.0 * j + 1.0) / (2.0 * kNodes)));
      bary_.push_back(((j % 2 == 0) ? 1.0 : -1.0) * std::sin(kPi * (2.0 * j + 1.0) / (2.0 * kNodes)));
    }
    values_.resize((breaks_.size() - 1) * kNodes);
    for (std::size_t p = 0; p + 1 < breaks_.size(); ++p)
      for (int j = 0; j < kNodes; ++j)
        values_[p * kNodes + j] = h_direct(dim, s, node(p, j));
  }

  double z_max() const { return z_max_; }

  double operator()(double z) const {
    z = std::abs(z);
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), z);
    std::size_t p = static_cast<std::size_t>(it - breaks_.begin());
    p = p == 0 ? 0 : std::min(p - 1, breaks_.size() - 2);
    const double a = breaks_[p], b = breaks_[p + 1];
    const double u = (2.0 * z - a - b) / (b - a);
    const std::size_t k = cheb_.size();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double diff = u - cheb_[j];
      if (diff == 0.0) return values_[p * k + j];
      const double c = bary_[j] / diff;
      num += c * values_[p * k + j];
      den += c;
    }
    return num / den;
  }

 private:
  double node(std::size_t p, int j) const {
    const double a = breaks_[p], b = breaks_[p + 1];
    return 0.5 * (a + b) + 0.5 * (b - a) * cheb_[static_cast<std::size_t>(j)];
  }

  double z_max_;
  std::vector<double> breaks_, cheb_, bary_, values_;
};

std::shared_mutex table_mu;
std::map<std::pair<int, double>, std::shared_ptr<const HTable>> tables;

std::shared_ptr<const HTable> h_table(int dim, double s, double z_max) {
  const auto key = std::make_pair(dim, s);
  {
    std::shared_lock lock(table_mu);
    if (auto it = tables.find(key); it != tables.end() && it->second->z_max() >= z_max)
      return it->second;
  }
  auto table = std::make_shared<const HTable>(dim, s, std::max(2.0 * z_max, 64.0));
  std::unique_lock lock(table_mu);
  auto& slot = tables[key];
  if (!slot || slot->z_max() < table->z_max()) slot = table;
  return slot;
}

// H_tau(r) = tau^{-d/2s} h(r tau^{-1/2s}), via the table for general s.
class FractionalKernel {
 public:
  FractionalKernel(int dim, double s, double tau, double r_max)
      : dim_(dim), s_(s), scale_(std::pow(tau, 0.5 / s)) {
    amp_ = std::pow(scale_, -static_cast<double>(dim));
    if (s != 0.5) table_ = h_table(dim, s, r_max / scale_);
  }
  double scale() const { return scale_; }
  double operator()(double r) const {
    const double z = r / scale_;
    const bool tabulated = table_ && z <= table_->z_max();
    return amp_ * (tabulated ? (*table_)(z) : h_direct(dim_, s_, z));
  }

 private:
  int dim_;
  double s_;
  double scale_;
  double amp_ = 1.0;
  std::shared_ptr<const HTable> table_;
};

}  // namespace

// ---------------------------------------------------------------------------

KernelEvaluation heat_kernel_fourier(const OperatorParams& params, int dim, double t,
                                     std::span<const double> x_points) {
  check_args(dim, t);
  // Cutoff where t*m(xi) = 50.
  double hi = 1.0;
  while (t * symbol(params, hi) < 50.0) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t * symbol(params, mid) < 50.0 ? lo : hi) = mid;
  }
  const double xi_max = hi;
  const double x_max = max_abs_point(x_points);
  const double width = std::min(xi_max / 16.0, 4.0 * kPi / std::max(x_max, 1e-300));

  std::vector<double> breaks;
  add_graded_origin(breaks, width, 40);
  for (double xi = width; xi < xi_max; xi += width) breaks.push_back(xi);
  breaks.push_back(xi_max);

  const std::vector<double> pts(x_points.begin(), x_points.end());
  auto eval = [&](int level) {
    Nodes nd = panel_nodes(breaks, level);
    for (std::size_t i = 0; i < nd.x.size(); ++i) {
      nd.w[i] *= std::exp(-t * symbol(params, nd.x[i]));
      if (dim == 2) nd.w[i] *= nd.x[i];
    }
    std::vector<double> out(pts.size());
    const double pre = dim == 1 ? 1.0 / kPi : 1.0 / (2.0 * kPi);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(pts.size()); ++j) {
      const double x = std::abs(pts[static_cast<std::size_t>(j)]);
      double sum = 0.0;
      if (dim == 1) {
        for (std::size_t i = 0; i < nd.x.size(); ++i) sum += nd.w[i] * std::cos(nd.x[i] * x);
      } else {
        for (std::size_t i = 0; i < nd.x.size(); ++i)
          sum += nd.w[i] * std::cyl_bessel_j(0.0, nd.x[i] * x);
      }
      out[static_cast<std::size_t>(j)] = pre * sum;
    }
    return out;
  };
  return refine(eval);
}

KernelEvaluation heat_kernel_subordination(const OperatorParams& params, int dim, double t,
                                           std::span<const double> x_points) {
  check_args(dim, t);
  if (!(params.a > 0.0 && params.b > 0.0))
    throw std::invalid_argument("heat_kernel_subordination: requires a > 0 and b > 0");
  const double at = params.a * t;
  const double window = 14.1 * std::sqrt(at);
  const double h_gauss = 0.5 * std::sqrt(2.0 * at);
  const double x_max = max_abs_point(x_points);
  const FractionalKernel H(dim, params.s, params.b * t, x_max + window);
  const double sh = H.scale();
  const double near = 10.0 * sh;
  const double h_near = std::min(h_gauss, 0.25 * sh);

  // Breakpoints over [lo, hi]: Gaussian-scale panels, finer near the origin
  // where H varies on its own scale, geometrically graded into r = 0.
  auto breakpoints = [&](double lo, double hi) {
    std::vector<double> b;
    for (double y = lo; y < hi; y += h_gauss) b.push_back(y);
    const double nlo = std::max(lo, -near), nhi = std::min(hi, near);
    for (double y = nlo; y < nhi; y += h_near) b.push_back(y);
    if (lo < 0.0 && hi > 0.0) {
      for (int k = 0; k <= 30; ++k) {
        const double g = std::ldexp(h_near, -k);
        b.push_back(g);
        b.push_back(-g);
      }
      b.push_back(0.0);
    } else if (lo == 0.0) {
      for (int k = 0; k <= 30; ++k) b.push_back(std::ldexp(h_near, -k));
    }
    b.push_back(hi);
    std::sort(b.begin(), b.end());
    b.erase(std::remove_if(b.begin(), b.end(), [&](double y) { return y < lo || y > hi; }),
            b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  };

  const std::vector<double> pts(x_points.begin(), x_points.end());
  auto eval = [&](int level) {
    std::vector<double> out(pts.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(pts.size()); ++j) {
      const double x = std::abs(pts[static_cast<std::size_t>(j)]);
      double sum = 0.0;
      if (dim == 1) {
        const Nodes nd = panel_nodes(breakpoints(x - window, x + window), level);
        for (std::size_t i = 0; i < nd.x.size(); ++i) {
          const double z = x - nd.x[i];
          sum += nd.w[i] * std::exp(-z * z / (4.0 * at)) * H(nd.x[i]);
        }
        sum /= std::sqrt(4.0 * kPi * at);
      } else {
        const Nodes nd = panel_nodes(breakpoints(std::max(0.0, x - window), x + window), level);
        for (std::size_t i = 0; i < nd.x.size(); ++i) {
          const double r = nd.x[i];
          const double z = x - r;
          sum += nd.w[i] * r * H(r) * std::exp(-z * z / (4.0 * at)) * i0e(x * r / (2.0 * at));
        }
        sum /= 2.0 * at;
      }
      out[static_cast<std::size_t>(j)] = sum;
    }
    return out;
  };
  return refine(eval);
}

double fractional_heat_kernel(int dim, double s, double tau, double r) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("fractional kernel: dim must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional kernel: s must lie in (0, 1)");
  if (!(tau > 0.0)) throw std::invalid_argument("fractional kernel: tau must be positive");
  const double scale = std::pow(tau, 0.5 / s);
  return std::pow(scale, -static_cast<double>(dim)) * h_direct(dim, s, r / scale);
}

double fractional_kernel_mass(int dim, double s, double tau, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("fractional_kernel_mass: radius must be positive");
  const FractionalKernel H(dim, s, tau, radius);
  std::vector<double> breaks;
  add_graded_origin(breaks, std::min(radius, H.scale()), 30);
  for (double r = 2.0 * H.scale(); r < radius; r *= 1.25) breaks.push_back(r);
  breaks.push_back(radius);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const Nodes nd = panel_nodes(breaks, 1);
  double inner = 0.0;
  for (std::size_t i = 0; i < nd.x.size(); ++i)
    inner += nd.w[i] * H(nd.x[i]) * (dim == 1 ? 2.0 : 2.0 * kPi * nd.x[i]);
  double tail = stable_series(dim, s, radius / H.scale(), true);
  if (!std::isfinite(tail)) {
    const double sphere = dim == 1 ? 2.0 : 2.0 * kPi;
    tail = sphere * tau * normalization_constant(dim, s) / (2.0 * s * std::pow(radius, 2.0 * s));
  }
  return inner + tail;
}

std::size_t fractional_table_cache_size() {
  std::shared_lock lock(table_mu);
  return tables.size();
}

double max_relative_difference(std::span<const double> a, std::span<const double> b, double floor) {
  if (a.size() != b.size()) throw std::invalid_argument("max_relative_difference: size mismatch");
  double peak = 0.0;
  for (double v : b) peak = std::max(peak, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(b[i]), floor * peak);
    if (denom > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    else if (a[i] != b[i]) worst = kInf;
  }
  return worst;
}

void write_kernel_csv(std::ostream& os, std::span<const double> x, std::span<const double> fourier,
                      std::span<const double> subordination) {
  if (fourier.size() != x.size() || subordination.size() != x.size())
    throw std::invalid_argument("write_kernel_csv: column length mismatch");
  os << "x,kernel_fourier,kernel_subordination,abs_diff\n";
  char buf[128];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x[i], fourier[i], subordination[i],
                  std::abs(fourier[i] - subordination[i]));
    os << buf;
  }
}

}  // namespace mlheat
