#include "mlheat/orlicz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mlheat/parallel.hpp"

namespace mlheat {
namespace {

constexpr double kExpCap = 700.0;
constexpr double kSlack = 1e-9;

// Young integral expressed through a_j = |u_j|^p and mu = lambda^{-p}, so the
// bisection never recomputes powers.
struct PowerSamples {
  std::vector<double> a;
  double a_max = 0.0;
  double cell_volume = 1.0;

  PowerSamples(const Field& u, double p) : a(u.size()), cell_volume(u.grid.cell_volume()) {
    kernels::map(u.values, a, [p](double v) {
      const double x = std::abs(v);
      return p == 2.0 ? x * x : std::pow(x, p);
    });
    a_max = kernels::max_abs(a);
  }

  double integral(YoungKind kind, double mu) const {
    if (kind == YoungKind::power) return kernels::abs_sum(a) * mu * cell_volume;
    if (a_max * mu > kExpCap) return kInf;
    return kernels::exp_young_sum(a, mu, kind == YoungKind::exp_lp_reduced) * cell_volume;
  }
};

}  // namespace

YoungFunction YoungFunction::make(YoungKind kind, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("young function: p must be >= 1");
  return YoungFunction{kind, p};
}

double YoungFunction::operator()(double tau) const {
  const double x = std::pow(std::abs(tau), p);
  switch (kind) {
    case YoungKind::power:
      return x;
    case YoungKind::exp_lp:
      return x > kExpCap ? kInf : std::expm1(x);
    case YoungKind::exp_lp_reduced:
      return x > kExpCap ? kInf : kernels::expm1_minus_x(x);
  }
  return 0.0;
}

std::string to_string(YoungKind kind) {
  switch (kind) {
    case YoungKind::exp_lp:
      return "exp_lp";
    case YoungKind::exp_lp_reduced:
      return "exp_lp_reduced";
    case YoungKind::power:
      return "power";
  }
  return "";
}

YoungKind young_kind_from_string(const std::string& name) {
  if (name == "exp_lp") return YoungKind::exp_lp;
  if (name == "exp_lp_reduced") return YoungKind::exp_lp_reduced;
  if (name == "power") return YoungKind::power;
  throw std::invalid_argument("unknown Young function kind '" + name + "'");
}

double young_integral(const Field& u, const YoungFunction& phi, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("young_integral: lambda must be positive");
  const PowerSamples ps(u, phi.p);
  return ps.integral(phi.kind, std::pow(lambda, -phi.p));
}

OrliczNorm luxemburg_norm(const Field& u, const YoungFunction& phi) {
  const double u_max = kernels::max_abs(u.values);
  if (!std::isfinite(u_max)) throw std::invalid_argument("luxemburg_norm: field is not finite");
  if (u_max == 0.0) return {};

  const PowerSamples ps(u, phi.p);
  auto F = [&](double lambda) { return ps.integral(phi.kind, std::pow(lambda, -phi.p)); };

  // Scale from the single-cell closed form; F(lo) = +inf by the overflow guard.
  double lo = 1e-300;
  double hi = 2.0 * u_max * std::pow(std::log1p(1.0 / ps.cell_volume), -1.0 / phi.p);
  double f_hi = F(hi);
  while (f_hi > 1.0) {
    lo = hi;
    hi *= 2.0;
    f_hi = F(hi);
  }
  while (hi / lo > 2.0) {
    const double mid = std::sqrt(lo * hi);
    const double f = F(mid);
    if (f > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = F(mid);
    if (f > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  return {hi, f_hi, hi - lo};
}

double exp_norm(const Field& u, double p) {
  return luxemburg_norm(u, YoungFunction::make(YoungKind::exp_lp, p)).value;
}

InequalityCheck check_embedding_lq_linf(const Field& u, double p, double q) {
  if (!(q >= 1.0) || q > p) throw std::invalid_argument("check_embedding_lq_linf: need 1 <= q <= p");
  InequalityCheck c;
  c.lhs = exp_norm(u, p);
  c.rhs = std::pow(std::numbers::ln2, -1.0 / p) * (lq_norm(u, q) + lq_norm(u, kInf));
  c.holds = c.lhs <= c.rhs + kSlack;
  return c;
}

InequalityCheck check_embedding_lq(const Field& u, double p, double q) {
  if (!(p >= 1.0) || q < p) throw std::invalid_argument("check_embedding_lq: need q >= p >= 1");
  InequalityCheck c;
  c.lhs = lq_norm(u, q);
  c.rhs = std::pow(std::tgamma(q / p + 1.0), 1.0 / q) * exp_norm(u, p);
  c.holds = c.lhs <= c.rhs + kSlack;
  return c;
}

SmallBallCheck check_small_ball(const Field& u, double p, double q, double lambda) {
  if (!(q >= 1.0)) throw std::invalid_argument("check_small_ball: q must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("check_small_ball: lambda must be positive");
  SmallBallCheck c;
  c.k = exp_norm(u, p);
  const double gate = lambda * q * std::pow(c.k, p);
  c.applicable = gate <= 1.0;
  if (!c.applicable) return c;
  Field g(u.grid);
  kernels::map(u.values, g.values,
               [&](double v) { return std::expm1(lambda * std::pow(std::abs(v), p)); });
  c.lhs = lq_norm(g, q);
  c.rhs = std::pow(gate, 1.0 / q);
  c.holds = c.lhs <= c.rhs + kSlack;
  return c;
}

NormEquivalence check_norm_equivalence(const Field& u, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("check_norm_equivalence: p must be > 1");
  NormEquivalence e;
  e.exp_norm = exp_norm(u, p);
  e.sum_norm =
      lq_norm(u, p) + luxemburg_norm(u, YoungFunction::make(YoungKind::exp_lp_reduced, p)).value;
  e.ratio = e.exp_norm == 0.0 ? 1.0 : e.sum_norm / e.exp_norm;
  return e;
}

}  // namespace mlheat
