#include "mlheat/mixed_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mlheat/parallel.hpp"
#include "mlheat/transform.hpp"

namespace mlheat {

OperatorParams OperatorParams::make(double s, double a, double b) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("operator: s must lie in (0, 1)");
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("operator: a, b must be >= 0");
  if (!(a + b > 0.0)) throw std::invalid_argument("operator: a + b must be > 0");
  return OperatorParams{s, a, b};
}

double normalization_constant(int dim, double s) {
  const double d = dim;
  return s * std::pow(4.0, s) * std::tgamma(0.5 * (d + 2.0 * s)) /
         (std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(1.0 - s));
}

double symbol(const OperatorParams& params, double xi_abs) {
  if (xi_abs == 0.0) return 0.0;
  const double xi = std::abs(xi_abs);
  return params.a * xi * xi + params.b * std::exp(2.0 * params.s * std::log(xi));
}

double t_s(double t, double s) { return t <= 1.0 ? std::pow(t, s) : t; }

TsValue TsValue::make(double t, double s) {
  if (!(t > 0.0)) throw std::invalid_argument("t_s: t must be positive");
  return TsValue{t, mlheat::t_s(t, s)};
}

MixedOperator::MixedOperator(const OperatorParams& params, const Grid& grid)
    : params_(params), grid_(grid), symbols_(grid.size()) {
  for (std::size_t k = 0; k < grid.size(); ++k) symbols_[k] = symbol(params, grid.wave_magnitude(k));
  max_symbol_ = *std::max_element(symbols_.begin(), symbols_.end());
}

void MixedOperator::apply_semigroup(double t, SpectralField& u) const {
  if (!(t > 0.0)) throw std::invalid_argument("apply_semigroup: t must be positive");
  if (!(u.grid == grid_)) throw std::invalid_argument("apply_semigroup: grid mismatch");
  std::vector<double> mult(symbols_.size());
  kernels::exp_multiplier(symbols_, t, mult);
  kernels::multiply(u.coeffs, mult);
}

Field MixedOperator::apply_semigroup(double t, const Field& u) const {
  SpectralField sf = forward(u);
  apply_semigroup(t, sf);
  return inverse(sf);
}

Field apply_semigroup(const OperatorParams& params, double t, const Field& u) {
  return MixedOperator(params, u.grid).apply_semigroup(t, u);
}

LqLrTable verify_lq_lr(const OperatorParams& params, double q, double r,
                       std::span<const double> t_list, const Field& probe) {
  if (!(q >= 1.0)) throw std::invalid_argument("verify_lq_lr: q must be >= 1");
  if (q > r) throw std::invalid_argument("verify_lq_lr: need q <= r");
  const double probe_q = lq_norm(probe, q);
  if (probe_q == 0.0) throw std::invalid_argument("verify_lq_lr: zero probe");

  const int d = probe.grid.dim();
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double exponent = -(d / (2.0 * params.s)) * (1.0 / q - inv_r);

  MixedOperator op(params, probe.grid);
  Transformer tr(probe.grid);
  std::vector<std::complex<double>> base(probe.grid.size()), work(probe.grid.size());
  std::vector<double> mult(probe.grid.size());
  Field out(probe.grid);
  tr.forward(probe.values, base);

  LqLrTable table{q, r, probe_q, {}, 0.0};
  for (double t : t_list) {
    if (!(t > 0.0)) throw std::invalid_argument("verify_lq_lr: t must be positive");
    kernels::exp_multiplier(op.symbols(), t, mult);
    std::copy(base.begin(), base.end(), work.begin());
    kernels::multiply(work, mult);
    tr.inverse(work, out.values);
    const double ts = t_s(t, params.s);
    const double env = std::pow(ts, exponent) * probe_q;
    const double nr = lq_norm(out, r);
    table.rows.push_back({t, ts, nr, env, nr / env});
    table.sup_ratio = std::max(table.sup_ratio, nr / env);
  }
  return table;
}

}  // namespace mlheat
