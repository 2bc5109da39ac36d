#pragma once

#include <span>
#include <vector>

#include "mlheat/grid.hpp"

namespace mlheat {

/// L = -a*Lap + b*(-Lap)^s, Fourier symbol m(xi) = a|xi|^2 + b|xi|^{2s}.
struct OperatorParams {
  double s = 0.5;
  double a = 1.0;
  double b = 1.0;

  /// Throws std::invalid_argument unless 0 < s < 1, a >= 0, b >= 0, a + b > 0.
  static OperatorParams make(double s, double a = 1.0, double b = 1.0);
};

/// C_{d,s} = s 4^s Gamma((d+2s)/2) / (pi^{d/2} Gamma(1-s)), the constant in
/// front of the singular integral defining (-Lap)^s.
double normalization_constant(int dim, double s);

/// m(|xi|); |xi|^{2s} is evaluated as exp(2s log|xi|) with xi = 0 mapped to 0.
double symbol(const OperatorParams& params, double xi_abs);

/// t_s = max(t^s, t).
struct TsValue {
  double t;
  double t_s;
  static TsValue make(double t, double s);
};
double t_s(double t, double s);

/// Operator bound to a grid: caches m(xi_k) for every stored wave vector.
class MixedOperator {
 public:
  MixedOperator(const OperatorParams& params, const Grid& grid);

  const OperatorParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  std::span<const double> symbols() const { return symbols_; }
  double max_symbol() const { return max_symbol_; }
  /// True when exp(-t m) is negligible at the grid cutoff, i.e. the discrete
  /// multiplier kernel is a sampled positive kernel (t * max m >= 40).
  bool resolves(double t) const { return t * max_symbol_ >= 40.0; }

  /// u <- exp(-t L) u. Throws std::invalid_argument for t <= 0.
  void apply_semigroup(double t, SpectralField& u) const;
  Field apply_semigroup(double t, const Field& u) const;

 private:
  OperatorParams params_;
  Grid grid_;
  std::vector<double> symbols_;
  double max_symbol_ = 0.0;
};

Field apply_semigroup(const OperatorParams& params, double t, const Field& u);

struct LqLrRow {
  double t;
  double t_s;
  double norm_r;    ///< ||exp(-tL) probe||_r
  double envelope;  ///< t_s^{-(d/2s)(1/q - 1/r)} ||probe||_q
  double ratio;     ///< norm_r / envelope
};

struct LqLrTable {
  double q;
  double r;
  double probe_norm_q;
  std::vector<LqLrRow> rows;
  double sup_ratio;
};

/// Tabulates ||exp(-tL) probe||_r against the L^q-L^r envelope for each t.
/// Throws std::invalid_argument if q > r, q < 1, or the probe is zero.
LqLrTable verify_lq_lr(const OperatorParams& params, double q, double r,
                       std::span<const double> t_list, const Field& probe);

}  // namespace mlheat
