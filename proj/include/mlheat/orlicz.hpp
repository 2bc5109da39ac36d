#pragma once

#include <string>

#include "mlheat/grid.hpp"

namespace mlheat {

enum class YoungKind { exp_lp, exp_lp_reduced, power };

/// exp_lp: e^{t^p} - 1;  exp_lp_reduced: e^{t^p} - 1 - t^p;  power: t^p.
struct YoungFunction {
  YoungKind kind = YoungKind::exp_lp;
  double p = 2.0;

  /// Throws std::invalid_argument unless p >= 1.
  static YoungFunction make(YoungKind kind, double p);
  double operator()(double tau) const;
};

std::string to_string(YoungKind kind);
/// Throws std::invalid_argument for unknown names.
YoungKind young_kind_from_string(const std::string& name);

struct OrliczNorm {
  double value = 0.0;
  double achieved_integral = 0.0;  ///< young_integral at `value`
  double bisection_width = 0.0;
};

/// sum_j phi(|u_j| / lambda) * cell_volume. Returns +inf as soon as an
/// exponent t^p would exceed 700. Throws for lambda <= 0.
double young_integral(const Field& u, const YoungFunction& phi, double lambda);

/// inf{lambda > 0 : young_integral(u, phi, lambda) <= 1} by bisection; the
/// returned value is the upper end of the final bracket, so the achieved
/// integral never exceeds 1. Zero fields give value 0.
OrliczNorm luxemburg_norm(const Field& u, const YoungFunction& phi);

/// ||u||_{exp L^p}.
double exp_norm(const Field& u, double p);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// ||u||_{exp L^p} <= (ln 2)^{-1/p} (||u||_q + ||u||_inf), for 1 <= q <= p.
InequalityCheck check_embedding_lq_linf(const Field& u, double p, double q);
/// ||u||_q <= Gamma(q/p + 1)^{1/q} ||u||_{exp L^p}, for q >= p >= 1.
InequalityCheck check_embedding_lq(const Field& u, double p, double q);

struct SmallBallCheck {
  bool applicable = true;  ///< lambda q K^p <= 1 with K = ||u||_{exp L^p}
  double k = 0.0;
  double lhs = 0.0;  ///< ||exp(lambda |u|^p) - 1||_q
  double rhs = 0.0;  ///< (lambda q K^p)^{1/q}
  bool holds = true;
};
SmallBallCheck check_small_ball(const Field& u, double p, double q, double lambda);

struct NormEquivalence {
  double sum_norm = 0.0;  ///< ||u||_p + ||u||_{L^phi}, phi = exp_lp_reduced
  double exp_norm = 0.0;
  double ratio = 1.0;  ///< 1 by convention for u = 0
};
NormEquivalence check_norm_equivalence(const Field& u, double p);

}  // namespace mlheat
