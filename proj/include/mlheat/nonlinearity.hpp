#pragma once

#include <cstdint>
#include <string>

#include "mlheat/grid.hpp"

namespace mlheat {

/// exponential: f(u) = sign |u|^{m-1} u e^{lambda |u|^p};
/// pure_power:  f(u) = sign |u|^{m-1} u;
/// none:        f = 0 (linear problem).
enum class NonlinearityMode { exponential, pure_power, none };

std::string to_string(NonlinearityMode mode);
/// Throws std::invalid_argument for unknown names.
NonlinearityMode nonlinearity_mode_from_string(const std::string& name);

struct NonlinearitySpec {
  double m = 3.0;
  double p = 2.0;
  double lambda = 1.0;
  int sign = 1;
  NonlinearityMode mode = NonlinearityMode::exponential;

  /// Throws std::invalid_argument unless m >= 1, p > 1, lambda >= 0, sign = +-1.
  static NonlinearitySpec make(double m, double p, double lambda, int sign,
                               NonlinearityMode mode = NonlinearityMode::exponential);
};

/// Exponent beyond which eval returns the +-inf sentinel.
inline constexpr double kSentinelExponent = 700.0;

/// f(u). Returns +-inf when lambda |u|^p > 700.
double eval(const NonlinearitySpec& spec, double u);

struct FieldEval {
  Field values;
  std::size_t sentinel_cells = 0;
};
FieldEval eval_field(const NonlinearitySpec& spec, const Field& u);
/// In-place variant used by the integrators; returns the sentinel count.
std::size_t eval_into(const NonlinearitySpec& spec, std::span<const double> u, std::span<double> out);

struct Certificate {
  double c_hat = 0.0;          ///< max sampled ratio |f(u)-f(v)| / majorant
  std::size_t violations = 0;  ///< pairs with ratio >= 1e6 or not finite
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Samples (u, v) uniformly from [lo, hi]^2 and measures the ratio against
/// |u - v| (e^{lambda|u|^p} + e^{lambda|v|^p}). The diagonal u = v is
/// skipped. Throws for sample_count < 1e4 or lo >= hi.
Certificate certify_exp_lipschitz(const NonlinearitySpec& spec, std::size_t sample_count,
                                 double lo, double hi, std::uint64_t seed = 20240601);
/// Same against |u - v| (|u|^{m-1} e^{lambda|u|^p} + |v|^{m-1} e^{lambda|v|^p}).
Certificate certify_power_exp_lipschitz(const NonlinearitySpec& spec, std::size_t sample_count,
                                 double lo, double hi, std::uint64_t seed = 20240601);

}  // namespace mlheat
