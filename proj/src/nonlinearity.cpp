#include "mlheat/nonlinearity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "mlheat/parallel.hpp"

namespace mlheat {

std::string to_string(NonlinearityMode mode) {
  switch (mode) {
    case NonlinearityMode::exponential:
      return "exponential";
    case NonlinearityMode::pure_power:
      return "pure_power";
    case NonlinearityMode::none:
      return "none";
  }
  return "";
}

NonlinearityMode nonlinearity_mode_from_string(const std::string& name) {
  if (name == "exponential") return NonlinearityMode::exponential;
  if (name == "pure_power") return NonlinearityMode::pure_power;
  if (name == "none") return NonlinearityMode::none;
  throw std::invalid_argument("unknown nonlinearity mode '" + name + "'");
}

NonlinearitySpec NonlinearitySpec::make(double m, double p, double lambda, int sign,
                                        NonlinearityMode mode) {
  if (!(m >= 1.0)) throw std::invalid_argument("nonlinearity: m must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity: p must be > 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("nonlinearity: lambda must be >= 0");
  if (sign != 1 && sign != -1) throw std::invalid_argument("nonlinearity: sign must be +1 or -1");
  return NonlinearitySpec{m, p, lambda, sign, mode};
}

double eval(const NonlinearitySpec& spec, double u) {
  if (spec.mode == NonlinearityMode::none || u == 0.0) return 0.0;
  const double a = std::abs(u);
  const double power = spec.m == 1.0 ? u : (spec.m == 3.0 ? a * a * u : std::pow(a, spec.m - 1.0) * u);
  if (spec.mode == NonlinearityMode::pure_power || spec.lambda == 0.0) return spec.sign * power;
  const double expo = spec.lambda * (spec.p == 2.0 ? a * a : std::pow(a, spec.p));
  if (expo > kSentinelExponent) return u > 0.0 ? spec.sign * kInf : -spec.sign * kInf;
  return spec.sign * power * std::exp(expo);
}

std::size_t eval_into(const NonlinearitySpec& spec, std::span<const double> u, std::span<double> out) {
  kernels::map(u, out, [&](double v) { return eval(spec, v); });
  return static_cast<std::size_t>(kernels::blocked_sum(out.size(), [&](std::size_t lo, std::size_t hi) {
    double n = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      if (!std::isfinite(out[i])) n += 1.0;
    return n;
  }));
}

FieldEval eval_field(const NonlinearitySpec& spec, const Field& u) {
  FieldEval r{Field(u.grid), 0};
  r.sentinel_cells = eval_into(spec, u.values, r.values.values);
  return r;
}

namespace {

template <class Majorant>
Certificate certify(const NonlinearitySpec& spec, std::size_t sample_count, double lo, double hi,
                    std::uint64_t seed, Majorant&& majorant) {
  if (sample_count < 10000) throw std::invalid_argument("certify: sample_count must be >= 1e4");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("certify: degenerate amplitude range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Certificate c{0.0, 0, 0, seed};
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double u = dist(rng);
    const double v = dist(rng);
    if (u == v) continue;
    ++c.samples;
    const double num = std::abs(eval(spec, u) - eval(spec, v));
    const double den = std::abs(u - v) * majorant(u, v);
    const double ratio = num == 0.0 ? 0.0 : num / den;
    if (!std::isfinite(ratio) || ratio >= 1e6) {
      ++c.violations;
      continue;
    }
    c.c_hat = std::max(c.c_hat, ratio);
  }
  return c;
}

double exp_weight(const NonlinearitySpec& spec, double u) {
  if (spec.mode != NonlinearityMode::exponential) return 1.0;
  return std::exp(spec.lambda * std::pow(std::abs(u), spec.p));
}

}  // namespace

Certificate certify_exp_lipschitz(const NonlinearitySpec& spec, std::size_t sample_count, double lo,
                                 double hi, std::uint64_t seed) {
  return certify(spec, sample_count, lo, hi, seed,
                 [&](double u, double v) { return exp_weight(spec, u) + exp_weight(spec, v); });
}

Certificate certify_power_exp_lipschitz(const NonlinearitySpec& spec, std::size_t sample_count, double lo,
                                 double hi, std::uint64_t seed) {
  return certify(spec, sample_count, lo, hi, seed, [&](double u, double v) {
    const double e = spec.m - 1.0;
    return std::pow(std::abs(u), e) * exp_weight(spec, u) + std::pow(std::abs(v), e) * exp_weight(spec, v);
  });
}

}  // namespace mlheat
