#include "mlheat/mild_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

#include "mlheat/orlicz.hpp"
#include "mlheat/parallel.hpp"
#include "mlheat/transform.hpp"

namespace mlheat {

using cd = std::complex<double>;

std::string to_string(Scheme s) { return s == Scheme::exp_euler ? "exp_euler" : "etdrk2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "exp_euler") return Scheme::exp_euler;
  if (name == "etdrk2") return Scheme::etdrk2;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::reached_t_end:
      return "reached_t_end";
    case Verdict::blow_up_detected:
      return "blow_up_detected";
    case Verdict::aborted_boundary_mass:
      return "aborted_boundary_mass";
    case Verdict::numeric_failure:
      return "numeric_failure";
  }
  return "";
}

void SolverConfig::validate() const {
  if (!(t_end > 0.0)) throw std::invalid_argument("solver: t_end must be positive");
  if (!(dt_min > 0.0)) throw std::invalid_argument("solver: dt_min must be positive");
  if (!(dt_min <= dt_init)) throw std::invalid_argument("solver: need dt_min <= dt_init");
  if (!(dt_init <= t_end)) throw std::invalid_argument("solver: need dt_init <= t_end");
  if (!(dt_max >= dt_init)) throw std::invalid_argument("solver: need dt_max >= dt_init");
  if (!(step_tol > 0.0)) throw std::invalid_argument("solver: step_tol must be positive");
  if (picard.enabled && !(picard.tol > 0.0)) throw std::invalid_argument("solver: picard.tol must be positive");
  if (picard.enabled && picard.max_iter < 1) throw std::invalid_argument("solver: picard.max_iter must be >= 1");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("solver: blowup_threshold must be positive");
  if (!(boundary_mass_tol > 0.0)) throw std::invalid_argument("solver: boundary_mass_tol must be positive");
  if (max_steps == 0) throw std::invalid_argument("solver: max_steps must be positive");
  for (std::size_t i = 0; i < record_times.size(); ++i) {
    if (!(record_times[i] > 0.0) || record_times[i] > t_end)
      throw std::invalid_argument("solver: record_times must lie in (0, t_end]");
    if (i > 0 && !(record_times[i] > record_times[i - 1]))
      throw std::invalid_argument("solver: record_times must be strictly increasing");
  }
  for (double q : record_q)
    if (!(q >= 1.0)) throw std::invalid_argument("solver: record_q entries must be >= 1");
}

double phi1(double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("phi1: z must be >= 0");
  if (z < 1e-5) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
  return -std::expm1(-z) / z;
}

double phi2(double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("phi2: z must be >= 0");
  if (z < 0.1) {
    // sum_k (-z)^k / (k + 2)!
    double term = 0.5, sum = 0.5;
    for (int k = 1; k <= 12; ++k) {
      term *= -z / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (z + std::expm1(-z)) / (z * z);
}

namespace {

struct Multipliers {
  std::vector<double> e, p1, p2;  // e^{-hm}, h phi1(hm), h phi2(hm)
};

// Owns the transform buffers and multiplier cache for one integration.
class Engine {
 public:
  Engine(const MixedOperator& op, const NonlinearitySpec& nl, Scheme scheme, PicardSettings picard)
      : op_(op), nl_(nl), scheme_(scheme), picard_(picard), tr_(op.grid()), n_(op.grid().size()),
        real_(n_), nu_hat_(n_), na_hat_(n_) {
    cache_cap_ = std::max<std::size_t>(4, (std::size_t{256} << 20) / (24 * n_));
  }

  // f(u) transformed into out; false if any cell hit the sentinel.
  bool nonlinear_hat(std::span<const double> u, std::span<cd> out) {
    if (nl_.mode == NonlinearityMode::none) {
      std::fill(out.begin(), out.end(), cd{});
      return true;
    }
    if (eval_into(nl_, u, real_) != 0) return false;
    tr_.forward(real_, out);
    return true;
  }

  // (u, uh) -> (u_out, uh_out) over h. `nu_hat`, if given, is f(u) already
  // transformed. False on sentinel or non-finite output.
  bool step(std::span<const double> u, std::span<const cd> uh, double h, std::span<double> u_out,
            std::span<cd> uh_out, const std::vector<cd>* nu_hat, PicardLogEntry* log) {
    const Multipliers& m = multipliers(h);
    if (nu_hat) {
      std::copy(nu_hat->begin(), nu_hat->end(), nu_hat_.begin());
    } else if (!nonlinear_hat(u, nu_hat_)) {
      return false;
    }
    kernels::combine(uh_out, m.e, uh, m.p1, nu_hat_);
    tr_.inverse(uh_out, u_out);
    if (scheme_ == Scheme::etdrk2 && nl_.mode != NonlinearityMode::none) {
      if (!nonlinear_hat(u_out, na_hat_)) return false;
      kernels::accumulate(uh_out, 1.0, m.p2, na_hat_);
      kernels::accumulate(uh_out, -1.0, m.p2, nu_hat_);
      tr_.inverse(uh_out, u_out);
    }
    if (picard_.enabled && nl_.mode != NonlinearityMode::none) {
      if (!correct(uh, h, m, u_out, uh_out, log)) return false;
    }
    return std::isfinite(kernels::max_abs(u_out));
  }

 private:
  // Fixed-point iteration for v = e^{-hL}u + h(phi1 - phi2)N(u) + h phi2 N(v).
  bool correct(std::span<const cd> uh, double, const Multipliers& m, std::span<double> v,
               std::span<cd> vh, PicardLogEntry* log) {
    std::vector<double> prev(v.begin(), v.end());
    double d_prev = 0.0;
    bool converged = false;
    std::vector<double> ratios;
    for (int k = 0; k < picard_.max_iter; ++k) {
      if (!nonlinear_hat(prev, na_hat_)) return false;
      kernels::combine(vh, m.e, uh, m.p1, nu_hat_);
      kernels::accumulate(vh, -1.0, m.p2, nu_hat_);
      kernels::accumulate(vh, 1.0, m.p2, na_hat_);
      tr_.inverse(vh, v);
      const double d = kernels::max_abs_diff(v, prev);
      if (!std::isfinite(d)) return false;
      if (k > 0 && d_prev > 0.0) ratios.push_back(d / d_prev);
      d_prev = d;
      std::copy(v.begin(), v.end(), prev.begin());
      if (d < picard_.tol) {
        converged = true;
        break;
      }
    }
    if (log) {
      log->ratios = std::move(ratios);
      log->converged = converged;
    }
    return true;
  }

  const Multipliers& multipliers(double h) {
    if (auto it = cache_.find(h); it != cache_.end()) return it->second;
    if (cache_.size() >= cache_cap_) cache_.clear();
    Multipliers m;
    const auto sym = op_.symbols();
    m.e.resize(n_);
    m.p1.resize(n_);
    m.p2.resize(n_);
    kernels::exp_multiplier(sym, h, m.e);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_); ++i) {
      const auto k = static_cast<std::size_t>(i);
      m.p1[k] = h * phi1(h * sym[k]);
      m.p2[k] = h * phi2(h * sym[k]);
    }
    return cache_.emplace(h, std::move(m)).first->second;
  }

  const MixedOperator& op_;
  NonlinearitySpec nl_;
  Scheme scheme_;
  PicardSettings picard_;
  Transformer tr_;
  std::size_t n_;
  std::vector<double> real_;
  std::vector<cd> nu_hat_, na_hat_;
  std::map<double, Multipliers> cache_;
  std::size_t cache_cap_;
};

StepResult single_step(const Field& u, double dt, const MixedOperator& op, const NonlinearitySpec& nl,
                       Scheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(u.grid == op.grid())) throw std::invalid_argument("step: grid mismatch");
  StepResult r{Field(u.grid), 0};
  Field fu(u.grid);
  r.sentinel_cells = eval_into(nl, u.values, fu.values);
  if (r.sentinel_cells != 0) {
    std::fill(r.u.values.begin(), r.u.values.end(), std::nan(""));
    return r;
  }
  Engine eng(op, nl, scheme, PicardSettings{});
  Transformer tr(u.grid);
  std::vector<cd> uh(u.size()), out_h(u.size());
  tr.forward(u.values, uh);
  if (!eng.step(u.values, uh, dt, r.u.values, out_h, nullptr, nullptr)) {
    Field fa(u.grid);
    r.sentinel_cells = std::max<std::size_t>(1, eval_into(nl, r.u.values, fa.values));
  }
  return r;
}

}  // namespace

StepResult step_exp_euler(const Field& u, double dt, const MixedOperator& op, const NonlinearitySpec& nl) {
  return single_step(u, dt, op, nl, Scheme::exp_euler);
}

StepResult step_etdrk2(const Field& u, double dt, const MixedOperator& op, const NonlinearitySpec& nl) {
  return single_step(u, dt, op, nl, Scheme::etdrk2);
}

double boundary_mass_fraction(const Field& u) {
  const Grid& g = u.grid;
  const std::size_t n = g.n();
  // Nodes with |x| > 0.4 L: x_j = -L/2 + j dx.
  std::vector<char> outer(n);
  for (std::size_t j = 0; j < n; ++j) outer[j] = std::abs(g.node(j)) > 0.4 * g.box_len();
  const double total = kernels::abs_sum(u.values);
  if (total == 0.0) return 0.0;
  double shell = 0.0;
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < n; ++j)
      if (outer[j]) shell += std::abs(u[j]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (outer[i] || outer[j]) shell += std::abs(u[i * n + j]);
  }
  return shell / total;
}

namespace {

Sample observe(const Field& u, double t, const SolverConfig& cfg, double p) {
  Sample s;
  s.t = t;
  for (double q : cfg.record_q) s.norm_q.push_back(lq_norm(u, q));
  s.norm_inf = lq_norm(u, kInf);
  s.norm_exp = std::isfinite(s.norm_inf) ? exp_norm(u, p) : kInf;
  s.boundary_fraction = boundary_mass_fraction(u);
  return s;
}

double threshold_norm(const Field& u, double p) {
  const double inf = lq_norm(u, kInf);
  if (!std::isfinite(inf)) return kInf;
  return lq_norm(u, p) + inf;
}

}  // namespace

RunReport integrate(const Field& u0, const SolverConfig& cfg, const MixedOperator& op,
                    const NonlinearitySpec& nl) {
  cfg.validate();
  if (!(u0.grid == op.grid())) throw std::invalid_argument("integrate: grid mismatch");
  if (!std::isfinite(kernels::max_abs(u0.values)))
    throw std::invalid_argument("integrate: initial datum is not finite");
  const auto clock_start = std::chrono::steady_clock::now();

  RunReport rep;
  rep.record_q = cfg.record_q;
  rep.exp_p = nl.p;
  rep.initial = observe(u0, 0.0, cfg, nl.p);
  rep.max_boundary_fraction = rep.initial.boundary_fraction;
  rep.threshold_norm = threshold_norm(u0, nl.p);
  if (!(rep.threshold_norm < cfg.blowup_threshold))
    throw std::invalid_argument("integrate: blowup_threshold must exceed ||u0||_p + ||u0||_inf");

  const std::size_t n = u0.size();
  Engine eng(op, nl, cfg.scheme, cfg.picard);
  Transformer tr(u0.grid);
  Field u = u0;
  std::vector<cd> uh(n);
  tr.forward(u.values, uh);

  Field big(u0.grid), half(u0.grid), fine(u0.grid);
  std::vector<cd> big_h(n), half_h(n), fine_h(n), nu_hat(n);

  double t = 0.0;
  double h_nom = cfg.dt_init;
  std::size_t next_rec = 0;
  const double dt_floor = cfg.dt_min * (1.0 + 1e-12);
  bool done = false;

  auto finish = [&](Verdict v, std::string msg) {
    rep.verdict = v;
    rep.message = std::move(msg);
    done = true;
  };
  auto sentinel_verdict = [&](const Field& state) {
    if (threshold_norm(state, nl.p) > cfg.blowup_threshold || rep.threshold_norm > cfg.blowup_threshold)
      finish(Verdict::blow_up_detected, "nonlinearity overflow at dt_min after threshold crossing");
    else
      finish(Verdict::numeric_failure, "nonlinearity overflow before the blow-up threshold was crossed");
  };

  while (!done && t < cfg.t_end) {
    if (rep.step_count >= cfg.max_steps) {
      finish(Verdict::numeric_failure, "max_steps exhausted");
      break;
    }
    const double target = next_rec < cfg.record_times.size() ? cfg.record_times[next_rec] : cfg.t_end;
    const double remaining = target - t;
    const double h_cap = std::min(h_nom, cfg.dt_max);
    const bool lands = remaining <= h_cap * (1.0 + 1e-12);
    const double h = lands ? remaining : h_cap;
    std::vector<PicardLogEntry> logs;
    double err = 0.0;

    if (!cfg.adaptive) {
      PicardLogEntry log{t, t + h, {}, false};
      if (!eng.step(u.values, uh, h, fine.values, fine_h, nullptr, &log)) {
        sentinel_verdict(u);
        break;
      }
      if (cfg.picard.enabled) logs.push_back(std::move(log));
    } else {
      if (!eng.nonlinear_hat(u.values, nu_hat)) {
        sentinel_verdict(u);
        break;
      }
      PicardLogEntry l0{t, t + 0.5 * h, {}, false}, l1{t + 0.5 * h, t + h, {}, false};
      const bool ok = eng.step(u.values, uh, h, big.values, big_h, &nu_hat, nullptr) &&
                      eng.step(u.values, uh, 0.5 * h, half.values, half_h, &nu_hat, &l0) &&
                      eng.step(half.values, half_h, 0.5 * h, fine.values, fine_h, nullptr, &l1);
      if (!ok) {
        if (h <= dt_floor) {
          sentinel_verdict(u);
          break;
        }
        h_nom = std::max(0.5 * h, cfg.dt_min);
        ++rep.rejected_steps;
        continue;
      }
      err = kernels::max_abs_diff(fine.values, big.values) /
            std::max(kernels::max_abs(fine.values), 1e-300);
      if (err > cfg.step_tol && h > dt_floor) {
        h_nom = std::max(0.5 * h, cfg.dt_min);
        ++rep.rejected_steps;
        continue;
      }
      if (cfg.picard.enabled) {
        logs.push_back(std::move(l0));
        logs.push_back(std::move(l1));
      }
    }

    // Accept.
    std::swap(u.values, fine.values);
    std::swap(uh, fine_h);
    t = lands ? target : t + h;
    ++rep.step_count;
    rep.dt_final = h;
    for (auto& l : logs) rep.picard_log.push_back(std::move(l));
    if (cfg.adaptive && err < 0.25 * cfg.step_tol && !lands) h_nom = std::min(2.0 * h_nom, cfg.dt_max);

    rep.threshold_norm = threshold_norm(u, nl.p);
    const double bf = boundary_mass_fraction(u);
    rep.max_boundary_fraction = std::max(rep.max_boundary_fraction, bf);
    if (lands && next_rec < cfg.record_times.size()) {
      rep.series.push_back(observe(u, t, cfg, nl.p));
      if (cfg.keep_snapshots) rep.snapshots.push_back(u);
      ++next_rec;
    }
    if (bf > cfg.boundary_mass_tol) {
      finish(Verdict::aborted_boundary_mass, "boundary-shell mass fraction exceeded boundary_mass_tol");
      break;
    }
    if (rep.threshold_norm > cfg.blowup_threshold && (!cfg.adaptive || h <= dt_floor)) {
      finish(Verdict::blow_up_detected, "blow-up threshold crossed with the step at dt_min");
      break;
    }
  }
  if (!done) rep.verdict = Verdict::reached_t_end;
  rep.t_final = t;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return rep;
}

}  // namespace mlheat
