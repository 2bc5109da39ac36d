#include "mlheat/experiments.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mlheat/orlicz.hpp"
#include "mlheat/parallel.hpp"
#include "mlheat/transform.hpp"

namespace mlheat {

// ---------------------------------------------------------------------------
// Data.

std::string to_string(DatumKind k) {
  switch (k) {
    case DatumKind::gaussian:
      return "gaussian";
    case DatumKind::cell:
      return "cell";
    case DatumKind::delta:
      return "delta";
    case DatumKind::cosine:
      return "cosine";
    case DatumKind::constant:
      return "constant";
    case DatumKind::zero:
      return "zero";
    case DatumKind::rough:
      return "rough";
  }
  return "";
}

DatumKind datum_kind_from_string(const std::string& name) {
  for (DatumKind k : {DatumKind::gaussian, DatumKind::cell, DatumKind::delta, DatumKind::cosine,
                      DatumKind::constant, DatumKind::zero, DatumKind::rough})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown datum kind '" + name + "'");
}

Field make_datum(const Grid& g, const DatumSpec& spec) {
  const double A = spec.amplitude;
  const double w = spec.width;
  if ((spec.kind == DatumKind::gaussian || spec.kind == DatumKind::rough) && !(w > 0.0))
    throw std::invalid_argument("datum: width must be positive");
  const std::size_t c = g.n() / 2;
  const std::size_t centre = g.dim() == 1 ? c : c * g.n() + c;
  switch (spec.kind) {
    case DatumKind::gaussian:
      return sample(g, [&](double x, double y) { return A * std::exp(-(x * x + y * y) / (2.0 * w * w)); });
    case DatumKind::cell:
    case DatumKind::delta: {
      Field f(g);
      f[centre] = spec.kind == DatumKind::cell ? A : A / g.cell_volume();
      return f;
    }
    case DatumKind::cosine: {
      const double k = 2.0 * std::numbers::pi * spec.mode_index / g.box_len();
      if (g.dim() == 1) return sample(g, [&](double x, double) { return A * std::cos(k * x); });
      return sample(g, [&](double x, double y) { return A * std::cos(k * x) * std::cos(k * y); });
    }
    case DatumKind::constant:
      return sample(g, [&](double, double) { return A; });
    case DatumKind::zero:
      return Field(g);
    case DatumKind::rough: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> dist(-A, A);
      // Draws happen in node order, so the field depends only on (grid, seed).
      return sample(g, [&](double x, double y) {
        const double v = dist(rng);
        return x * x + y * y <= w * w ? v : 0.0;
      });
    }
  }
  return Field(g);
}

double loglog_slope(std::span<const double> t, std::span<const double> y) {
  return loglog_slope(t, y, 0.0, kInf);
}

double loglog_slope(std::span<const double> t, std::span<const double> y, double lo, double hi) {
  if (t.size() != y.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= lo && t[i] <= hi) || !(t[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(t[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) throw std::invalid_argument("loglog_slope: fewer than two points in the window");
  const double kk = static_cast<double>(k);
  const double den = kk * sxx - sx * sx;
  if (!(den > 0.0)) throw std::invalid_argument("loglog_slope: degenerate abscissae");
  return (kk * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// sigma table.

std::string to_string(Regime r) {
  switch (r) {
    case Regime::s_less:
      return "s_less";
    case Regime::s_equal:
      return "s_equal";
    case Regime::s_greater:
      return "s_greater";
  }
  return "";
}

SigmaTable sigma_table(int d, double s, double m, double p, std::span<const double> q_list) {
  if (d < 1) throw std::invalid_argument("sigma_table: d must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("sigma_table: s must lie in (0, 1)");
  if (!(p > 1.0) || !(m >= p)) throw std::invalid_argument("sigma_table: need m >= p > 1");
  SigmaTable tab;
  tab.d = d;
  tab.s = s;
  tab.m = m;
  tab.p = p;
  tab.s_critical = d * (p - 1.0) / (2.0 * p);
  tab.exponent_hypothesis = p <= d * (m - 1.0) / (2.0 * s);

  Regime regime = Regime::s_greater;
  if (std::abs(s - tab.s_critical) <= 1e-12) regime = Regime::s_equal;
  else if (s < tab.s_critical) regime = Regime::s_less;

  const double pos = std::max(2.0 - m, 0.0);
  const double upper = pos == 0.0 ? kInf : d * (m - 1.0) / (s * pos);
  const double lower = regime == Regime::s_greater ? 2.0 * (m - 1.0) * p / (p - 1.0) : d * (m - 1.0) / s;
  const bool side_ok = regime != Regime::s_greater || pos < d * (p - 1.0) / (2.0 * p * s);

  for (double q : q_list) {
    if (!(q >= 1.0)) throw std::invalid_argument("sigma_table: q must be >= 1");
    SigmaRow row;
    row.q = q;
    row.sigma = 1.0 / (m - 1.0) - d / (2.0 * s * q);
    row.window.regime = regime;
    row.window.lower_2q = lower;
    row.window.upper_2q = upper;
    const double two_q = 2.0 * q;
    if (!side_ok) {
      row.window.violated = "(2-m)_+ < d(p-1)/(2ps)";
    } else if (!(two_q > lower)) {
      row.window.violated = regime == Regime::s_greater ? "2q > 2(m-1)p/(p-1)" : "2q > d(m-1)/s";
    } else if (!(two_q < upper)) {
      row.window.violated = "2q < d(m-1)/(s(2-m)_+)";
    }
    row.window.admissible = row.window.violated.empty();
    tab.rows.push_back(row);
  }
  return tab;
}

// ---------------------------------------------------------------------------
// Decay fits.

std::vector<DecayFit> decay_campaign(const RunReport& run, int d, double s, double m,
                                     std::span<const double> q_list, double buffer_decades) {
  if (run.verdict != Verdict::reached_t_end)
    throw std::invalid_argument("decay_campaign: run did not reach t_end");
  if (run.series.size() < 4) throw std::invalid_argument("decay_campaign: too few records");
  if (!(m > 1.0)) throw std::invalid_argument("decay_campaign: m must be > 1");
  if (!(buffer_decades >= 0.0)) throw std::invalid_argument("decay_campaign: buffer must be >= 0");
  const double t_a = run.series.front().t, t_b = run.series.back().t;
  if (t_a > 1e-2 * (1 + 1e-12) || t_b < 1e2 * (1 - 1e-12))
    throw std::invalid_argument("decay_campaign: records must span two decades on each side of t = 1");

  std::vector<double> t;
  for (const auto& smp : run.series) t.push_back(smp.t);
  const double b = std::pow(10.0, buffer_decades);

  std::vector<DecayFit> fits;
  for (double q : q_list) {
    const auto it = std::find(run.record_q.begin(), run.record_q.end(), q);
    if (it == run.record_q.end()) throw std::invalid_argument("decay_campaign: q was not recorded");
    const auto qi = static_cast<std::size_t>(it - run.record_q.begin());
    std::vector<double> norm, env;
    DecayFit fit;
    fit.q = q;
    fit.sigma_theory = 1.0 / (m - 1.0) - d / (2.0 * s * q);
    for (const auto& smp : run.series) {
      norm.push_back(smp.norm_q[qi]);
      env.push_back(smp.norm_q[qi] * std::pow(t_s(smp.t, s), fit.sigma_theory));
      fit.envelope_ratio_max = std::max(fit.envelope_ratio_max, env.back());
    }
    fit.early_lo = t_a;
    fit.early_hi = 1.0 / b;
    fit.late_lo = b;
    fit.late_hi = t_b;
    fit.slope_early = loglog_slope(t, norm, fit.early_lo, fit.early_hi);
    fit.slope_late = loglog_slope(t, norm, fit.late_lo, fit.late_hi);
    fit.envelope_trend = loglog_slope(t, env);
    fit.envelope_trend_early = loglog_slope(t, env, fit.early_lo, fit.early_hi);
    fit.envelope_trend_late = loglog_slope(t, env, fit.late_lo, fit.late_hi);
    fit.trend_ok = fit.envelope_trend <= 0.05;
    fits.push_back(fit);
  }
  return fits;
}

// ---------------------------------------------------------------------------
// kappa.

namespace {

// log(e^a + 1) without overflow.
double log1p_exp(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

// log kappa(t) with t = e^y; first branch t_s^{-e1} + 1, second
// t_s^{-d/2s} (ln(t_s^{-d/2s} + 1))^{-1/pp}.
double log_kappa(double y, int d, double s, double e1, double pp) {
  const double log_ts = y <= 0.0 ? s * y : y;
  const double b1 = log1p_exp(-e1 * log_ts);
  const double B = -(d / (2.0 * s)) * log_ts;
  const double b2 = B - std::log(log1p_exp(B)) / pp;
  return std::min(b1, b2);
}

KappaResult integrate_kappa(int d, double s, double e1, double pp, double Y) {
  if (!(Y > 0.0)) throw std::invalid_argument("kappa: log extent must be positive");
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto g = [&](double y) { return std::exp(log_kappa(y, d, s, e1, pp) + y); };
  auto piece = [&](double a, double b) { return GK::integrate(g, a, b, 20, 1e-12); };
  const double A = piece(-2.0 * Y, -Y), B = piece(-Y, 0.0), C = piece(0.0, Y), D = piece(Y, 2.0 * Y);
  KappaResult r;
  r.value_half = B + C;
  r.value = A + B + C + D;
  r.relative_change = std::isfinite(r.value) ? (r.value - r.value_half) / r.value_half : kInf;
  r.numerically_finite = std::isfinite(r.value) && r.relative_change < 0.01;
  const bool small_grows = !(A < 0.005 * r.value_half);
  const bool large_grows = !(D < 0.005 * r.value_half);
  if (small_grows && large_grows) r.divergent_end = "both";
  else if (small_grows) r.divergent_end = "small_t";
  else if (large_grows) r.divergent_end = "large_t";
  if (!std::isfinite(r.value)) r.value = kInf;
  return r;
}

}  // namespace

KappaResult kappa_integral(int d, double p, double s, double r, double log_extent) {
  if (d < 1) throw std::invalid_argument("kappa_integral: d must be >= 1");
  if (!(r >= 1.0)) throw std::invalid_argument("kappa_integral: r must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("kappa_integral: p must be > 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kappa_integral: s must lie in (0, 1)");
  KappaResult res = integrate_kappa(d, s, d / (2.0 * s * r), p, log_extent);
  res.hypotheses_hold = s < d * (p - 1.0) / (2.0 * p) && r > std::max(d / 2.0, 1.0);
  res.converged = res.hypotheses_hold && res.numerically_finite;
  return res;
}

KappaResult kappa2_integral(int d, double p, double s, double log_extent) {
  if (d < 1) throw std::invalid_argument("kappa2_integral: d must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("kappa2_integral: p must be > 1");
  if (!(std::abs(s - d * (p - 1.0) / (2.0 * p)) <= 1e-12))
    throw std::invalid_argument("kappa2_integral: s must equal d(p-1)/(2p)");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kappa2_integral: s must lie in (0, 1)");
  // First branch t_s^{-1/2} + 1 is t_s^{-e1} + 1 with e1 = 1/2.
  KappaResult res = integrate_kappa(d, s, 0.5, 2.0 * p, log_extent);
  res.hypotheses_hold = true;
  res.converged = res.numerically_finite;
  return res;
}

// ---------------------------------------------------------------------------
// Fujita sweep.

std::string to_string(FujitaClass c) {
  switch (c) {
    case FujitaClass::blow_up:
      return "blow_up";
    case FujitaClass::global_decay:
      return "global_decay";
    case FujitaClass::inconclusive:
      return "inconclusive";
  }
  return "";
}

FujitaTable fujita_sweep(const Grid& grid, const OperatorParams& op, std::span<const double> m_list,
                         std::span<const double> scale_list, const SolverConfig& cfg,
                         const DatumSpec& shape) {
  FujitaTable tab;
  tab.d = grid.dim();
  tab.s = op.s;
  tab.p_c = 1.0 + 2.0 * op.s / grid.dim();
  for (double m : m_list)
    for (double sc : scale_list) {
      if (!(sc >= 0.0)) throw std::invalid_argument("fujita_sweep: scales must be >= 0");
      FujitaCell c;
      c.m = m;
      c.scale = sc;
      tab.cells.push_back(c);
    }
  // Record at t_end so the final sup-norm is known.
  SolverConfig run_cfg = cfg;
  if (run_cfg.record_times.empty() || run_cfg.record_times.back() < cfg.t_end)
    run_cfg.record_times.push_back(cfg.t_end);
  const MixedOperator mop(op, grid);
  (void)Transformer(grid);  // plan the transforms before the workers start

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tab.cells.size()); ++i) {
    FujitaCell& c = tab.cells[static_cast<std::size_t>(i)];
    DatumSpec ds = shape;
    ds.amplitude = c.scale;
    const Field u0 = make_datum(grid, ds);
    const auto nl = NonlinearitySpec::make(c.m, 2.0, 0.0, 1, NonlinearityMode::pure_power);
    const RunReport rep = integrate(u0, run_cfg, mop, nl);
    c.verdict = rep.verdict;
    c.t_final = rep.t_final;
    c.steps = rep.step_count;
    c.initial_inf = lq_norm(u0, kInf);
    c.final_inf = rep.series.empty() ? c.initial_inf : rep.series.back().norm_inf;
    c.max_boundary_fraction = rep.max_boundary_fraction;
    c.torus_caveat = rep.verdict == Verdict::aborted_boundary_mass;
    if (rep.verdict == Verdict::blow_up_detected) {
      c.classification = FujitaClass::blow_up;
    } else if (rep.verdict == Verdict::reached_t_end && c.final_inf <= c.initial_inf) {
      c.classification = FujitaClass::global_decay;
    }
  }
  std::sort(tab.cells.begin(), tab.cells.end(), [](const FujitaCell& a, const FujitaCell& b) {
    return a.m != b.m ? a.m < b.m : a.scale < b.scale;
  });

  bool any_sub = false, sub_all = true, any_sup = false, sup_all = true;
  for (double m : m_list) {
    if (m < tab.p_c) {
      any_sub = true;
      for (const auto& c : tab.cells)
        if (c.m == m && c.classification != FujitaClass::blow_up) sub_all = false;
    } else if (m > tab.p_c) {
      any_sup = true;
      const FujitaCell* smallest = nullptr;
      for (const auto& c : tab.cells)
        if (c.m == m && c.scale > 0.0 && (!smallest || c.scale < smallest->scale)) smallest = &c;
      if (!smallest || smallest->classification != FujitaClass::global_decay) sup_all = false;
    }
  }
  tab.subcritical_all_blow_up = any_sub && sub_all;
  tab.supercritical_small_global = any_sup && sup_all;
  return tab;
}

// ---------------------------------------------------------------------------
// Semigroup campaign.

std::vector<ProbeSpec> default_probes(double base_width, std::uint64_t seed) {
  std::vector<ProbeSpec> v;
  v.push_back({"cell", {DatumKind::cell, 1.0, 1.0, 1, seed}});
  v.push_back({"gaussian_w1", {DatumKind::gaussian, 1.0, base_width, 1, seed}});
  v.push_back({"gaussian_w4", {DatumKind::gaussian, 1.0, 4.0 * base_width, 1, seed}});
  v.push_back({"gaussian_w16", {DatumKind::gaussian, 1.0, 16.0 * base_width, 1, seed}});
  v.push_back({"rough", {DatumKind::rough, 1.0, 4.0 * base_width, 1, seed}});
  return v;
}

SemigroupCampaign semigroup_campaign(const OperatorParams& op, std::span<const Grid> ladder,
                                     std::span<const double> t_list, std::span<const ProbeSpec> probes,
                                     double p, std::span<const std::pair<double, double>> q_r_pairs,
                                     double boundary_tol) {
  if (ladder.empty() || probes.empty()) throw std::invalid_argument("semigroup_campaign: empty ladder or probes");
  for (const auto& [q, r] : q_r_pairs)
    if (!(q >= 1.0 && q <= p) || !(r >= 1.0))
      throw std::invalid_argument("semigroup_campaign: need 1 <= q <= p and r >= 1");
  for (double t : t_list)
    if (!(t > 0.0)) throw std::invalid_argument("semigroup_campaign: t must be positive");

  SemigroupCampaign out;
  out.p = p;
  out.q_r_pairs.assign(q_r_pairs.begin(), q_r_pairs.end());
  const std::size_t npairs = q_r_pairs.size();
  const double ln2_fac = std::pow(std::numbers::ln2, -1.0 / p);

  struct Cell {
    std::size_t g, pr;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < ladder.size(); ++g)
    for (std::size_t pr = 0; pr < probes.size(); ++pr) cells.push_back({g, pr});
  for (const Grid& g : ladder) (void)Transformer(g);
  std::vector<std::vector<SemigroupRow>> results(cells.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(cells.size()); ++ci) {
    const Cell cell = cells[static_cast<std::size_t>(ci)];
    const Grid& grid = ladder[cell.g];
    const MixedOperator mop(op, grid);
    const Field phi = make_datum(grid, probes[cell.pr].datum);
    const double before = exp_norm(phi, p);
    std::vector<double> nq(npairs), nr(npairs);
    for (std::size_t k = 0; k < npairs; ++k) {
      nq[k] = lq_norm(phi, q_r_pairs[k].first);
      nr[k] = lq_norm(phi, q_r_pairs[k].second);
    }
    Transformer tr(grid);
    std::vector<std::complex<double>> base(grid.size()), work(grid.size());
    std::vector<double> mult(grid.size());
    Field evolved(grid);
    tr.forward(phi.values, base);
    const double d = grid.dim();
    for (double t : t_list) {
      SemigroupRow row;
      row.grid_index = cell.g;
      row.probe = probes[cell.pr].name;
      row.t = t;
      row.resolved = mop.resolves(t);
      if (!row.resolved) {
        results[static_cast<std::size_t>(ci)].push_back(row);
        continue;
      }
      kernels::exp_multiplier(mop.symbols(), t, mult);
      std::copy(base.begin(), base.end(), work.begin());
      kernels::multiply(work, mult);
      tr.inverse(work, evolved.values);
      row.exp_norm_before = before;
      row.exp_norm_after = exp_norm(evolved, p);
      row.excess = row.exp_norm_after - before;
      row.boundary_fraction = boundary_mass_fraction(evolved);
      row.monitored = row.boundary_fraction <= boundary_tol;
      if (row.monitored) {
        const double ts = t_s(t, op.s);
        for (std::size_t k = 0; k < npairs; ++k) {
          const auto [q, r] = q_r_pairs[k];
          const double lg = std::log1p(std::pow(ts, -d / (2.0 * op.s)));
          const double env2 = std::pow(ts, -d / (2.0 * op.s * q)) * std::pow(lg, -1.0 / p) * nq[k];
          const double env3 = ln2_fac * (std::pow(ts, -d / (2.0 * op.s * r)) * nr[k] + nq[k]);
          row.ratio2.push_back(row.exp_norm_after / env2);
          row.ratio3.push_back(row.exp_norm_after / env3);
        }
      }
      results[static_cast<std::size_t>(ci)].push_back(row);
    }
  }

  out.sup_ratio2.assign(npairs, 0.0);
  out.sup_ratio3.assign(npairs, 0.0);
  for (auto& rs : results)
    for (auto& row : rs) {
      if (row.resolved) {
        if (row.excess > 1e-9) ++out.violations;
        out.max_excess = std::max(out.max_excess, row.excess);
      }
      for (std::size_t k = 0; k < row.ratio2.size(); ++k) {
        out.sup_ratio2[k] = std::max(out.sup_ratio2[k], row.ratio2[k]);
        out.sup_ratio3[k] = std::max(out.sup_ratio3[k], row.ratio3[k]);
      }
      out.rows.push_back(std::move(row));
    }
  for (double t : t_list) {
    bool covered = false;
    for (const auto& row : out.rows)
      if (row.t == t && row.resolved && row.monitored) covered = true;
    if (!covered) ++out.uncovered_times;
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const SemigroupRow& a, const SemigroupRow& b) {
    if (a.grid_index != b.grid_index) return a.grid_index < b.grid_index;
    if (a.probe != b.probe) return a.probe < b.probe;
    return a.t < b.t;
  });
  return out;
}

}  // namespace mlheat
