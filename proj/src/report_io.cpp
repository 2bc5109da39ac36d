#include "mlheat/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace mlheat {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::string artifact_stem(int d, double s, double m, double p, double q) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "d%d_s%g_m%g_p%g_q%g", d, s, m, p, q);
  return buf;
}

namespace {

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Json to_json(const Sample& s) {
  Json j;
  j["t"] = json_number(s.t);
  j["norm_q"] = numbers(s.norm_q);
  j["norm_inf"] = json_number(s.norm_inf);
  j["norm_exp"] = json_number(s.norm_exp);
  j["boundary_fraction"] = json_number(s.boundary_fraction);
  return j;
}

std::string q_label(double q) {
  if (std::isinf(q)) return "Linf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "L%g", q);
  return buf;
}

}  // namespace

Json to_json(const RunReport& rep) {
  Json j;
  j["verdict"] = to_string(rep.verdict);
  j["verdict_note"] = "blow-up is a numerical surrogate: threshold crossing with the step at dt_min";
  j["t_final"] = json_number(rep.t_final);
  j["dt_final"] = json_number(rep.dt_final);
  j["step_count"] = rep.step_count;
  j["rejected_steps"] = rep.rejected_steps;
  j["max_boundary_fraction"] = json_number(rep.max_boundary_fraction);
  j["threshold_norm"] = json_number(rep.threshold_norm);
  j["message"] = rep.message;
  j["record_q"] = numbers(rep.record_q);
  j["exp_p"] = json_number(rep.exp_p);
  j["initial"] = to_json(rep.initial);
  Json series = Json::array();
  for (const auto& s : rep.series) series.push_back(to_json(s));
  j["series"] = std::move(series);
  if (!rep.picard_log.empty()) {
    Json log = Json::array();
    for (const auto& e : rep.picard_log) {
      Json x;
      x["t0"] = json_number(e.t0);
      x["t1"] = json_number(e.t1);
      x["ratios"] = numbers(e.ratios);
      x["converged"] = e.converged;
      log.push_back(std::move(x));
    }
    j["picard_log"] = std::move(log);
  }
  return j;
}

void write_series_csv(std::ostream& os, const RunReport& rep) {
  os << "t";
  for (double q : rep.record_q) os << ',' << q_label(q);
  os << ",Linf,exp_Lp,boundary_mass_fraction\n";
  for (const auto& s : rep.series) {
    os << format_double(s.t);
    for (double v : s.norm_q) os << ',' << format_double(v);
    os << ',' << format_double(s.norm_inf) << ',' << format_double(s.norm_exp) << ','
       << format_double(s.boundary_fraction) << '\n';
  }
}

Json to_json(const OrliczNorm& n) {
  Json j;
  j["value"] = json_number(n.value);
  j["achieved_integral"] = json_number(n.achieved_integral);
  j["bisection_width"] = json_number(n.bisection_width);
  return j;
}

Json to_json(const SigmaTable& tab) {
  Json j;
  j["d"] = tab.d;
  j["s"] = json_number(tab.s);
  j["m"] = json_number(tab.m);
  j["p"] = json_number(tab.p);
  j["s_critical"] = json_number(tab.s_critical);
  j["exponent_hypothesis"] = tab.exponent_hypothesis;
  Json rows = Json::array();
  for (const auto& r : tab.rows) {
    Json x;
    x["q"] = json_number(r.q);
    x["sigma"] = json_number(r.sigma);
    x["regime"] = to_string(r.window.regime);
    x["lower_2q"] = json_number(r.window.lower_2q);
    x["upper_2q"] = json_number(r.window.upper_2q);
    x["admissible"] = r.window.admissible;
    x["violated"] = r.window.violated;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

void write_sigma_csv(std::ostream& os, const SigmaTable& tab) {
  os << "q,sigma,regime,lower_2q,upper_2q,admissible,violated\n";
  for (const auto& r : tab.rows)
    os << format_double(r.q) << ',' << format_double(r.sigma) << ',' << to_string(r.window.regime) << ','
       << format_double(r.window.lower_2q) << ',' << format_double(r.window.upper_2q) << ','
       << (r.window.admissible ? "true" : "false") << ",\"" << r.window.violated << "\"\n";
}

Json to_json(const DecayFit& f) {
  Json j;
  j["q"] = json_number(f.q);
  j["sigma_theory"] = json_number(f.sigma_theory);
  j["early_window"] = numbers(std::vector<double>{f.early_lo, f.early_hi});
  j["late_window"] = numbers(std::vector<double>{f.late_lo, f.late_hi});
  j["slope_early"] = json_number(f.slope_early);
  j["slope_late"] = json_number(f.slope_late);
  j["envelope_ratio_max"] = json_number(f.envelope_ratio_max);
  j["envelope_trend"] = json_number(f.envelope_trend);
  j["envelope_trend_early"] = json_number(f.envelope_trend_early);
  j["envelope_trend_late"] = json_number(f.envelope_trend_late);
  j["pass"] = f.trend_ok;
  return j;
}

void write_decay_csv(std::ostream& os, const RunReport& rep, std::span<const DecayFit> fits, double s) {
  os << "t,t_s";
  for (const auto& f : fits) os << ',' << q_label(f.q) << ",envelope_" << q_label(f.q);
  os << '\n';
  for (const auto& smp : rep.series) {
    const double ts = t_s(smp.t, s);
    os << format_double(smp.t) << ',' << format_double(ts);
    for (const auto& f : fits) {
      std::size_t qi = 0;
      while (qi < rep.record_q.size() && rep.record_q[qi] != f.q) ++qi;
      const double v = smp.norm_q.at(qi);
      os << ',' << format_double(v) << ',' << format_double(v * std::pow(ts, f.sigma_theory));
    }
    os << '\n';
  }
}

Json to_json(const KappaResult& k) {
  Json j;
  j["value"] = json_number(k.value);
  j["value_half"] = json_number(k.value_half);
  j["relative_change"] = json_number(k.relative_change);
  j["numerically_finite"] = k.numerically_finite;
  j["hypotheses_hold"] = k.hypotheses_hold;
  j["converged"] = k.converged;
  j["divergent_end"] = k.divergent_end;
  return j;
}

Json to_json(const FujitaTable& tab) {
  Json j;
  j["d"] = tab.d;
  j["s"] = json_number(tab.s);
  j["p_c"] = json_number(tab.p_c);
  j["subcritical_all_blow_up"] = tab.subcritical_all_blow_up;
  j["supercritical_small_global"] = tab.supercritical_small_global;
  Json cells = Json::array();
  for (const auto& c : tab.cells) {
    Json x;
    x["m"] = json_number(c.m);
    x["scale"] = json_number(c.scale);
    x["verdict"] = to_string(c.verdict);
    x["classification"] = to_string(c.classification);
    x["t_final"] = json_number(c.t_final);
    x["initial_inf"] = json_number(c.initial_inf);
    x["final_inf"] = json_number(c.final_inf);
    x["max_boundary_fraction"] = json_number(c.max_boundary_fraction);
    x["torus_caveat"] = c.torus_caveat;
    x["steps"] = c.steps;
    cells.push_back(std::move(x));
  }
  j["cells"] = std::move(cells);
  return j;
}

void write_fujita_csv(std::ostream& os, const FujitaTable& tab) {
  os << "m,scale,verdict,classification,t_final,initial_inf,final_inf,max_boundary_fraction,torus_caveat,steps\n";
  for (const auto& c : tab.cells)
    os << format_double(c.m) << ',' << format_double(c.scale) << ',' << to_string(c.verdict) << ','
       << to_string(c.classification) << ',' << format_double(c.t_final) << ',' << format_double(c.initial_inf)
       << ',' << format_double(c.final_inf) << ',' << format_double(c.max_boundary_fraction) << ','
       << (c.torus_caveat ? "true" : "false") << ',' << c.steps << '\n';
}

Json to_json(const SemigroupCampaign& c) {
  Json j;
  j["p"] = json_number(c.p);
  Json pairs = Json::array();
  for (const auto& [q, r] : c.q_r_pairs) pairs.push_back(numbers(std::vector<double>{q, r}));
  j["q_r_pairs"] = std::move(pairs);
  j["rows"] = c.rows.size();
  j["violations"] = c.violations;
  j["max_excess"] = json_number(c.max_excess);
  j["sup_ratio2"] = numbers(c.sup_ratio2);
  j["sup_ratio3"] = numbers(c.sup_ratio3);
  j["uncovered_times"] = c.uncovered_times;
  j["pass"] = c.violations == 0;
  return j;
}

void write_semigroup_csv(std::ostream& os, const SemigroupCampaign& c) {
  os << "grid,probe,t,resolved,monitored,boundary_fraction,exp_norm_before,exp_norm_after,excess";
  for (std::size_t k = 0; k < c.q_r_pairs.size(); ++k) os << ",ratio2_" << k << ",ratio3_" << k;
  os << '\n';
  for (const auto& r : c.rows) {
    os << r.grid_index << ',' << r.probe << ',' << format_double(r.t) << ',' << (r.resolved ? "true" : "false")
       << ',' << (r.monitored ? "true" : "false") << ',' << format_double(r.boundary_fraction) << ','
       << format_double(r.exp_norm_before) << ',' << format_double(r.exp_norm_after) << ','
       << format_double(r.excess);
    for (std::size_t k = 0; k < c.q_r_pairs.size(); ++k) {
      if (k < r.ratio2.size())
        os << ',' << format_double(r.ratio2[k]) << ',' << format_double(r.ratio3[k]);
      else
        os << ",,";
    }
    os << '\n';
  }
}

Json to_json(const LqLrTable& tab) {
  Json j;
  j["q"] = json_number(tab.q);
  j["r"] = json_number(tab.r);
  j["probe_norm_q"] = json_number(tab.probe_norm_q);
  j["sup_ratio"] = json_number(tab.sup_ratio);
  return j;
}

void write_lq_lr_csv(std::ostream& os, const LqLrTable& tab) {
  os << "t,t_s,norm_r,envelope,ratio\n";
  for (const auto& r : tab.rows)
    os << format_double(r.t) << ',' << format_double(r.t_s) << ',' << format_double(r.norm_r) << ','
       << format_double(r.envelope) << ',' << format_double(r.ratio) << '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace mlheat
