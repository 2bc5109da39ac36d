// mlheat: command-line front end.
//
// Every subcommand reads one config file, runs one operation and writes its
// artifacts to --out. Exit codes: 0 pass, 2 valid but negative outcome
// (blow-up, divergence, failed check), 1 error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mlheat/config.hpp"
#include "mlheat/experiments.hpp"
#include "mlheat/heat_kernel.hpp"
#include "mlheat/mild_solver.hpp"
#include "mlheat/orlicz.hpp"
#include "mlheat/report_io.hpp"

namespace fs = std::filesystem;
using namespace mlheat;

namespace {

struct Invocation {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
};

std::string path_in(const Invocation& inv, const std::string& name) {
  return (fs::path(inv.out_dir) / name).string();
}

void emit_json(const Invocation& inv, const std::string& name, const Json& j) {
  write_file(path_in(inv, name), j.dump(2) + "\n");
}

template <class Writer>
void emit_csv(const Invocation& inv, const std::string& name, Writer&& w) {
  std::ostringstream os;
  w(os);
  write_file(path_in(inv, name), os.str());
}

RunSetup load_setup(const Invocation& inv) {
  Config cfg = Config::load(inv.config_path);
  for (const auto& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(0, kv, "--set expects key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  RunSetup rs = build_setup(cfg);
  fs::create_directories(inv.out_dir);
  write_file(path_in(inv, "config.txt"), cfg.render());
  return rs;
}

std::vector<double> or_default(std::vector<double> v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

int cmd_simulate(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const MixedOperator op(rs.op, rs.grid);
  const Field u0 = make_datum(rs.grid, rs.experiment.datum);
  const RunReport rep = integrate(u0, rs.solver, op, rs.nl);
  emit_json(inv, "report.json", to_json(rep));
  emit_csv(inv, "series.csv", [&](std::ostream& os) { write_series_csv(os, rep); });
  std::cout << to_string(rep.verdict) << " t_final=" << format_double(rep.t_final) << " steps=" << rep.step_count
            << "\n";
  switch (rep.verdict) {
    case Verdict::reached_t_end:
      return 0;
    case Verdict::blow_up_detected:
    case Verdict::aborted_boundary_mass:
      return 2;
    case Verdict::numeric_failure:
      std::cerr << "numeric failure: " << rep.message << "\n";
      return 1;
  }
  return 1;
}

int cmd_kernel(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const Grid& g = rs.grid;
  const OperatorParams& op = rs.op;
  const double x_max = rs.experiment.x_max > 0.0 ? rs.experiment.x_max : g.box_len() / 4.0;
  std::vector<double> x;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double xj = g.node(j);
    if (std::abs(xj) <= x_max && (g.dim() == 1 || xj >= 0.0)) x.push_back(xj);
  }
  Json summary;
  summary["d"] = g.dim();
  summary["s"] = json_number(op.s);
  summary["a"] = json_number(op.a);
  summary["b"] = json_number(op.b);
  summary["x_max"] = json_number(x_max);
  Json rows = Json::array();
  bool pass = true;
  for (double t : or_default(rs.experiment.t_list, {1.0})) {
    const KernelEvaluation four = heat_kernel_fourier(op, g.dim(), t, x);
    std::vector<double> second(x.size());
    std::string route;
    if (op.a > 0.0 && op.b > 0.0) {
      second = heat_kernel_subordination(op, g.dim(), t, x).values;
      route = "subordination";
    } else if (op.b == 0.0) {
      const double var4 = 4.0 * op.a * t;
      for (std::size_t i = 0; i < x.size(); ++i)
        second[i] = std::exp(-x[i] * x[i] / var4) / std::pow(std::numbers::pi * var4, g.dim() / 2.0);
      route = "gaussian_closed_form";
    } else {
      for (std::size_t i = 0; i < x.size(); ++i)
        second[i] = fractional_heat_kernel(g.dim(), op.s, op.b * t, std::abs(x[i]));
      route = "fractional_kernel";
    }
    double max_abs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) max_abs = std::max(max_abs, std::abs(four.values[i] - second[i]));
    const double max_rel = max_relative_difference(four.values, second);
    char name[160];
    std::snprintf(name, sizeof name, "kernel_d%d_s%g_t%g.csv", g.dim(), op.s, t);
    emit_csv(inv, name, [&](std::ostream& os) { write_kernel_csv(os, x, four.values, second); });
    Json r;
    r["t"] = json_number(t);
    r["second_route"] = route;
    r["max_abs_diff"] = json_number(max_abs);
    r["max_rel_diff"] = json_number(max_rel);
    r["fourier_converged"] = four.converged;
    r["pass"] = max_rel < 1e-6;
    pass = pass && max_rel < 1e-6;
    rows.push_back(std::move(r));
    std::cout << "t=" << format_double(t) << " max_abs_diff=" << format_double(max_abs)
              << " max_rel_diff=" << format_double(max_rel) << "\n";
  }
  summary["rows"] = std::move(rows);
  summary["pass"] = pass;
  char name[96];
  std::snprintf(name, sizeof name, "kernel_d%d_s%g.json", g.dim(), op.s);
  emit_json(inv, name, summary);
  return pass ? 0 : 2;
}

int cmd_semigroup(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const ExperimentSettings& ex = rs.experiment;
  const int d = rs.grid.dim();
  const double p = rs.nl.p;
  const std::vector<double> t_list = or_default(ex.t_list, {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3});

  if (ex.semigroup_mode == "lq_lr") {
    const double q = or_default(ex.q_list, {1.0}).front();
    const double r = or_default(ex.r_list, {kInf}).front();
    const Field probe = make_datum(rs.grid, ex.datum);
    const LqLrTable tab = verify_lq_lr(rs.op, q, r, t_list, probe);
    std::vector<double> t, nr;
    for (const auto& row : tab.rows) {
      t.push_back(row.t);
      nr.push_back(row.norm_r);
    }
    Json j = to_json(tab);
    j["slope_early"] = json_number(loglog_slope(t, nr, ex.early_lo, ex.early_hi));
    j["slope_late"] = json_number(loglog_slope(t, nr, ex.late_lo, ex.late_hi));
    j["early_window"] = Json::array({json_number(ex.early_lo), json_number(ex.early_hi)});
    j["late_window"] = Json::array({json_number(ex.late_lo), json_number(ex.late_hi)});
    const bool pass = std::isfinite(tab.sup_ratio);
    j["pass"] = pass;
    const std::string stem = "lq_lr_" + artifact_stem(d, rs.op.s, rs.nl.m, p, q);
    emit_csv(inv, stem + ".csv", [&](std::ostream& os) { write_lq_lr_csv(os, tab); });
    emit_json(inv, stem + ".json", j);
    std::cout << "sup_ratio=" << format_double(tab.sup_ratio) << " slope_early=" << j["slope_early"].dump()
              << " slope_late=" << j["slope_late"].dump() << "\n";
    return pass ? 0 : 2;
  }

  std::vector<Grid> ladder;
  for (std::size_t i = 0; i < ex.ladder_n.size(); ++i)
    ladder.push_back(Grid::make(d, static_cast<std::size_t>(ex.ladder_n[i]), ex.ladder_box[i]));
  if (ladder.empty()) ladder.push_back(rs.grid);
  const std::vector<double> q_list = or_default(ex.q_list, {1.0});
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < q_list.size(); ++i)
    pairs.emplace_back(q_list[i], i < ex.r_list.size() ? ex.r_list[i] : q_list[i]);
  const auto probes = default_probes(ex.probe_width, ex.datum.seed);
  const SemigroupCampaign c = semigroup_campaign(rs.op, ladder, t_list, probes, p, pairs);
  const std::string stem = "semigroup_" + artifact_stem(d, rs.op.s, rs.nl.m, p, q_list.front());
  emit_csv(inv, stem + ".csv", [&](std::ostream& os) { write_semigroup_csv(os, c); });
  emit_json(inv, stem + ".json", to_json(c));
  std::cout << "violations=" << c.violations << " max_excess=" << format_double(c.max_excess);
  for (std::size_t k = 0; k < pairs.size(); ++k) std::cout << " sup_ratio2[" << k << "]=" << format_double(c.sup_ratio2[k]);
  std::cout << " uncovered_times=" << c.uncovered_times << "\n";
  return c.violations == 0 ? 0 : 2;
}

int cmd_orlicz(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const Field u = make_datum(rs.grid, rs.experiment.datum);
  const OrliczNorm n = luxemburg_norm(u, YoungFunction::make(rs.experiment.young, rs.nl.p));
  const Json j = to_json(n);
  emit_json(inv, "orlicz.json", j);
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_decay(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const MixedOperator op(rs.op, rs.grid);
  const Field u0 = make_datum(rs.grid, rs.experiment.datum);
  const RunReport rep = integrate(u0, rs.solver, op, rs.nl);
  emit_json(inv, "report.json", to_json(rep));
  emit_csv(inv, "series.csv", [&](std::ostream& os) { write_series_csv(os, rep); });
  if (rep.verdict != Verdict::reached_t_end) {
    std::cout << to_string(rep.verdict) << " at t=" << format_double(rep.t_final) << "; no fit\n";
    return 2;
  }
  const std::vector<double> q_list = or_default(rs.experiment.q_list, rs.solver.record_q);
  const int d = rs.grid.dim();
  const auto fits = decay_campaign(rep, d, rs.op.s, rs.nl.m, q_list, rs.experiment.buffer_decades);
  bool pass = true;
  Json j;
  j["max_boundary_fraction"] = json_number(rep.max_boundary_fraction);
  Json arr = Json::array();
  for (const auto& f : fits) {
    pass = pass && f.trend_ok;
    arr.push_back(to_json(f));
    std::cout << "q=" << format_double(f.q) << " sigma=" << format_double(f.sigma_theory)
              << " envelope_trend=" << format_double(f.envelope_trend) << " slope_early="
              << format_double(f.slope_early) << " slope_late=" << format_double(f.slope_late) << "\n";
  }
  j["fits"] = std::move(arr);
  j["pass"] = pass;
  const std::string stem = "decay_" + artifact_stem(d, rs.op.s, rs.nl.m, rs.nl.p, q_list.front());
  emit_csv(inv, stem + ".csv", [&](std::ostream& os) { write_decay_csv(os, rep, fits, rs.op.s); });
  emit_json(inv, stem + ".json", j);
  return pass ? 0 : 2;
}

int cmd_kappa(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const int d = rs.grid.dim();
  const double p = rs.nl.p, s = rs.op.s;
  KappaResult k;
  std::string name;
  if (rs.experiment.kappa_borderline) {
    k = kappa2_integral(d, p, s, rs.experiment.log_extent);
    name = "kappa2_" + artifact_stem(d, s, rs.nl.m, p, 0.0);
  } else {
    const double r = or_default(rs.experiment.r_list, {2.0}).front();
    k = kappa_integral(d, p, s, r, rs.experiment.log_extent);
    char buf[64];
    std::snprintf(buf, sizeof buf, "_r%g", r);
    name = "kappa_" + artifact_stem(d, s, rs.nl.m, p, 0.0) + buf;
  }
  const Json j = to_json(k);
  emit_json(inv, name + ".json", j);
  std::cout << j.dump() << "\n";
  return k.converged ? 0 : 2;
}

int cmd_sigma(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const std::vector<double> q_list = or_default(rs.experiment.q_list, {4.0, 4.5});
  const SigmaTable tab = sigma_table(rs.grid.dim(), rs.op.s, rs.nl.m, rs.nl.p, q_list);
  const std::string stem = "sigma_" + artifact_stem(tab.d, tab.s, tab.m, tab.p, q_list.front());
  emit_csv(inv, stem + ".csv", [&](std::ostream& os) { write_sigma_csv(os, tab); });
  emit_json(inv, stem + ".json", to_json(tab));
  bool all = tab.exponent_hypothesis;
  for (const auto& r : tab.rows) {
    all = all && r.window.admissible;
    std::cout << "q=" << format_double(r.q) << " sigma=" << format_double(r.sigma)
              << " regime=" << to_string(r.window.regime) << " admissible=" << (r.window.admissible ? "yes" : "no");
    if (!r.window.admissible) std::cout << " violated: " << r.window.violated;
    std::cout << "\n";
  }
  return all ? 0 : 2;
}

int cmd_fujita(const Invocation& inv) {
  const RunSetup rs = load_setup(inv);
  const std::vector<double> m_list = or_default(rs.experiment.m_list, {1.5, 3.0});
  const std::vector<double> scales = or_default(rs.experiment.scale_list, {1e-3, 1e-1, 1.0});
  const FujitaTable tab = fujita_sweep(rs.grid, rs.op, m_list, scales, rs.solver, rs.experiment.datum);
  const std::string stem = "fujita_" + artifact_stem(tab.d, tab.s, m_list.front(), rs.nl.p, 0.0);
  emit_csv(inv, stem + ".csv", [&](std::ostream& os) { write_fujita_csv(os, tab); });
  emit_json(inv, stem + ".json", to_json(tab));
  for (const auto& c : tab.cells)
    std::cout << "m=" << format_double(c.m) << " scale=" << format_double(c.scale) << " "
              << to_string(c.classification) << " (" << to_string(c.verdict) << ", t=" << format_double(c.t_final)
              << ")\n";
  return tab.subcritical_all_blow_up && tab.supercritical_small_global ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral solver and verification suite for u_t + (-Lap)u + (-Lap)^s u = f(u)"};
  app.require_subcommand(1);
  Invocation inv;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Invocation&);
  };
  const std::vector<Entry> entries = {
      {"simulate", "integrate the mild equation; writes report.json and series.csv", cmd_simulate},
      {"kernel", "heat kernel by the Fourier and subordination routes", cmd_kernel},
      {"semigroup-verify", "semigroup bounds in exp L^p or L^q-L^r", cmd_semigroup},
      {"orlicz-norm", "Luxemburg norm of the configured datum", cmd_orlicz},
      {"decay-fit", "integrate and fit the decay envelope", cmd_decay},
      {"kappa", "integrability of the kappa weight", cmd_kappa},
      {"sigma-table", "sigma and the admissible q window", cmd_sigma},
      {"fujita-sweep", "blow-up versus decay over (m, scale)", cmd_fujita},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("config", inv.config_path, "config file")->required();
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--set", inv.overrides, "override a config key (key=value); repeatable");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (subs[i]->parsed()) return entries[i].run(inv);
  } catch (const ConfigError& e) {
    std::cerr << inv.config_path << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
