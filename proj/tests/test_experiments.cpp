#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mlheat/experiments.hpp"
#include "mlheat/orlicz.hpp"

using namespace mlheat;

TEST_CASE("initial data") {
  const Grid g = Grid::make(1, 64, 16.0);
  const Field gauss = make_datum(g, {DatumKind::gaussian, 2.0, 1.0});
  CHECK(gauss[32] == 2.0);
  CHECK(gauss[36] == doctest::Approx(2.0 * std::exp(-0.5)));
  const Field cell = make_datum(g, {DatumKind::cell, 3.0});
  CHECK(cell[32] == 3.0);
  CHECK(lq_norm(cell, 1.0) == doctest::Approx(3.0 * g.dx()));
  const Field delta = make_datum(g, {DatumKind::delta});
  CHECK(lq_norm(delta, 1.0) == doctest::Approx(1.0));
  const Field cosine = make_datum(g, {DatumKind::cosine, 1.0, 1.0, 3});
  CHECK(cosine[0] == doctest::Approx(-1.0));
  CHECK(lq_norm(make_datum(g, {DatumKind::zero}), kInf) == 0.0);
  CHECK(lq_norm(make_datum(g, {DatumKind::constant, 0.5}), kInf) == 0.5);

  const Field r1 = make_datum(g, {DatumKind::rough, 1.0, 2.0, 1, 99});
  const Field r2 = make_datum(g, {DatumKind::rough, 1.0, 2.0, 1, 99});
  const Field r3 = make_datum(g, {DatumKind::rough, 1.0, 2.0, 1, 100});
  CHECK(r1.values == r2.values);
  CHECK(r1.values != r3.values);
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(std::abs(r1[i]) <= 1.0);
    if (std::abs(g.node(i)) > 2.0) CHECK(r1[i] == 0.0);
  }

  const Grid g2 = Grid::make(2, 16, 8.0);
  CHECK(lq_norm(make_datum(g2, {DatumKind::delta}), 1.0) == doctest::Approx(1.0));
  CHECK(make_datum(g2, {DatumKind::gaussian})[8 * 16 + 8] == 1.0);

  CHECK(datum_kind_from_string(to_string(DatumKind::rough)) == DatumKind::rough);
  CHECK_THROWS_AS(datum_kind_from_string("box"), std::invalid_argument);
  CHECK_THROWS_AS(make_datum(g, {DatumKind::gaussian, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("loglog_slope") {
  const std::vector<double> t = {1, 10, 100, 1000};
  std::vector<double> y;
  for (double v : t) y.push_back(3.0 * std::pow(v, -1.5));
  CHECK(loglog_slope(t, y) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(loglog_slope(t, y, 5.0, 2000.0) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope(t, y, 50.0, 200.0), std::invalid_argument);
  const std::vector<double> with_zero = {1.0, 0.0, 1e-3, std::pow(1000.0, -1.5)};
  CHECK(loglog_slope(t, with_zero) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("sigma table") {
  const std::vector<double> qs = {4.0, 4.5};
  const SigmaTable tab = sigma_table(1, 0.5, 3.0, 2.0, qs);
  CHECK(tab.s_critical == 0.25);
  CHECK(tab.exponent_hypothesis);
  REQUIRE(tab.rows.size() == 2);
  CHECK(tab.rows[0].sigma == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(tab.rows[0].window.regime == Regime::s_greater);
  CHECK(tab.rows[0].window.lower_2q == 8.0);
  CHECK(std::isinf(tab.rows[0].window.upper_2q));
  CHECK_FALSE(tab.rows[0].window.admissible);
  CHECK(tab.rows[0].window.violated == "2q > 2(m-1)p/(p-1)");
  CHECK(tab.rows[1].window.admissible);
  CHECK(tab.rows[1].sigma == doctest::Approx(0.5 - 1.0 / 4.5).epsilon(1e-15));
  CHECK(tab.rows[1].window.violated.empty());

  SUBCASE("s_less uses d(m-1)/s") {
    const std::vector<double> q = {20.0, 7.0};
    const SigmaTable t2 = sigma_table(2, 0.25, 3.0, 2.0, q);
    CHECK(t2.rows[0].window.regime == Regime::s_less);
    CHECK(t2.rows[0].window.lower_2q == doctest::Approx(16.0));
    CHECK(t2.rows[0].window.admissible);
    CHECK_FALSE(t2.rows[1].window.admissible);
    CHECK(t2.rows[1].window.violated == "2q > d(m-1)/s");
  }
  SUBCASE("s_equal") {
    const std::vector<double> q = {10.0};
    CHECK(sigma_table(2, 0.5, 3.0, 2.0, q).rows[0].window.regime == Regime::s_equal);
  }
  SUBCASE("finite upper bound when m < 2") {
    const std::vector<double> q = {2.0, 50.0};
    const SigmaTable t3 = sigma_table(1, 0.2, 1.5, 1.5, q);
    CHECK(t3.rows[0].window.upper_2q == doctest::Approx(1 * 0.5 / (0.2 * 0.5)));
    CHECK_FALSE(t3.rows[1].window.admissible);
    CHECK(t3.rows[1].window.violated == "2q < d(m-1)/(s(2-m)_+)");
  }
  SUBCASE("permuting q_list permutes the rows") {
    const std::vector<double> a = {3.0, 4.5, 9.0, 5.25}, b = {9.0, 5.25, 3.0, 4.5};
    const SigmaTable ta = sigma_table(1, 0.5, 3.0, 2.0, a), tb = sigma_table(1, 0.5, 3.0, 2.0, b);
    for (const auto& ra : ta.rows) {
      const auto it = std::find_if(tb.rows.begin(), tb.rows.end(), [&](const SigmaRow& r) { return r.q == ra.q; });
      REQUIRE(it != tb.rows.end());
      CHECK(it->sigma == ra.sigma);
      CHECK(it->window.admissible == ra.window.admissible);
      CHECK(it->window.violated == ra.window.violated);
    }
  }
  CHECK_THROWS_AS(sigma_table(0, 0.5, 3.0, 2.0, qs), std::invalid_argument);
  CHECK_THROWS_AS(sigma_table(1, 1.0, 3.0, 2.0, qs), std::invalid_argument);
  CHECK_THROWS_AS(sigma_table(1, 0.5, 1.5, 2.0, qs), std::invalid_argument);
}

// Reference integrals over (0, inf) from 30-digit quadrature.
TEST_CASE("kappa integrals") {
  const KappaResult k = kappa_integral(2, 2.0, 0.4, 2.0);
  CHECK(k.hypotheses_hold);
  CHECK(k.numerically_finite);
  CHECK(k.converged);
  CHECK(k.divergent_end.empty());
  CHECK(k.value == doctest::Approx(6.66942864237906556).epsilon(1e-10));

  const KappaResult above = kappa_integral(2, 2.0, 0.6, 2.0);
  CHECK_FALSE(above.hypotheses_hold);
  CHECK_FALSE(above.converged);

  const KappaResult small_r = kappa_integral(2, 2.0, 0.4, 1.0);
  CHECK_FALSE(small_r.hypotheses_hold);
  CHECK_FALSE(small_r.numerically_finite);
  CHECK(small_r.divergent_end == "small_t");

  const KappaResult b1 = kappa2_integral(1, 2.0, 0.25);
  CHECK(b1.converged);
  CHECK(b1.relative_change < 0.01);
  CHECK(b1.value == doctest::Approx(3.66418672006352301).epsilon(1e-10));
  const KappaResult b2 = kappa2_integral(2, 2.0, 0.5);
  CHECK(b2.converged);
  CHECK(b2.value == doctest::Approx(4.04277804365958317).epsilon(1e-10));
  CHECK_THROWS_AS(kappa2_integral(1, 2.0, 0.35), std::invalid_argument);
}

TEST_CASE("decay campaign on a linear run") {
  const Grid g = Grid::make(1, 65536, 16384.0);
  const MixedOperator op(OperatorParams::make(0.5), g);
  const Field u0 = make_datum(g, {DatumKind::gaussian, 1.0, 1.0});
  SolverConfig cfg;
  cfg.t_end = 100.0;
  cfg.record_q = {2.0, 4.0};
  for (int k = 0; k <= 32; ++k) cfg.record_times.push_back(std::pow(10.0, -2.0 + k / 8.0));
  const RunReport run = integrate(u0, cfg, op, NonlinearitySpec::make(3, 2, 1, 1, NonlinearityMode::none));
  REQUIRE(run.verdict == Verdict::reached_t_end);
  const std::vector<double> qs = {2.0, 4.0};
  const auto fits = decay_campaign(run, 1, 0.5, 3.0, qs);
  REQUIRE(fits.size() == 2);
  for (const auto& f : fits) {
    CHECK(f.slope_late == doctest::Approx(-(1.0 - 1.0 / f.q)).epsilon(0.1 / (1.0 - 1.0 / f.q)));
    CHECK(f.sigma_theory == doctest::Approx(0.5 - 1.0 / f.q));
    CHECK(f.early_hi < 1.0);
    CHECK(f.late_lo > 1.0);
    CHECK(std::isfinite(f.envelope_ratio_max));
  }
  const std::vector<double> missing = {3.0};
  CHECK_THROWS_AS(decay_campaign(run, 1, 0.5, 3.0, missing), std::invalid_argument);
  RunReport short_run = run;
  short_run.series.resize(10);
  CHECK_THROWS_AS(decay_campaign(short_run, 1, 0.5, 3.0, qs), std::invalid_argument);
}

TEST_CASE("Fujita sweep") {
  const Grid g = Grid::make(1, 4096, 4096.0);
  SolverConfig cfg;
  cfg.t_end = 10.0;
  cfg.step_tol = 1e-4;
  cfg.dt_min = 1e-8;
  const std::vector<double> ms = {3.0}, scales = {1e-3, 10.0};
  const FujitaTable tab = fujita_sweep(g, OperatorParams::make(0.5), ms, scales, cfg, {DatumKind::gaussian, 1.0, 4.0});
  CHECK(tab.p_c == 2.0);
  REQUIRE(tab.cells.size() == 2);
  CHECK(tab.cells[0].scale == 1e-3);
  CHECK(tab.cells[0].classification == FujitaClass::global_decay);
  CHECK(tab.cells[0].final_inf < tab.cells[0].initial_inf);
  CHECK(tab.cells[1].classification == FujitaClass::blow_up);
  CHECK(tab.supercritical_small_global);
  CHECK_FALSE(tab.subcritical_all_blow_up);

  const std::vector<double> zero = {0.0};
  const FujitaTable z = fujita_sweep(g, OperatorParams::make(0.5), ms, zero, cfg, {DatumKind::gaussian});
  CHECK(z.cells[0].verdict == Verdict::reached_t_end);
}

TEST_CASE("semigroup campaign") {
  const auto op = OperatorParams::make(0.5);
  const std::vector<Grid> ladder = {Grid::make(1, 2048, 64.0), Grid::make(1, 8192, 4096.0)};
  const std::vector<double> ts = {1e-2, 1e-1, 1.0, 10.0};
  const auto probes = default_probes();
  REQUIRE(probes.size() == 5);
  const std::vector<std::pair<double, double>> qr = {{1.0, 2.0}, {2.0, 4.0}};
  const SemigroupCampaign c = semigroup_campaign(op, ladder, ts, probes, 2.0, qr);
  CHECK(c.violations == 0);
  CHECK(c.max_excess <= 1e-9);
  CHECK(c.rows.size() == ladder.size() * probes.size() * ts.size());
  CHECK(c.uncovered_times == 0);
  REQUIRE(c.sup_ratio2.size() == 2);
  for (double r : c.sup_ratio2) CHECK(std::isfinite(r));
  for (double r : c.sup_ratio3) CHECK(std::isfinite(r));
  CHECK(std::is_sorted(c.rows.begin(), c.rows.end(), [](const SemigroupRow& a, const SemigroupRow& b) {
    return std::tie(a.grid_index, a.probe, a.t) < std::tie(b.grid_index, b.probe, b.t);
  }));

  // A doubled probe set cannot lower the sup.
  auto more = probes;
  for (const auto& p : default_probes(0.1, 11)) more.push_back({p.name + "_b", p.datum});
  const SemigroupCampaign c2 = semigroup_campaign(op, ladder, ts, more, 2.0, qr);
  CHECK(c2.violations == 0);
  for (std::size_t i = 0; i < qr.size(); ++i) CHECK(c2.sup_ratio2[i] >= c.sup_ratio2[i]);

  const std::vector<std::pair<double, double>> bad = {{3.0, 4.0}};
  CHECK_THROWS_AS(semigroup_campaign(op, ladder, ts, probes, 2.0, bad), std::invalid_argument);
}
