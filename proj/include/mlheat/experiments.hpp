#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlheat/grid.hpp"
#include "mlheat/mild_solver.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/nonlinearity.hpp"

namespace mlheat {

// ---------------------------------------------------------------------------
// Initial data and probes.

enum class DatumKind { gaussian, cell, delta, cosine, constant, zero, rough };
std::string to_string(DatumKind k);
DatumKind datum_kind_from_string(const std::string& name);

struct DatumSpec {
  DatumKind kind = DatumKind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;  ///< Gaussian std-dev; support radius for `rough`
  int mode_index = 1;  ///< wave index for `cosine`
  std::uint64_t seed = 12345;
};

/// gaussian: A exp(-|x|^2 / 2w^2); cell: A on the centre cell; delta: A / cell_volume
/// on the centre cell; cosine: A cos(2 pi k x / L) (product over axes);
/// constant: A; rough: i.i.d. uniform in [-A, A] on |x| <= w, zero outside.
Field make_datum(const Grid& g, const DatumSpec& spec);

/// Least-squares slope of log y against log t (points with y <= 0 are skipped).
/// Throws std::invalid_argument with fewer than two usable points.
double loglog_slope(std::span<const double> t, std::span<const double> y);
/// Same restricted to lo <= t <= hi.
double loglog_slope(std::span<const double> t, std::span<const double> y, double lo, double hi);

// ---------------------------------------------------------------------------
// q-admissibility table.

enum class Regime { s_less, s_equal, s_greater };
std::string to_string(Regime r);

struct QWindow {
  Regime regime = Regime::s_less;
  double lower_2q = 0.0;
  double upper_2q = kInf;
  bool admissible = false;
  std::string violated;  ///< the bound that fails, empty when admissible
};

struct SigmaRow {
  double q = 0.0;
  double sigma = 0.0;
  QWindow window;
};

struct SigmaTable {
  int d = 1;
  double s = 0.5, m = 3.0, p = 2.0;
  double s_critical = 0.0;          ///< d(p-1)/(2p)
  bool exponent_hypothesis = true;  ///< 1 < p <= d(m-1)/(2s)
  std::vector<SigmaRow> rows;
};

/// sigma = 1/(m-1) - d/(2sq) and the admissible window for 2q. Throws for
/// d < 1, s outside (0,1), or unless m >= p > 1.
SigmaTable sigma_table(int d, double s, double m, double p, std::span<const double> q_list);

// ---------------------------------------------------------------------------
// Decay fits.

struct DecayFit {
  double q = 0.0;
  double sigma_theory = 0.0;
  double early_lo = 0.0, early_hi = 0.0, late_lo = 0.0, late_hi = 0.0;
  double slope_early = 0.0;
  double slope_late = 0.0;
  double envelope_ratio_max = 0.0;  ///< sup_t ||u(t)||_q t_s^sigma
  double envelope_trend = 0.0;      ///< LS slope of log envelope over all records
  double envelope_trend_early = 0.0;
  double envelope_trend_late = 0.0;
  bool trend_ok = false;  ///< envelope_trend <= 0.05
};

/// Fits ||u(t)||_q from a finished run in the windows [t_a, 10^-buffer] and
/// [10^buffer, t_b]. Needs verdict reached_t_end, records spanning two decades
/// on each side of t = 1, and every q in run.record_q; throws otherwise.
std::vector<DecayFit> decay_campaign(const RunReport& run, int d, double s, double m,
                                     std::span<const double> q_list, double buffer_decades = 0.5);

// ---------------------------------------------------------------------------
// kappa integrability.

struct KappaResult {
  double value = 0.0;           ///< integral over t in [e^-2Y, e^2Y]
  double value_half = 0.0;      ///< integral over [e^-Y, e^Y]
  double relative_change = 0.0;
  bool numerically_finite = false;  ///< relative_change < 1%
  bool hypotheses_hold = false;
  bool converged = false;     ///< hypotheses_hold && numerically_finite
  std::string divergent_end;  ///< "small_t", "large_t", "both" or empty
};

/// kappa(t) = min{t_s^{-d/(2sr)} + 1, t_s^{-d/(2s)} (ln(t_s^{-d/(2s)} + 1))^{-1/p}},
/// integrated in y = ln t with Gauss-Kronrod over [-Y, Y] and [-2Y, 2Y].
KappaResult kappa_integral(int d, double p, double s, double r, double log_extent = 30.0);

/// Borderline kappa with s = d(p-1)/(2p): min{t_s^{-1/2} + 1,
/// t_s^{-d/(2s)} (ln(t_s^{-d/(2s)} + 1))^{-1/(2p)}}. Throws unless s is on
/// the borderline to 1e-12.
KappaResult kappa2_integral(int d, double p, double s, double log_extent = 30.0);

// ---------------------------------------------------------------------------
// Fujita sweep.

enum class FujitaClass { blow_up, global_decay, inconclusive };
std::string to_string(FujitaClass c);

struct FujitaCell {
  double m = 0.0;
  double scale = 0.0;
  Verdict verdict = Verdict::reached_t_end;
  FujitaClass classification = FujitaClass::inconclusive;
  double t_final = 0.0;
  double initial_inf = 0.0;
  double final_inf = 0.0;
  double max_boundary_fraction = 0.0;
  bool torus_caveat = false;  ///< the boundary monitor ended or limited the run
  std::size_t steps = 0;
};

struct FujitaTable {
  int d = 1;
  double s = 0.5;
  double p_c = 0.0;  ///< 1 + 2s/d
  std::vector<FujitaCell> cells;  ///< sorted by (m, scale)
  bool subcritical_all_blow_up = false;    ///< every m < p_c cell blew up
  bool supercritical_small_global = false; ///< smallest scale of every m > p_c decayed
};

/// Runs integrate for each (m, scale) with f(u) = |u|^{m-1}u and datum
/// scale * shape (shape.amplitude is ignored). Cells run concurrently.
FujitaTable fujita_sweep(const Grid& grid, const OperatorParams& op, std::span<const double> m_list,
                         std::span<const double> scale_list, const SolverConfig& cfg,
                         const DatumSpec& shape);

// ---------------------------------------------------------------------------
// Semigroup envelopes in exp L^p.

struct ProbeSpec {
  std::string name;
  DatumSpec datum;
};

/// Single-cell indicator, Gaussians of widths {w, 4w, 16w} and a rough random field.
std::vector<ProbeSpec> default_probes(double base_width = 0.25, std::uint64_t seed = 7);

struct SemigroupRow {
  std::size_t grid_index = 0;
  std::string probe;
  double t = 0.0;
  double exp_norm_before = 0.0;
  double exp_norm_after = 0.0;
  double excess = 0.0;  ///< after - before (<= 1e-9 required)
  bool resolved = false;   ///< t * max m >= 40 on this grid
  bool monitored = false;  ///< boundary fraction within tolerance
  double boundary_fraction = 0.0;
  std::vector<double> ratio2;  ///< per (q, r) pair: property (2) ratio
  std::vector<double> ratio3;  ///< per (q, r) pair: property (3) ratio
};

struct SemigroupCampaign {
  double p = 2.0;
  std::vector<std::pair<double, double>> q_r_pairs;
  std::vector<SemigroupRow> rows;
  std::size_t violations = 0;      ///< non-expansiveness breaches
  double max_excess = 0.0;
  std::vector<double> sup_ratio2;  ///< per pair, over monitored rows
  std::vector<double> sup_ratio3;
  std::size_t uncovered_times = 0; ///< t values with no resolved, monitored grid
};

/// For each grid of the ladder and each probe: non-expansiveness at every
/// resolved t, and the property-(2)/(3) ratios where the boundary fraction
/// of e^{-tL} probe stays below boundary_tol. Requires 1 <= q <= p per pair.
SemigroupCampaign semigroup_campaign(const OperatorParams& op, std::span<const Grid> ladder,
                                     std::span<const double> t_list, std::span<const ProbeSpec> probes,
                                     double p, std::span<const std::pair<double, double>> q_r_pairs,
                                     double boundary_tol = 1e-2);

}  // namespace mlheat
