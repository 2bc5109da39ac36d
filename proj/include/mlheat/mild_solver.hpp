#pragma once

#include <string>
#include <vector>

#include "mlheat/grid.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/nonlinearity.hpp"

namespace mlheat {

enum class Scheme { exp_euler, etdrk2 };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Fixed-point corrector applied after each predictor step (ETD trapezoid).
struct PicardSettings {
  bool enabled = false;
  double tol = 1e-12;
  int max_iter = 50;
};

struct SolverConfig {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_min = 1e-10;
  double dt_max = kInf;
  Scheme scheme = Scheme::etdrk2;
  PicardSettings picard;
  /// Blow-up threshold on ||u||_p + ||u||_inf (p from the nonlinearity).
  double blowup_threshold = 1e4;
  std::vector<double> record_times;
  std::vector<double> record_q;
  /// Step-doubling tolerance on the relative sup-norm difference.
  double step_tol = 1e-6;
  /// false: constant step dt_init (landing exactly on record times), no error
  /// control; the step is pinned, so a threshold crossing alone ends the run.
  bool adaptive = true;
  /// Largest L^1 fraction allowed in the outer shell |x| > 0.4 L.
  double boundary_mass_tol = 1e-2;
  std::size_t max_steps = 2000000;
  /// Keep a copy of u at every record time in RunReport::snapshots.
  bool keep_snapshots = false;

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

enum class Verdict { reached_t_end, blow_up_detected, aborted_boundary_mass, numeric_failure };
std::string to_string(Verdict v);

struct Sample {
  double t = 0.0;
  std::vector<double> norm_q;  ///< aligned with RunReport::record_q
  double norm_inf = 0.0;
  double norm_exp = 0.0;  ///< ||u||_{exp L^p}
  double boundary_fraction = 0.0;
};

struct PicardLogEntry {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> ratios;  ///< d_{k+1} / d_k
  bool converged = false;
};

struct RunReport {
  Verdict verdict = Verdict::reached_t_end;
  double t_final = 0.0;
  double dt_final = 0.0;
  std::vector<double> record_q;
  double exp_p = 2.0;
  Sample initial;
  std::vector<Sample> series;
  std::vector<PicardLogEntry> picard_log;
  std::size_t step_count = 0;
  std::size_t rejected_steps = 0;
  double max_boundary_fraction = 0.0;
  double threshold_norm = 0.0;  ///< ||u||_p + ||u||_inf at t_final
  std::string message;
  double wall_time = 0.0;
  std::vector<Field> snapshots;
};

/// (1 - e^{-z}) / z, series below 1e-5. Throws for z < 0.
double phi1(double z);
/// (z - 1 + e^{-z}) / z^2, series below 0.1; phi2(0) = 1/2. Throws for z < 0.
double phi2(double z);

struct StepResult {
  Field u;
  std::size_t sentinel_cells = 0;
};

/// u_{n+1} = e^{-dt L} u_n + dt phi1(dt m) F, F the transform of f(u_n).
StepResult step_exp_euler(const Field& u, double dt, const MixedOperator& op,
                          const NonlinearitySpec& nl);
/// Exponential-Euler predictor a, then u_{n+1} = a + dt phi2(dt m) (N(a) - N(u_n)).
StepResult step_etdrk2(const Field& u, double dt, const MixedOperator& op,
                       const NonlinearitySpec& nl);

/// L^1 fraction of u in the outer shell |x| > 0.4 L (max-norm in 2D).
double boundary_mass_fraction(const Field& u);

/// Marches the mild formulation from u0 to cfg.t_end; see Verdict for the
/// stopping rules. Throws std::invalid_argument for invalid cfg or non-finite u0.
RunReport integrate(const Field& u0, const SolverConfig& cfg, const MixedOperator& op,
                    const NonlinearitySpec& nl);

}  // namespace mlheat
