#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlheat/experiments.hpp"
#include "mlheat/grid.hpp"
#include "mlheat/mild_solver.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/nonlinearity.hpp"
#include "mlheat/orlicz.hpp"

namespace mlheat {

/// Parse or validation failure. `line` is 0 when the problem is not tied to
/// a single line of the source text.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& key, const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Flat `key = value` document. Only keys that were set are stored; every
/// other key takes its documented default.
class Config {
 public:
  /// Text format: one `key = value` per line, `#` starts a comment, blank
  /// lines ignored. Unknown or repeated keys raise ConfigError.
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  /// Canonical text: set keys in schema order, `key = value`, LF endings.
  std::string render() const;

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Raw value, or the default when unset.
  std::string get(const std::string& key) const;
  /// Source line of a key (0 if set programmatically or unset).
  std::size_t line_of(const std::string& key) const;

  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma-separated reals; `inf` is accepted.
  std::vector<double> get_list(const std::string& key) const;

  bool operator==(const Config&) const = default;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
};

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string doc;
};

/// Every accepted key with its default and a one-line description.
const std::vector<KeyInfo>& config_schema();

/// Experiment-level settings that do not belong to a library module.
struct ExperimentSettings {
  DatumSpec datum;
  std::vector<double> t_list;
  std::vector<double> q_list;
  std::vector<double> r_list;
  std::vector<double> m_list;
  std::vector<double> scale_list;
  std::vector<double> ladder_n;
  std::vector<double> ladder_box;
  double x_max = 0.0;  ///< kernel output range; 0 means L/4
  YoungKind young = YoungKind::exp_lp;
  bool kappa_borderline = false;
  double log_extent = 30.0;
  double buffer_decades = 0.5;
  std::string semigroup_mode = "exp_lp";
  double early_lo = 1e-3, early_hi = 1e-1, late_lo = 1e1, late_hi = 1e3;
  double probe_width = 0.25;
};

/// Fully validated run description.
struct RunSetup {
  Grid grid = Grid::make(1, 8, 1.0);
  OperatorParams op;
  NonlinearitySpec nl;
  SolverConfig solver;
  ExperimentSettings experiment;
};

/// Builds and validates every module object; the first failure raises
/// ConfigError naming the key and, when known, its line.
RunSetup build_setup(const Config& cfg);

}  // namespace mlheat
