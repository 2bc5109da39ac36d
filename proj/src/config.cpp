#include "mlheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mlheat {

namespace {

std::string format_error(std::size_t line, const std::string& key, const std::string& what) {
  std::string msg;
  if (line != 0) msg += "line " + std::to_string(line) + ": ";
  if (!key.empty()) msg += "key '" + key + "': ";
  return msg + what;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") {
    out = kInf;
    return true;
  }
  if (t == "-inf") {
    out = -kInf;
    return true;
  }
  const char* b = t.data();
  const char* e = b + t.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && b != e && !std::isnan(out);
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& key, const std::string& what)
    : std::runtime_error(format_error(line, key, what)), line_(line), key_(key) {}

const std::vector<KeyInfo>& config_schema() {
  static const std::vector<KeyInfo> schema = {
      {"grid.dim", "1", "spatial dimension, 1 or 2"},
      {"grid.n", "1024", "points per axis, power of two >= 8"},
      {"grid.box_len", "64", "side length L of the periodic box [-L/2, L/2)^d"},
      {"op.s", "0.5", "fractional order s in (0, 1)"},
      {"op.a", "1", "weight of -Lap"},
      {"op.b", "1", "weight of (-Lap)^s"},
      {"nl.m", "3", "power m >= 1"},
      {"nl.p", "2", "exponent p > 1"},
      {"nl.lambda", "1", "lambda >= 0"},
      {"nl.sign", "1", "+1 focusing, -1 defocusing"},
      {"nl.mode", "exponential", "exponential | pure_power | none"},
      {"solver.t_end", "1", "final time"},
      {"solver.dt_init", "1e-3", "initial (or fixed) step"},
      {"solver.dt_min", "1e-10", "smallest adaptive step"},
      {"solver.dt_max", "inf", "largest adaptive step"},
      {"solver.scheme", "etdrk2", "exp_euler | etdrk2"},
      {"solver.adaptive", "true", "step-doubling error control"},
      {"solver.step_tol", "1e-6", "relative sup-norm step tolerance"},
      {"solver.picard", "false", "fixed-point corrector after each step"},
      {"solver.picard_tol", "1e-12", "corrector tolerance"},
      {"solver.picard_max_iter", "50", "corrector iteration cap"},
      {"solver.blowup_threshold", "1e4", "threshold on ||u||_p + ||u||_inf"},
      {"solver.boundary_mass_tol", "1e-2", "largest L^1 fraction in the shell |x| > 0.4 L"},
      {"solver.max_steps", "2000000", "accepted-step cap"},
      {"solver.record_times", "", "comma-separated record times in (0, t_end]"},
      {"solver.record_q", "", "comma-separated q >= 1 for recorded L^q norms"},
      {"experiment.datum", "gaussian", "gaussian | cell | delta | cosine | constant | zero | rough"},
      {"experiment.amplitude", "1", "datum amplitude"},
      {"experiment.width", "1", "Gaussian width or rough-field support radius"},
      {"experiment.mode_index", "1", "wave index of the cosine datum"},
      {"experiment.seed", "12345", "seed of the rough datum"},
      {"experiment.t_list", "", "evaluation times (kernel, semigroup-verify)"},
      {"experiment.q_list", "", "q values"},
      {"experiment.r_list", "", "r values, paired with q_list where used"},
      {"experiment.m_list", "", "powers for fujita-sweep"},
      {"experiment.scale_list", "", "datum scales for fujita-sweep"},
      {"experiment.ladder_n", "", "grid ladder point counts for semigroup-verify"},
      {"experiment.ladder_box", "", "grid ladder box lengths for semigroup-verify"},
      {"experiment.x_max", "0", "kernel output range |x| <= x_max; 0 means L/4"},
      {"experiment.young", "exp_lp", "exp_lp | exp_lp_reduced | power"},
      {"experiment.kappa_borderline", "false", "use the borderline kappa with s = d(p-1)/(2p)"},
      {"experiment.log_extent", "30", "kappa quadrature half-range in ln t"},
      {"experiment.buffer_decades", "0.5", "decay-fit exclusion around t = 1"},
      {"experiment.semigroup_mode", "exp_lp", "exp_lp | lq_lr"},
      {"experiment.early_lo", "1e-3", "lower end of the early slope window"},
      {"experiment.early_hi", "1e-1", "upper end of the early slope window"},
      {"experiment.late_lo", "1e1", "lower end of the late slope window"},
      {"experiment.late_hi", "1e3", "upper end of the late slope window"},
      {"experiment.probe_width", "0.25", "base width of the semigroup probes"},
  };
  return schema;
}

namespace {

const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : config_schema())
    if (k.key == key) return &k;
  return nullptr;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string body = trim(raw);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "", "missing key before '='");
    if (!find_key(key)) throw ConfigError(line, key, "unknown key");
    if (cfg.has(key))
      throw ConfigError(line, key, "repeated key (first set on line " + std::to_string(cfg.lines_[key]) + ")");
    cfg.values_[key] = value;
    cfg.lines_[key] = line;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::render() const {
  std::string out;
  for (const auto& k : config_schema()) {
    const auto it = values_.find(k.key);
    if (it == values_.end()) continue;
    out += k.key;
    out += it->second.empty() ? " =" : " = " + it->second;
    out += '\n';
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError(0, key, "unknown key");
  values_[key] = trim(value);
  lines_.erase(key);
}

std::string Config::get(const std::string& key) const {
  const KeyInfo* info = find_key(key);
  if (!info) throw ConfigError(0, key, "unknown key");
  const auto it = values_.find(key);
  return it == values_.end() ? info->default_value : it->second;
}

std::size_t Config::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

double Config::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_real(get(key), v)) throw ConfigError(line_of(key), key, "expected a real number, got '" + get(key) + "'");
  return v;
}

long Config::get_int(const std::string& key) const {
  const std::string t = get(key);
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(line_of(key), key, "expected an integer, got '" + t + "'");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string t = get(key);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(line_of(key), key, "expected true or false, got '" + t + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  const std::string t = get(key);
  if (trim(t).empty()) return out;
  std::istringstream in(t);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    if (!parse_real(item, v))
      throw ConfigError(line_of(key), key, "expected a comma-separated list of reals, got '" + t + "'");
    out.push_back(v);
  }
  return out;
}

namespace {

// Runs fn; std::invalid_argument becomes a ConfigError anchored at `key`.
template <class Fn>
auto anchored(const Config& cfg, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.line_of(key), key, e.what());
  }
}

// First of `keys` that is set in cfg (for attributing cross-key errors).
std::string first_set(const Config& cfg, std::initializer_list<const char*> keys) {
  std::string best;
  std::size_t best_line = 0;
  for (const char* k : keys)
    if (cfg.has(k) && (best.empty() || cfg.line_of(k) < best_line)) {
      best = k;
      best_line = cfg.line_of(k);
    }
  return best.empty() ? *keys.begin() : best;
}

}  // namespace

RunSetup build_setup(const Config& cfg) {
  RunSetup rs;
  const long dim = cfg.get_int("grid.dim");
  const long n = cfg.get_int("grid.n");
  if (n < 0) throw ConfigError(cfg.line_of("grid.n"), "grid.n", "must be positive");
  const double box = cfg.get_double("grid.box_len");
  if (dim != 1 && dim != 2) throw ConfigError(cfg.line_of("grid.dim"), "grid.dim", "must be 1 or 2");
  rs.grid = anchored(cfg, first_set(cfg, {"grid.n", "grid.box_len"}),
                     [&] { return Grid::make(static_cast<int>(dim), static_cast<std::size_t>(n), box); });

  const double s = cfg.get_double("op.s"), a = cfg.get_double("op.a"), b = cfg.get_double("op.b");
  rs.op = anchored(cfg, first_set(cfg, {"op.s", "op.a", "op.b"}), [&] { return OperatorParams::make(s, a, b); });

  const double m = cfg.get_double("nl.m"), p = cfg.get_double("nl.p"), lam = cfg.get_double("nl.lambda");
  const long sign = cfg.get_int("nl.sign");
  const auto mode = anchored(cfg, "nl.mode", [&] { return nonlinearity_mode_from_string(cfg.get("nl.mode")); });
  rs.nl = anchored(cfg, first_set(cfg, {"nl.m", "nl.p", "nl.lambda", "nl.sign"}),
                   [&] { return NonlinearitySpec::make(m, p, lam, static_cast<int>(sign), mode); });

  SolverConfig& sc = rs.solver;
  sc.t_end = cfg.get_double("solver.t_end");
  sc.dt_init = cfg.get_double("solver.dt_init");
  sc.dt_min = cfg.get_double("solver.dt_min");
  sc.dt_max = cfg.get_double("solver.dt_max");
  sc.scheme = anchored(cfg, "solver.scheme", [&] { return scheme_from_string(cfg.get("solver.scheme")); });
  sc.adaptive = cfg.get_bool("solver.adaptive");
  sc.step_tol = cfg.get_double("solver.step_tol");
  sc.picard.enabled = cfg.get_bool("solver.picard");
  sc.picard.tol = cfg.get_double("solver.picard_tol");
  sc.picard.max_iter = static_cast<int>(cfg.get_int("solver.picard_max_iter"));
  sc.blowup_threshold = cfg.get_double("solver.blowup_threshold");
  sc.boundary_mass_tol = cfg.get_double("solver.boundary_mass_tol");
  const long max_steps = cfg.get_int("solver.max_steps");
  if (max_steps <= 0) throw ConfigError(cfg.line_of("solver.max_steps"), "solver.max_steps", "must be positive");
  sc.max_steps = static_cast<std::size_t>(max_steps);
  sc.record_times = cfg.get_list("solver.record_times");
  sc.record_q = cfg.get_list("solver.record_q");
  anchored(cfg,
           first_set(cfg, {"solver.t_end", "solver.dt_init", "solver.dt_min", "solver.dt_max", "solver.step_tol",
                           "solver.picard_tol", "solver.picard_max_iter", "solver.blowup_threshold",
                           "solver.boundary_mass_tol", "solver.record_times", "solver.record_q"}),
           [&] {
             sc.validate();
             return 0;
           });

  ExperimentSettings& ex = rs.experiment;
  ex.datum.kind =
      anchored(cfg, "experiment.datum", [&] { return datum_kind_from_string(cfg.get("experiment.datum")); });
  ex.datum.amplitude = cfg.get_double("experiment.amplitude");
  ex.datum.width = cfg.get_double("experiment.width");
  if (!(ex.datum.width > 0.0))
    throw ConfigError(cfg.line_of("experiment.width"), "experiment.width", "must be positive");
  ex.datum.mode_index = static_cast<int>(cfg.get_int("experiment.mode_index"));
  const long seed = cfg.get_int("experiment.seed");
  if (seed < 0) throw ConfigError(cfg.line_of("experiment.seed"), "experiment.seed", "must be >= 0");
  ex.datum.seed = static_cast<std::uint64_t>(seed);
  ex.t_list = cfg.get_list("experiment.t_list");
  for (double t : ex.t_list)
    if (!(t > 0.0) || !std::isfinite(t))
      throw ConfigError(cfg.line_of("experiment.t_list"), "experiment.t_list", "times must be positive and finite");
  ex.q_list = cfg.get_list("experiment.q_list");
  for (double q : ex.q_list)
    if (!(q >= 1.0)) throw ConfigError(cfg.line_of("experiment.q_list"), "experiment.q_list", "q must be >= 1");
  ex.r_list = cfg.get_list("experiment.r_list");
  for (double r : ex.r_list)
    if (!(r >= 1.0)) throw ConfigError(cfg.line_of("experiment.r_list"), "experiment.r_list", "r must be >= 1");
  ex.m_list = cfg.get_list("experiment.m_list");
  for (double mm : ex.m_list)
    if (!(mm >= 1.0) || !std::isfinite(mm))
      throw ConfigError(cfg.line_of("experiment.m_list"), "experiment.m_list", "m must be finite and >= 1");
  ex.scale_list = cfg.get_list("experiment.scale_list");
  for (double sc2 : ex.scale_list)
    if (!(sc2 >= 0.0) || !std::isfinite(sc2))
      throw ConfigError(cfg.line_of("experiment.scale_list"), "experiment.scale_list", "scales must be finite and >= 0");
  ex.ladder_n = cfg.get_list("experiment.ladder_n");
  ex.ladder_box = cfg.get_list("experiment.ladder_box");
  if (ex.ladder_n.size() != ex.ladder_box.size())
    throw ConfigError(cfg.line_of(first_set(cfg, {"experiment.ladder_n", "experiment.ladder_box"})),
                      first_set(cfg, {"experiment.ladder_n", "experiment.ladder_box"}),
                      "ladder_n and ladder_box must have equal length");
  for (std::size_t i = 0; i < ex.ladder_n.size(); ++i)
    anchored(cfg, "experiment.ladder_n", [&] {
      return Grid::make(rs.grid.dim(), static_cast<std::size_t>(ex.ladder_n[i]), ex.ladder_box[i]);
    });
  ex.x_max = cfg.get_double("experiment.x_max");
  if (!(ex.x_max >= 0.0)) throw ConfigError(cfg.line_of("experiment.x_max"), "experiment.x_max", "must be >= 0");
  ex.young = anchored(cfg, "experiment.young", [&] { return young_kind_from_string(cfg.get("experiment.young")); });
  ex.kappa_borderline = cfg.get_bool("experiment.kappa_borderline");
  ex.log_extent = cfg.get_double("experiment.log_extent");
  if (!(ex.log_extent > 0.0) || !std::isfinite(ex.log_extent))
    throw ConfigError(cfg.line_of("experiment.log_extent"), "experiment.log_extent", "must be positive and finite");
  ex.buffer_decades = cfg.get_double("experiment.buffer_decades");
  if (!(ex.buffer_decades >= 0.0))
    throw ConfigError(cfg.line_of("experiment.buffer_decades"), "experiment.buffer_decades", "must be >= 0");
  ex.semigroup_mode = cfg.get("experiment.semigroup_mode");
  if (ex.semigroup_mode != "exp_lp" && ex.semigroup_mode != "lq_lr")
    throw ConfigError(cfg.line_of("experiment.semigroup_mode"), "experiment.semigroup_mode",
                      "expected exp_lp or lq_lr, got '" + ex.semigroup_mode + "'");
  ex.early_lo = cfg.get_double("experiment.early_lo");
  ex.early_hi = cfg.get_double("experiment.early_hi");
  ex.late_lo = cfg.get_double("experiment.late_lo");
  ex.late_hi = cfg.get_double("experiment.late_hi");
  if (!(ex.early_lo > 0.0 && ex.early_lo < ex.early_hi))
    throw ConfigError(cfg.line_of("experiment.early_hi"), "experiment.early_hi", "need 0 < early_lo < early_hi");
  if (!(ex.late_lo > 0.0 && ex.late_lo < ex.late_hi))
    throw ConfigError(cfg.line_of("experiment.late_hi"), "experiment.late_hi", "need 0 < late_lo < late_hi");
  ex.probe_width = cfg.get_double("experiment.probe_width");
  if (!(ex.probe_width > 0.0))
    throw ConfigError(cfg.line_of("experiment.probe_width"), "experiment.probe_width", "must be positive");
  return rs;
}

}  // namespace mlheat
