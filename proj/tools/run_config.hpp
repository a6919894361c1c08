#pragma once

// Run configuration for the bbqec tool: an INI-style file of key = value pairs
// grouped in [tables], overridable from the command line.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "bbqec/constants.hpp"

namespace bbqec::cli {

/// Raised for unreadable or ill-typed config files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CodeConfig {
  std::string preset{"[[144,12,12]]"};
  // Inline definition; used instead of the preset when l > 0.
  std::string name;
  int l{0}, m{0};
  std::string a_terms, b_terms;  ///< three monomials separated by spaces, e.g. "x3 y y2"
  int n{0}, k{0}, d{0};
};

struct LayoutConfig {
  std::string r_search{"auto"};
  bool refine{true};
  std::string seed;  ///< "L1 L2 R1 R2 LR"; empty = search
  double dmax{0.0};  ///< > 0: place ancillas at exactly this distance
  std::string file;  ///< layout JSON consumed by `schedule`
};

struct GateConfig {
  int row{17};
  std::optional<double> omega_mhz, delta0_mhz, phase_amp, mod_freq_mhz, window_ns, t_gate_ns, v_mhz, lifetime_us;
  std::string weighting{"basis-average"};
  double rel_tol{1e-10}, abs_tol{1e-12}, grid_ns{0.1};
  int restarts{8}, evals{300};
};

struct ScheduleConfig {
  int restarts{50};
};

struct TimingConfig {
  double t_switch_us{1.5};
  double t_op_us{0.0};
  double t_meas_us{0.0};
};

struct SweepConfig {
  double t_switch_min{0.0}, t_switch_max{3.0}, t_switch_step{0.25};
  std::string op_meas{"0:0,170:500,170:1000"};  ///< (t_op:t_meas) pairs in us
};

struct RunConfig {
  unsigned long long seed{7};
  int jobs{1};
  double budget_secs{0.0};
  CodeConfig code;
  LayoutConfig layout;
  GateConfig gate;
  ScheduleConfig schedule;
  TimingConfig timing;
  SweepConfig sweep;
  PhysicalConstants constants;
  std::string out_dir;
  std::string formats{"json,csv"};

  bool wants(std::string_view fmt) const { return formats.find(fmt) != std::string::npos; }
};

/// Output directory: explicit setting, else $BBQEC_OUT_DIR, else ./bbqec-out.
inline std::string default_out_dir() {
  if (const char* env = std::getenv("BBQEC_OUT_DIR"); env && *env) return env;
  return "bbqec-out";
}

namespace detail {

namespace pt = boost::property_tree;

template <typename T>
void get(const pt::ptree& t, const std::string& key, T& v) {
  if (auto x = t.get_optional<T>(key)) v = *x;
  else if (t.get_child_optional(key))
    throw ConfigError("config key '" + key + "' has an invalid value '" + t.get<std::string>(key) + "'");
}

template <typename T>
void get(const pt::ptree& t, const std::string& key, std::optional<T>& v) {
  T x{};
  if (t.get_child_optional(key)) {
    get(t, key, x);
    v = x;
  }
}

template <typename T>
void put(pt::ptree& t, const std::string& key, const T& v) {
  t.put(key, v);
}

template <typename T>
void put(pt::ptree& t, const std::string& key, const std::optional<T>& v) {
  if (v) t.put(key, *v);
}

/// Applies `f(key, field)` to every serialized field; shared by load and save.
template <typename Cfg, typename F>
void visit(Cfg& c, F&& f) {
  f("run.seed", c.seed);
  f("run.jobs", c.jobs);
  f("run.budget_secs", c.budget_secs);
  f("code.preset", c.code.preset);
  f("code.name", c.code.name);
  f("code.l", c.code.l);
  f("code.m", c.code.m);
  f("code.a_terms", c.code.a_terms);
  f("code.b_terms", c.code.b_terms);
  f("code.n", c.code.n);
  f("code.k", c.code.k);
  f("code.d", c.code.d);
  f("layout.r_search", c.layout.r_search);
  f("layout.refine", c.layout.refine);
  f("layout.seed", c.layout.seed);
  f("layout.dmax", c.layout.dmax);
  f("layout.file", c.layout.file);
  f("gate.row", c.gate.row);
  f("gate.omega_mhz", c.gate.omega_mhz);
  f("gate.delta0_mhz", c.gate.delta0_mhz);
  f("gate.phase_amp", c.gate.phase_amp);
  f("gate.mod_freq_mhz", c.gate.mod_freq_mhz);
  f("gate.window_ns", c.gate.window_ns);
  f("gate.t_gate_ns", c.gate.t_gate_ns);
  f("gate.v_mhz", c.gate.v_mhz);
  f("gate.lifetime_us", c.gate.lifetime_us);
  f("gate.weighting", c.gate.weighting);
  f("gate.rel_tol", c.gate.rel_tol);
  f("gate.abs_tol", c.gate.abs_tol);
  f("gate.grid_ns", c.gate.grid_ns);
  f("gate.restarts", c.gate.restarts);
  f("gate.evals", c.gate.evals);
  f("schedule.restarts", c.schedule.restarts);
  f("timing.t_switch_us", c.timing.t_switch_us);
  f("timing.t_op_us", c.timing.t_op_us);
  f("timing.t_meas_us", c.timing.t_meas_us);
  f("sweep.t_switch_min", c.sweep.t_switch_min);
  f("sweep.t_switch_max", c.sweep.t_switch_max);
  f("sweep.t_switch_step", c.sweep.t_switch_step);
  f("sweep.op_meas", c.sweep.op_meas);
  f("constants.lattice_spacing_um", c.constants.lattice_spacing_um);
  f("constants.edge_time_ns", c.constants.edge_time_ns);
  f("constants.lifetime_50s_us", c.constants.lifetime_50s_us);
  f("constants.lifetime_83s_us", c.constants.lifetime_83s_us);
  f("constants.lifetime_90s_us", c.constants.lifetime_90s_us);
  f("constants.crosstalk_threshold", c.constants.crosstalk_threshold);
  f("constants.local_gate_fixed_us", c.constants.local_gate_fixed_us);
  f("constants.local_switch_units", c.constants.local_switch_units);
  f("output.dir", c.out_dir);
  f("output.formats", c.formats);
}

}  // namespace detail

/// Drops trailing "; ..." and "# ..." comments (the marker must follow whitespace).
inline std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i)
      if ((line[i] == ';' || line[i] == '#') && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
        line.erase(i);
        break;
      }
    out += line;
    out += '\n';
  }
  return out;
}

inline void apply_config_text(RunConfig& cfg, const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(strip_inline_comments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config key '" + section + "' must live inside a [table]");
    for (const auto& [key, value] : body) {
      bool known = false;
      detail::visit(cfg, [&](const std::string& k, auto&) { known = known || k == section + "." + key; });
      if (!known) throw ConfigError("unknown config key '" + section + "." + key + "'");
      (void)value;
    }
  }
  detail::visit(cfg, [&](const std::string& k, auto& field) { detail::get(tree, k, field); });
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  namespace pt = boost::property_tree;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

inline std::string to_config_text(const RunConfig& cfg) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  RunConfig copy = cfg;
  detail::visit(copy, [&](const std::string& k, auto& field) { detail::put(tree, k, field); });
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  RunConfig copy = cfg;
  detail::visit(copy, [&](const std::string& k, auto& field) {
    const auto dot = k.find('.');
    auto& section = j[k.substr(0, dot)];
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, std::optional<double>>) {
      if (field) section[k.substr(dot + 1)] = *field;
    } else {
      section[k.substr(dot + 1)] = field;
    }
  });
  return j;
}

/// "0:0,170:500" -> {(0,0), (170,500)}
inline std::vector<std::pair<double, double>> parse_op_meas(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("op_meas entry '" + item + "' must be t_op:t_meas");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("op_meas entry '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw ConfigError("op_meas list is empty");
  return out;
}

}  // namespace bbqec::cli
