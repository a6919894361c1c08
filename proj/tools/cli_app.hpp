#pragma once

// The bbqec command-line tool. `run` is the whole program; main() only forwards
// argv so the tests can drive it in-process.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbqec/bbcode.hpp"
#include "bbqec/layout.hpp"
#include "bbqec/pulse_optimizer.hpp"
#include "bbqec/reproduction.hpp"
#include "bbqec/rydberg_gate.hpp"
#include "bbqec/scheduler.hpp"
#include "run_config.hpp"

namespace bbqec::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kUnknownPreset = 2,
  kBadConfig = 3,
  kInfeasibleLayout = 4,
  kRuntimeError = 5,
  kCheckFailed = 6,
};

struct UnknownPreset : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleLayout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Shared pieces

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline BBCodeSpec resolve_code(const RunConfig& cfg) {
  if (cfg.code.l > 0) {
    const auto a = split_words(cfg.code.a_terms), b = split_words(cfg.code.b_terms);
    if (a.size() != 3 || b.size() != 3) throw ConfigError("a_terms and b_terms need exactly three monomials each");
    try {
      return make_code(cfg.code.name.empty() ? "custom" : cfg.code.name, cfg.code.l, cfg.code.m, {a[0], a[1], a[2]},
                       {b[0], b[1], b[2]}, cfg.code.n, cfg.code.k, cfg.code.d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid code definition: ") + e.what());
    }
  }
  try {
    return find_code_preset(cfg.code.preset);
  } catch (const std::out_of_range& e) {
    throw UnknownPreset(e.what());
  }
}

inline json monomials_json(const std::array<Monomial, 3>& t) {
  return json::array({to_string(t[0]), to_string(t[1]), to_string(t[2])});
}

inline json seed_json(const LayoutSeed& s) {
  return {{"L1", to_string(s.l1)}, {"L2", to_string(s.l2)}, {"R1", to_string(s.r1)},
          {"R2", to_string(s.r2)}, {"LR", to_string(s.lr)}};
}

inline json positions_json(const Placement& p) {
  json arr = json::array();
  for (int s = 0; s < 4 * p.half(); ++s) {
    const QubitId q = p.qubit_at_slot(s);
    if (!p.placed(q)) continue;
    const Coord c = p.position(q);
    arr.push_back({{"qubit", to_string(q)}, {"row", c.row}, {"col", c.col}});
  }
  return arr;
}

inline QubitId parse_qubit(const std::string& s) {
  if (s.size() < 2) throw std::invalid_argument("bad qubit label '" + s + "'");
  return {parse_kind(s[0]), std::stoi(s.substr(1))};
}

inline json histogram_json(const DistanceHistogram& h) {
  json arr = json::array();
  for (const auto& e : h.entries) arr.push_back({{"d", e.distance()}, {"d2", e.d2}, {"count", e.count}});
  return arr;
}

/// Site map with one kind+index label per site, '.' for empty sites.
inline std::string site_map(const Placement& p) {
  const auto occ = p.occupancy();
  std::ostringstream os;
  for (int r = 0; r < p.grid_rows(); ++r) {
    for (int c = 0; c < p.grid_cols(); ++c) {
      const int o = occ[static_cast<std::size_t>(p.site_index({r, c}))];
      os << std::setw(5) << (o < 0 ? std::string(".") : to_string(p.qubit_at_slot(o)));
    }
    os << '\n';
  }
  return os.str();
}

inline LayoutSeed seed_from_config(const RunConfig& cfg, const BBCodeSpec& code) {
  const auto w = split_words(cfg.layout.seed);
  if (w.size() != 5) throw ConfigError("layout seed needs five monomials: L1 L2 R1 R2 LR");
  LayoutSeed s;
  try {
    s = parse_seed(w[0], w[1], w[2], w[3], w[4], code.shape);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("layout seed: ") + e.what());
  }
  if (!validate_seed(s, code.shape))
    throw InfeasibleLayout("seed " + to_string(s) + " does not enumerate the " + code.name + " qubits");
  return s;
}

/// Seed from the config, else the reference seed of a preset, else none.
inline std::optional<LayoutSeed> chosen_seed(const RunConfig& cfg, const BBCodeSpec& code) {
  if (!cfg.layout.seed.empty()) return seed_from_config(cfg, code);
  return layout_seed_preset(code);
}

inline RSearch parse_r_search(const std::string& s) {
  if (s == "auto") return RSearch::Auto;
  if (s == "full") return RSearch::Full;
  if (s == "restricted") return RSearch::Restricted;
  throw ConfigError("layout.r_search must be auto, full or restricted, got '" + s + "'");
}

struct LayoutRun {
  LayoutSeed seed;
  LayoutResult layout;
  std::optional<SearchResult> search;
};

/// Layout requested by the config: a fixed seed (optionally at a fixed D_max)
/// or, without a seed, an exhaustive search. A D_max request without a seed
/// uses the reference seed.
inline LayoutRun compute_layout(const RunConfig& cfg, const BBCodeSpec& code, const TannerGraph& tanner,
                                bool search_if_no_seed) {
  LayoutRun run;
  std::optional<LayoutSeed> seed =
      cfg.layout.seed.empty() && cfg.layout.dmax <= 0.0 && search_if_no_seed ? std::nullopt : chosen_seed(cfg, code);
  if (!seed) {
    SearchPolicy p;
    p.r_search = parse_r_search(cfg.layout.r_search);
    p.jobs = cfg.jobs;
    p.time_budget_secs = cfg.budget_secs;
    p.refine = cfg.layout.refine;
    run.search = search_layouts(code, p);
    run.seed = run.search->seed;
    run.layout = run.search->layout;
    return run;
  }
  run.seed = *seed;
  if (cfg.layout.dmax > 0.0) {
    const Placement data = fold(initial_placement(run.seed, code.shape));
    long long d2 = 0;
    for (long long c : candidate_squared_distances(data.grid_rows(), data.grid_cols()))
      if (std::sqrt(static_cast<double>(c)) <= cfg.layout.dmax + 5e-3) d2 = c;
    auto placed = d2 > 0 ? place_ancillas(data, tanner, d2) : std::nullopt;
    if (!placed)
      throw InfeasibleLayout("no ancilla placement with D_max <= " + std::to_string(cfg.layout.dmax) + " for seed " +
                             to_string(run.seed));
    run.layout.placement = cfg.layout.refine ? refine_placement(*placed, tanner, d2) : *placed;
    run.layout.dmax_squared = max_edge_squared_distance(run.layout.placement, tanner);
    return run;
  }
  run.layout = layout_from_seed(run.seed, code, tanner, cfg.layout.refine);
  return run;
}

/// Placement stored in a layout report (or a bare layout object).
inline Placement placement_from_json(const json& doc, const BBCodeSpec& code) {
  const json& j = doc.contains("results") ? doc.at("results") : doc;
  try {
    Placement p(j.at("grid_rows").get<int>(), j.at("grid_cols").get<int>(), code.shape.size());
    for (const auto& e : j.at("positions")) {
      const QubitId q = parse_qubit(e.at("qubit").get<std::string>());
      if (q.index < 0 || q.index >= code.shape.size()) throw ConfigError("qubit index out of range in layout file");
      p.place(q, {e.at("row").get<int>(), e.at("col").get<int>()});
    }
    if (!p.is_complete()) throw ConfigError("layout file does not place every qubit");
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed layout file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed layout file: ") + e.what());
  }
}

inline PulseParams pulse_from_config(const RunConfig& cfg) {
  PulseParams p = gate_preset(cfg.gate.row).pulse(cfg.constants);
  const auto& g = cfg.gate;
  if (g.omega_mhz) p.omega0_mhz = *g.omega_mhz;
  if (g.delta0_mhz) p.delta0_mhz = *g.delta0_mhz;
  if (g.phase_amp) p.phase_amp = *g.phase_amp;
  if (g.mod_freq_mhz) p.mod_freq_mhz = *g.mod_freq_mhz;
  if (g.window_ns) p.window_ns = *g.window_ns;
  if (g.t_gate_ns) p.t_gate_ns = *g.t_gate_ns;
  return p;
}

inline GateContext context_from_config(const RunConfig& cfg) {
  GateContext c = gate_preset(cfg.gate.row).context(cfg.constants);
  if (cfg.gate.v_mhz) c.v_mhz = *cfg.gate.v_mhz;
  if (cfg.gate.lifetime_us) c.lifetime_us = *cfg.gate.lifetime_us;
  return c;
}

inline IntegratorOptions integrator_from_config(const RunConfig& cfg) {
  IntegratorOptions o;
  o.rel_tol = cfg.gate.rel_tol;
  o.abs_tol = cfg.gate.abs_tol;
  o.grid_ns = cfg.gate.grid_ns;
  try {
    o.weighting = parse_weighting(cfg.gate.weighting);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return o;
}

inline json pulse_json(const PulseParams& p) {
  return {{"omega0_mhz", p.omega0_mhz}, {"delta0_mhz", p.delta0_mhz}, {"phase_amp", p.phase_amp},
          {"mod_freq_mhz", p.mod_freq_mhz}, {"window_ns", p.window_ns}, {"t_gate_ns", p.t_gate_ns},
          {"edge_ns", p.edge_ns}};
}

inline json context_json(const GateContext& c) {
  return {{"v_mhz", c.v_mhz}, {"lifetime_us", c.lifetime_us}, {"level", c.level}, {"distance_um", c.distance_um}};
}

inline json sim_json(const SimResult& r) {
  return {{"a01", r.a01},         {"a11", r.a11},           {"phi01", r.phi01},
          {"phi11", r.phi11},     {"phase", r.phase},       {"t_r_ns", r.t_r_ns},
          {"f_ave", r.f_ave},     {"f_bell", r.f_bell},     {"fidelity", r.fidelity},
          {"eps_r", r.eps_r},     {"eps_min", r.eps_min},   {"error_ratio", r.error_ratio()},
          {"max_norm_drift", r.max_norm_drift}};
}

inline ScheduleOptions schedule_options(const RunConfig& cfg) {
  ScheduleOptions o;
  o.seed = cfg.seed;
  o.restarts = cfg.schedule.restarts;
  o.threshold = cfg.constants.crosstalk_threshold;
  o.jobs = cfg.jobs;
  return o;
}

inline TimingModel timing_model(const RunConfig& cfg) {
  TimingModel t;
  t.t_switch_us = cfg.timing.t_switch_us;
  t.t_op_us = cfg.timing.t_op_us;
  t.t_meas_us = cfg.timing.t_meas_us;
  t.local_gate_fixed_us = cfg.constants.local_gate_fixed_us;
  t.local_switch_units = cfg.constants.local_switch_units;
  if (t.t_switch_us < 0 || t.t_op_us < 0 || t.t_meas_us < 0 || t.local_gate_fixed_us < 0 || t.local_switch_units < 0)
    throw ConfigError("timing values must be non-negative");
  return t;
}

struct ScheduleRun {
  BBCodeSpec code;
  TannerGraph tanner;
  Placement placement;
  std::vector<GateClass> classes;
  std::vector<CzGate> gates;
  Schedule schedule;
};

inline ScheduleRun compute_schedule(const RunConfig& cfg) {
  ScheduleRun s{resolve_code(cfg), {}, {}, {}, {}, {}};
  s.tanner = tanner_graph(s.code);
  if (!cfg.layout.file.empty()) {
    std::ifstream in(cfg.layout.file);
    if (!in) throw ConfigError("cannot read layout file '" + cfg.layout.file + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed layout file: ") + e.what());
    }
    s.placement = placement_from_json(doc, s.code);
  } else {
    s.placement = compute_layout(cfg, s.code, s.tanner, false).layout.placement;
  }
  s.classes = assign_gate_classes(distance_histogram(s.placement, s.tanner));
  s.gates = build_gates(s.placement, s.tanner, s.classes);
  s.schedule = greedy_schedule(s.gates, s.classes, schedule_options(cfg));
  return s;
}

inline json cycle_json(const CycleTime& c) {
  return {{"illumination_us", c.illumination_us}, {"slots", c.slots},
          {"switch_units", c.switch_units},       {"switching_us", c.switching_us},
          {"local_gate_fixed_us", c.local_gate_fixed_us}, {"reset_measure_us", c.reset_measure_us},
          {"total_us", c.total_us},               {"total_ms", c.total_us * 1e-3}};
}

// ---------------------------------------------------------------------------
// Output

class Output {
 public:
  Output(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), start_(std::chrono::steady_clock::now()) {}

  std::filesystem::path dir() const {
    std::filesystem::path d = cfg_.out_dir.empty() ? default_out_dir() : cfg_.out_dir;
    std::filesystem::create_directories(d);
    return d;
  }

  /// Writes <dir>/<slug>.json with the config echo, version, results and timings.
  std::filesystem::path report(const std::string& command, const json& results) const {
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
    json r = {{"tool", "bbqec"},     {"version", kVersion},          {"command", command},
              {"config", to_json(cfg_)}, {"results", results}, {"timings", {{"wall_secs", el.count()}}}};
    const auto path = dir() / (slug(command) + ".json");
    if (cfg_.wants("json")) {
      std::ofstream(path) << r.dump(2) << '\n';
      out_ << "wrote " << path.string() << '\n';
    }
    return path;
  }

  void text(const std::string& name, const std::string& body) const {
    const auto path = dir() / name;
    std::ofstream(path) << body;
    out_ << "wrote " << path.string() << '\n';
  }

  void csv(const std::string& name, const std::string& body) const {
    if (cfg_.wants("csv")) text(name, body);
  }

  std::ostream& log() const { return out_; }

 private:
  static std::string slug(std::string s) {
    for (char& c : s)
      if (c == ' ') c = '-';
    return s;
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Commands

inline int cmd_code(const RunConfig& cfg, const Output& o, bool check, bool dump_matrices) {
  const BBCodeSpec code = resolve_code(cfg);
  const CheckMatrices h = build_check_matrices(code);
  const int k = compute_k(h.hx, h.hz);
  json r = {{"name", code.name},
            {"l", code.shape.l},
            {"m", code.shape.m},
            {"a_terms", monomials_json(code.a_terms)},
            {"b_terms", monomials_json(code.b_terms)},
            {"n", code.n()},
            {"k", k},
            {"declared", {{"n", code.declared_n}, {"k", code.declared_k}, {"d", code.declared_d}}},
            {"figure_of_merit", code.figure_of_merit()},
            {"hx_shape", {h.hx.rows(), h.hx.cols()}},
            {"hz_shape", {h.hz.rows(), h.hz.cols()}}};
  bool ok = true;
  if (check) {
    bool rows6 = true, cols3 = true;
    for (int i = 0; i < h.hx.rows(); ++i) rows6 = rows6 && h.hx.row_weight(i) == 6 && h.hz.row_weight(i) == 6;
    for (int j = 0; j < h.hx.cols(); ++j) cols3 = cols3 && h.hx.col_weight(j) == 3 && h.hz.col_weight(j) == 3;
    const bool commute = (h.hx * h.hz.transpose()).is_zero();
    const bool k_ok = k == code.declared_k;
    ok = rows6 && cols3 && commute && k_ok;
    r["checks"] = {{"row_weight_6", rows6}, {"column_weight_3", cols3}, {"hx_hz_orthogonal", commute},
                   {"k_matches_declared", k_ok}, {"ok", ok}};
  }
  if (dump_matrices) {
    o.text("hx.txt", h.hx.to_string());
    o.text("hz.txt", h.hz.to_string());
  }
  o.report(check ? "code check" : "code build", r);
  o.log() << code.name << ": n=" << code.n() << " k=" << k << " r=" << std::setprecision(3)
          << code.figure_of_merit() << (check ? (ok ? " checks ok" : " CHECKS FAILED") : "") << '\n';
  return ok ? kOk : kCheckFailed;
}

inline json layout_json(const BBCodeSpec& code, const TannerGraph& tg, const LayoutRun& run) {
  json r = {{"code", code.name},
            {"seed", seed_json(run.seed)},
            {"dmax", run.layout.dmax()},
            {"dmax_squared", run.layout.dmax_squared},
            {"grid_rows", run.layout.placement.grid_rows()},
            {"grid_cols", run.layout.placement.grid_cols()},
            {"histogram", histogram_json(distance_histogram(run.layout.placement, tg))},
            {"positions", positions_json(run.layout.placement)}};
  if (run.search)
    r["search"] = {{"seeds_evaluated", run.search->seeds_evaluated},
                   {"seeds_total", run.search->seeds_total},
                   {"complete", run.search->complete}};
  return r;
}

inline std::string histogram_csv(const DistanceHistogram& h) {
  std::ostringstream os;
  os << "distance,d2,count\n" << std::setprecision(8);
  for (const auto& e : h.entries) os << e.distance() << ',' << e.d2 << ',' << e.count << '\n';
  return os.str();
}

inline int cmd_layout_optimize(const RunConfig& cfg, const Output& o) {
  const BBCodeSpec code = resolve_code(cfg);
  const TannerGraph tg = tanner_graph(code);
  const LayoutRun run = compute_layout(cfg, code, tg, true);
  const json r = layout_json(code, tg, run);
  o.report("layout optimize", r);
  o.csv("layout-histogram.csv", histogram_csv(distance_histogram(run.layout.placement, tg)));
  o.log() << code.name << ": D_max = " << std::setprecision(4) << run.layout.dmax() << " (D^2 = "
          << run.layout.dmax_squared << ") seed " << to_string(run.seed);
  if (run.search)
    o.log() << " [" << run.search->seeds_evaluated << "/" << run.search->seeds_total << " seeds"
            << (run.search->complete ? "" : ", budget exhausted") << "]";
  o.log() << '\n';
  return kOk;
}

inline int cmd_layout_fold(const RunConfig& cfg, const Output& o) {
  const BBCodeSpec code = resolve_code(cfg);
  const auto seed = chosen_seed(cfg, code);
  if (!seed) throw ConfigError("layout fold needs layout.seed for a code without a reference seed");
  const Placement before = initial_placement(*seed, code.shape);
  const Placement after = fold(before);
  const std::string text = "# unfolded\n" + site_map(before) + "# folded\n" + site_map(after);
  o.text("layout-fold.txt", text);
  o.report("layout fold", {{"code", code.name},
                           {"seed", seed_json(*seed)},
                           {"grid_rows", after.grid_rows()},
                           {"grid_cols", after.grid_cols()},
                           {"unfolded", positions_json(before)},
                           {"folded", positions_json(after)}});
  o.log() << text;
  return kOk;
}

inline int cmd_layout_histogram(const RunConfig& cfg, const Output& o) {
  const BBCodeSpec code = resolve_code(cfg);
  const TannerGraph tg = tanner_graph(code);
  const LayoutRun run = compute_layout(cfg, code, tg, false);
  const DistanceHistogram h = distance_histogram(run.layout.placement, tg);
  o.report("layout histogram", {{"code", code.name},
                                {"seed", seed_json(run.seed)},
                                {"dmax", run.layout.dmax()},
                                {"total", h.total()},
                                {"histogram", histogram_json(h)}});
  o.csv("layout-histogram.csv", histogram_csv(h));
  o.log() << histogram_csv(h);
  return kOk;
}

inline int cmd_layout_show(const RunConfig& cfg, const Output& o) {
  const BBCodeSpec code = resolve_code(cfg);
  const TannerGraph tg = tanner_graph(code);
  const LayoutRun run = compute_layout(cfg, code, tg, false);
  const std::string map = site_map(run.layout.placement);
  o.text("layout-show.txt", map);
  o.report("layout show", layout_json(code, tg, run));
  o.log() << map;
  return kOk;
}

inline std::string trace_csv(const PulseParams& p, const GateTraces& t) {
  std::ostringstream os;
  os << "t_ns,omega_mhz,phi_rad,p_g,p_r,p_gg,p_gr,p_rr\n" << std::setprecision(10);
  for (std::size_t k = 0; k < t.t_ns.size(); ++k)
    os << t.t_ns[k] << ',' << rabi_envelope(t.t_ns[k], p) << ',' << phase_profile(t.t_ns[k], p) << ','
       << t.single.p_ground[k] << ',' << t.single.p_rydberg[k] << ',' << t.pair.p_gg[k] << ','
       << 0.5 * t.pair.p_single[k] << ',' << t.pair.p_rr[k] << '\n';
  return os.str();
}

inline int cmd_gate_simulate(const RunConfig& cfg, const Output& o, bool trace_only) {
  const PulseParams p = pulse_from_config(cfg);
  const GateContext c = context_from_config(cfg);
  GateTraces traces;
  const SimResult r = evaluate_gate(p, c, integrator_from_config(cfg), &traces);
  const GatePreset& ref = gate_preset(cfg.gate.row);
  json res = {{"row", cfg.gate.row}, {"pulse", pulse_json(p)}, {"context", context_json(c)},
              {"weighting", cfg.gate.weighting}, {"result", sim_json(r)},
              {"reference", {{"fidelity", ref.fidelity}, {"error_ratio", ref.eps_ratio}}}};
  o.csv("gate-trace.csv", trace_csv(p, traces));
  if (trace_only) {
    o.report("gate trace", {{"row", cfg.gate.row}, {"pulse", pulse_json(p)}, {"samples", traces.t_ns.size()}});
    return kOk;
  }
  o.report("gate simulate", res);
  o.log() << "row " << cfg.gate.row << ": F = " << std::fixed << std::setprecision(5) << r.fidelity
          << " (F_ave " << r.f_ave << ", T_R " << std::setprecision(1) << r.t_r_ns << " ns, phase "
          << std::setprecision(4) << r.phase << ", eps/eps_min " << std::setprecision(2) << r.error_ratio() << ")\n";
  o.log().unsetf(std::ios::floatfield);
  return kOk;
}

inline int cmd_gate_optimize(const RunConfig& cfg, const Output& o) {
  const PulseParams init = pulse_from_config(cfg);
  const GateContext c = context_from_config(cfg);
  OptimizeBudget b;
  b.restarts = cfg.gate.restarts;
  b.evals_per_restart = cfg.gate.evals;
  b.time_budget_secs = cfg.budget_secs;
  b.seed = cfg.seed;
  const OptimizeResult r = optimize_pulse(c, init, b, {}, integrator_from_config(cfg));
  o.report("gate optimize", {{"row", cfg.gate.row},
                             {"context", context_json(c)},
                             {"initial", pulse_json(init)},
                             {"initial_fidelity", r.initial_fidelity},
                             {"best", pulse_json(r.params)},
                             {"result", sim_json(r.sim)},
                             {"evals", r.evals},
                             {"budget_exhausted", r.budget_exhausted},
                             {"degenerate", r.degenerate}});
  o.log() << "row " << cfg.gate.row << ": F " << std::fixed << std::setprecision(5) << r.initial_fidelity << " -> "
          << r.sim.fidelity << " after " << r.evals << " evaluations" << (r.degenerate ? " (V = 0: degenerate)" : "")
          << (r.budget_exhausted ? " (budget exhausted)" : "") << '\n';
  o.log().unsetf(std::ios::floatfield);
  return kOk;
}

inline json schedule_summary(const ScheduleRun& s, const TimingModel& tm, double threshold) {
  json classes = json::array();
  double gate_time_ns = 0.0;
  for (std::size_t c = 0; c < s.classes.size(); ++c) {
    const GateClass& g = s.classes[c];
    int sx = 0, sz = 0;
    for (const auto& slot : s.schedule.slots)
      if (slot.class_index == static_cast<int>(c)) (slot.subcircuit == Subcircuit::X ? sx : sz)++;
    gate_time_ns += g.count * g.t_gate_ns;
    classes.push_back({{"class_id", g.class_id}, {"d", g.distance()}, {"r_um", g.r_um()},
                       {"level", level_label(g.level)}, {"v_mhz", g.v_mhz}, {"t_gate_ns", g.t_gate_ns},
                       {"gates", g.count}, {"slots_x", sx}, {"slots_z", sz}, {"extrapolated", g.extrapolated}});
  }
  const ScheduleCheck chk = certify(s.schedule, s.gates, s.classes);
  const CycleTime ct = cycle_time(s.schedule, tm);
  double t_max = 0.0;
  for (const auto& g : s.classes) t_max = std::max(t_max, g.t_gate_ns * 1e-3);
  return {{"slots", s.schedule.num_slots()},
          {"seed", s.schedule.seed},
          {"restarts", s.schedule.restarts},
          {"classes", classes},
          {"illumination_us", ct.illumination_us},
          {"mean_t_gate_us", s.gates.empty() ? 0.0 : gate_time_ns * 1e-3 / static_cast<double>(s.gates.size())},
          {"cycle_time", cycle_json(ct)},
          {"upper_bound_us", cycle_time_upper_bound(s.code.n(), t_max, tm)},
          {"certification",
           {{"covers_all", chk.covers_all}, {"atoms_disjoint", chk.atoms_disjoint},
            {"single_class", chk.single_class}, {"x_before_z", chk.x_before_z},
            {"max_crosstalk", chk.max_crosstalk}, {"ok", chk.ok(threshold)}}}};
}

inline int cmd_schedule(const RunConfig& cfg, const Output& o) {
  const TimingModel tm = timing_model(cfg);
  const ScheduleRun s = compute_schedule(cfg);
  json slots = json::array();
  std::ostringstream csv;
  csv << "slot,subcircuit,class_id,t_gate_ns,check,data,check_row,check_col,data_row,data_col\n";
  for (std::size_t i = 0; i < s.schedule.slots.size(); ++i) {
    const auto& slot = s.schedule.slots[i];
    const GateClass& g = s.classes[static_cast<std::size_t>(slot.class_index)];
    json gates = json::array();
    for (int gi : slot.gates) {
      const CzGate& z = s.gates[static_cast<std::size_t>(gi)];
      gates.push_back(json::array({to_string(z.check), to_string(z.data)}));
      csv << i << ',' << (slot.subcircuit == Subcircuit::X ? 'X' : 'Z') << ',' << g.class_id << ',' << g.t_gate_ns
          << ',' << to_string(z.check) << ',' << to_string(z.data) << ',' << z.check_pos.row << ','
          << z.check_pos.col << ',' << z.data_pos.row << ',' << z.data_pos.col << '\n';
    }
    slots.push_back({{"subcircuit", slot.subcircuit == Subcircuit::X ? "X" : "Z"}, {"class_id", g.class_id},
                     {"illumination_ns", slot.illumination_ns}, {"gates", gates}});
  }
  json summary = schedule_summary(s, tm, cfg.constants.crosstalk_threshold);
  o.report("schedule", {{"code", s.code.name}, {"summary", summary}, {"slots", slots}});
  o.csv("schedule.csv", csv.str());
  o.log() << s.code.name << ": " << s.schedule.num_slots() << " slots, illumination " << std::fixed
          << std::setprecision(1) << summary["illumination_us"].get<double>() << " us, cycle time "
          << std::setprecision(4) << summary["cycle_time"]["total_ms"].get<double>() << " ms"
          << (summary["certification"]["ok"].get<bool>() ? "" : " (CERTIFICATION FAILED)") << '\n';
  o.log().unsetf(std::ios::floatfield);
  return summary["certification"]["ok"].get<bool>() ? kOk : kCheckFailed;
}

inline std::vector<double> switch_grid(const SweepConfig& s) {
  if (!(s.t_switch_step > 0.0) || s.t_switch_max < s.t_switch_min || s.t_switch_min < 0.0)
    throw ConfigError("sweep range needs 0 <= t_switch_min <= t_switch_max and a positive step");
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((s.t_switch_max - s.t_switch_min) / s.t_switch_step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(s.t_switch_min + static_cast<double>(i) * s.t_switch_step);
  return v;
}

inline int cmd_cycle_sweep(const RunConfig& cfg, const Output& o) {
  const TimingModel base = timing_model(cfg);
  const auto grid = switch_grid(cfg.sweep);
  const auto pairs = parse_op_meas(cfg.sweep.op_meas);
  const ScheduleRun s = compute_schedule(cfg);
  const auto rows = sweep_cycle_time(s.schedule, grid, pairs, base);
  std::ostringstream csv;
  csv << "t_switch_us,t_op_us,t_meas_us,total_ms\n" << std::setprecision(10);
  json arr = json::array();
  for (const auto& r : rows) {
    csv << r.t_switch_us << ',' << r.t_op_us << ',' << r.t_meas_us << ',' << r.total_ms << '\n';
    arr.push_back({{"t_switch_us", r.t_switch_us}, {"t_op_us", r.t_op_us}, {"t_meas_us", r.t_meas_us},
                   {"total_ms", r.total_ms}});
  }
  o.csv("cycle-time-sweep.csv", csv.str());
  o.report("cycle-time sweep", {{"code", s.code.name},
                                {"slots", s.schedule.num_slots()},
                                {"slope_us_per_us", s.schedule.num_slots() + base.local_switch_units},
                                {"rows", arr}});
  o.log() << rows.size() << " sweep points, slope " << s.schedule.num_slots() + base.local_switch_units
          << " us per us of switching\n";
  return kOk;
}

inline int cmd_reproduce_all(const RunConfig& cfg, const Output& o, bool quick, bool long_run) {
  repro::Options opt;
  opt.long_run = long_run && !quick;
  opt.full_search_small = !quick;
  opt.jobs = cfg.jobs;
  opt.seed = cfg.seed;
  opt.restarts = cfg.schedule.restarts;
  json verdicts = json::array();
  bool all = true;
  for (const auto& check : repro::all_checks(opt)) {
    repro::Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    all = all && v.pass;
    o.log() << repro::format_line(v) << std::endl;
    verdicts.push_back({{"id", v.id}, {"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }

  // Per-row gate table and the switching-time sweep of the canonical schedule.
  std::ostringstream gates;
  gates << "row,v_mhz,t_gate_ns,fidelity,reference,error_ratio,reference_ratio,t_r_ns\n" << std::setprecision(8);
  for (const GatePreset& g : gate_presets()) {
    const SimResult r = evaluate_gate(g.pulse(cfg.constants), g.context(cfg.constants), integrator_from_config(cfg));
    gates << g.row << ',' << g.v_mhz << ',' << g.t_gate_ns << ',' << r.fidelity << ',' << g.fidelity << ','
          << r.error_ratio() << ',' << g.eps_ratio << ',' << r.t_r_ns << '\n';
  }
  o.csv("reproduce-gates.csv", gates.str());
  RunConfig sweep_cfg = cfg;
  sweep_cfg.code.preset = "[[144,12,12]]";
  sweep_cfg.code.l = 0;
  sweep_cfg.layout = {};
  sweep_cfg.formats = cfg.wants("csv") ? "csv" : "";
  cmd_cycle_sweep(sweep_cfg, Output(sweep_cfg, o.log()));

  o.report("reproduce-all", {{"all_pass", all}, {"criteria", verdicts}, {"quick", quick}, {"long", opt.long_run}});
  return all ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// Entry point

inline void print_error(std::ostream& err, int code, const std::string& kind, const std::string& msg) {
  err << json{{"error", {{"code", code}, {"kind", kind}, {"message", msg}}}}.dump() << '\n';
}

/// Looks for --config before parsing so flags given on the command line win over the file.
inline std::optional<std::string> find_config_arg(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    if (auto path = find_config_arg(argc, argv)) load_config_file(cfg, *path);
  } catch (const ConfigError& e) {
    print_error(err, kBadConfig, "malformed_config", e.what());
    return kBadConfig;
  }

  CLI::App app{"bbqec: bivariate bicycle codes, qubit layouts, Rydberg CZ gates and check scheduling", "bbqec"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path;
  bool dump_config = false;
  app.add_option("--config", config_path, "INI-style run config ([tables] of key = value)");
  app.add_option("--seed", cfg.seed, "seed for randomized steps")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--budget-secs", cfg.budget_secs, "time budget for searches, 0 = unlimited")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", cfg.out_dir, "output directory (default $BBQEC_OUT_DIR or ./bbqec-out)");
  app.add_option("--format", cfg.formats, "comma-separated output formats: json,csv")->capture_default_str();
  app.add_flag("--dump-config", dump_config, "print the effective config and exit");

  auto add_code_arg = [&](CLI::App* sub) {
    sub->add_option("code", cfg.code.preset, "code preset, e.g. [[144,12,12]] or 144")->capture_default_str();
  };
  auto add_layout_opts = [&](CLI::App* sub) {
    sub->add_option("--layout-seed", cfg.layout.seed, "five monomials \"L1 L2 R1 R2 LR\"");
    sub->add_flag("!--no-refine", cfg.layout.refine, "keep the first matching instead of the refined placement");
  };

  // code
  auto* code = app.add_subcommand("code", "construct bivariate bicycle codes");
  code->require_subcommand(1);
  bool dump_matrices = false;
  auto* code_build = code->add_subcommand("build", "build check matrices and report n, k");
  auto* code_check = code->add_subcommand("check", "verify weights, orthogonality and k");
  for (auto* s : {code_build, code_check}) {
    add_code_arg(s);
    s->add_flag("--matrices", dump_matrices, "write H^X and H^Z as text");
  }

  // layout
  auto* layout = app.add_subcommand("layout", "planar layouts minimizing the longest check connection");
  layout->require_subcommand(1);
  auto* lay_opt = layout->add_subcommand("optimize", "search seeds (or use --layout-seed) and place ancillas");
  auto* lay_fold = layout->add_subcommand("fold", "site map of the data qubits before and after folding");
  auto* lay_hist = layout->add_subcommand("histogram", "connection-length histogram of a seeded layout");
  auto* lay_show = layout->add_subcommand("show", "site map of a complete seeded layout");
  for (auto* s : {lay_opt, lay_fold, lay_hist, lay_show}) {
    add_code_arg(s);
    add_layout_opts(s);
  }
  lay_opt->add_option("--r-search", cfg.layout.r_search, "R monomial search: auto, full or restricted")
      ->check(CLI::IsMember({"auto", "full", "restricted"}));
  lay_opt->add_option("--dmax", cfg.layout.dmax, "place ancillas at this D_max instead of the minimum (needs a seed)");

  // gate
  auto* gate = app.add_subcommand("gate", "Rydberg CZ pulse simulation and optimization");
  gate->require_subcommand(1);
  auto* gate_sim = gate->add_subcommand("simulate", "simulate one pulse; JSON result plus CSV traces");
  auto* gate_opt = gate->add_subcommand("optimize", "maximize the decay-corrected fidelity at fixed t_gate");
  auto* gate_trace = gate->add_subcommand("trace", "write only the CSV population traces");
  for (auto* s : {gate_sim, gate_opt, gate_trace}) {
    s->add_option("--row", cfg.gate.row, "gate preset row 1..17")->check(CLI::Range(1, 17));
    s->add_option("--omega", cfg.gate.omega_mhz, "Rabi frequency Omega/2pi, MHz");
    s->add_option("--delta0", cfg.gate.delta0_mhz, "detuning Delta0/2pi, MHz");
    s->add_option("--amp", cfg.gate.phase_amp, "phase modulation amplitude a, rad");
    s->add_option("--freq", cfg.gate.mod_freq_mhz, "phase modulation frequency f, MHz");
    s->add_option("--tau", cfg.gate.window_ns, "phase window width tau, ns");
    s->add_option("--t-gate", cfg.gate.t_gate_ns, "gate time, ns");
    s->add_option("--v", cfg.gate.v_mhz, "interaction V/2pi, MHz");
    s->add_option("--lifetime", cfg.gate.lifetime_us, "Rydberg lifetime, us");
    s->add_option("--weighting", cfg.gate.weighting, "T_R weighting: basis-average or half-sum")
        ->check(CLI::IsMember({"basis-average", "half-sum"}));
  }
  gate_opt->add_option("--restarts", cfg.gate.restarts, "simplex restarts")->check(CLI::PositiveNumber);
  gate_opt->add_option("--evals", cfg.gate.evals, "evaluations per restart")->check(CLI::PositiveNumber);

  // schedule
  auto* sched = app.add_subcommand("schedule", "schedule all check CZs under the crosstalk constraint");
  auto add_sched_opts = [&](CLI::App* s) {
    s->add_option("--code", cfg.code.preset, "code preset")->capture_default_str();
    s->add_option("--layout", cfg.layout.file, "layout JSON from `layout optimize` (default: reference seed)");
    s->add_option("--restarts", cfg.schedule.restarts, "randomized greedy restarts")->check(CLI::PositiveNumber);
    s->add_option("--t-switch", cfg.timing.t_switch_us, "beam switching time, us");
    s->add_option("--t-op", cfg.timing.t_op_us, "ancilla reset time, us");
    s->add_option("--t-meas", cfg.timing.t_meas_us, "measurement time, us");
  };
  add_sched_opts(sched);

  // cycle-time
  auto* cyc = app.add_subcommand("cycle-time", "QEC cycle-time model");
  cyc->require_subcommand(1);
  auto* sweep = cyc->add_subcommand("sweep", "cycle time versus switching time; CSV");
  add_sched_opts(sweep);
  sweep->add_option("--t-switch-min", cfg.sweep.t_switch_min, "us");
  sweep->add_option("--t-switch-max", cfg.sweep.t_switch_max, "us");
  sweep->add_option("--t-switch-step", cfg.sweep.t_switch_step, "us");
  sweep->add_option("--op-meas", cfg.sweep.op_meas, "comma-separated t_op:t_meas pairs, us");

  // reproduce-all
  auto* repro_cmd = app.add_subcommand("reproduce-all", "run every headline check and print PASS/FAIL lines");
  bool quick = false, long_run = false;
  repro_cmd->add_flag("--quick", quick, "restricted searches only; never run the [[288,12,18]] search");
  repro_cmd->add_flag("--long", long_run, "include the [[288,12,18]] layout search");

  if (argc <= 1) {
    out << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  if (dump_config) {
    out << to_config_text(cfg);
    return kOk;
  }
  try {
    Output o(cfg, out);
    if (code_build->parsed()) return cmd_code(cfg, o, false, dump_matrices);
    if (code_check->parsed()) return cmd_code(cfg, o, true, dump_matrices);
    if (lay_opt->parsed()) return cmd_layout_optimize(cfg, o);
    if (lay_fold->parsed()) return cmd_layout_fold(cfg, o);
    if (lay_hist->parsed()) return cmd_layout_histogram(cfg, o);
    if (lay_show->parsed()) return cmd_layout_show(cfg, o);
    if (gate_sim->parsed()) return cmd_gate_simulate(cfg, o, false);
    if (gate_trace->parsed()) return cmd_gate_simulate(cfg, o, true);
    if (gate_opt->parsed()) return cmd_gate_optimize(cfg, o);
    if (sched->parsed()) return cmd_schedule(cfg, o);
    if (sweep->parsed()) return cmd_cycle_sweep(cfg, o);
    if (repro_cmd->parsed()) return cmd_reproduce_all(cfg, o, quick, long_run);
  } catch (const UnknownPreset& e) {
    print_error(err, kUnknownPreset, "unknown_preset", e.what());
    return kUnknownPreset;
  } catch (const ConfigError& e) {
    print_error(err, kBadConfig, "malformed_config", e.what());
    return kBadConfig;
  } catch (const InfeasibleLayout& e) {
    print_error(err, kInfeasibleLayout, "infeasible_layout", e.what());
    return kInfeasibleLayout;
  } catch (const std::exception& e) {
    print_error(err, kRuntimeError, "runtime_error", e.what());
    return kRuntimeError;
  }
  out << app.help();
  return kUsage;
}

}  // namespace bbqec::cli
