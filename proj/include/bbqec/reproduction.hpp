#pragma once

// Headline-number checks shared by the acceptance binary and `bbqec reproduce-all`.
// Each check runs the full pipeline from scratch and returns one verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bbqec/bbcode.hpp"
#include "bbqec/layout.hpp"
#include "bbqec/rydberg_gate.hpp"
#include "bbqec/scheduler.hpp"

namespace bbqec::repro {

struct Verdict {
  int id{0};
  std::string name;
  bool pass{false};
  std::string detail;
  double seconds{0.0};
};

/// Reference D_max^2 per benchmark code, in code_presets() order.
inline constexpr std::array<long long, 5> kReferenceDmax2{25, 100, 49, 52, 52};
inline constexpr std::array<int, 5> kReferenceK{12, 8, 8, 12, 12};
inline constexpr std::array<int, 17> kReferenceCounts{80, 4, 88, 16, 12, 12, 56, 112, 24, 4, 8, 112, 48, 16, 52, 4, 216};

struct Options {
  bool long_run{false};  ///< include the [[288,12,18]] search
  bool full_search_small{true};
  int jobs{1};
  unsigned long long seed{7};
  int restarts{50};
};

namespace detail {

inline double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(double x, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << x;
  return os.str();
}

}  // namespace detail

/// Canonical [[144,12,12]] layout: reference seed, fold, minimum D_max, refinement.
struct CanonicalLayout {
  const BBCodeSpec* code;
  TannerGraph tanner;
  LayoutResult layout;
};

inline CanonicalLayout canonical_layout(const BBCodeSpec& code = find_code_preset("144")) {
  CanonicalLayout c{&code, tanner_graph(code), {}};
  c.layout = layout_from_seed(*layout_seed_preset(code), code, c.tanner, true);
  return c;
}

struct CanonicalSchedule {
  std::vector<GateClass> classes;
  std::vector<CzGate> gates;
  Schedule schedule;
};

inline CanonicalSchedule canonical_schedule(const CanonicalLayout& cl, const ScheduleOptions& opt) {
  CanonicalSchedule s;
  s.classes = assign_gate_classes(distance_histogram(cl.layout.placement, cl.tanner));
  s.gates = build_gates(cl.layout.placement, cl.tanner, s.classes);
  s.schedule = greedy_schedule(s.gates, s.classes, opt);
  return s;
}

inline Verdict code_construction() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{1, "code construction", true, "", 0.0};
  std::ostringstream os;
  const auto& presets = code_presets();
  for (std::size_t i = 0; i < presets.size(); ++i) {
    const auto h = build_check_matrices(presets[i]);
    bool weights = true;
    for (int r = 0; r < h.hx.rows(); ++r) weights = weights && h.hx.row_weight(r) == 6 && h.hz.row_weight(r) == 6;
    const bool commute = (h.hx * h.hz.transpose()).is_zero();
    const int k = compute_k(h.hx, h.hz);
    const bool ok = weights && commute && k == kReferenceK[i];
    v.pass = v.pass && ok;
    os << presets[i].name << " k=" << k << (ok ? "" : " (mismatch)") << "; ";
  }
  v.seconds = detail::since(t0);
  v.pass = v.pass && v.seconds < 1.0;
  os << "time " << detail::fmt(v.seconds, 3) << " s";
  v.detail = os.str();
  return v;
}

inline Verdict layout_reproduction(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{2, "layout reproduction", true, "", 0.0};
  std::ostringstream os;
  const auto& presets = code_presets();
  for (std::size_t i = 0; i < presets.size(); ++i) {
    const auto& code = presets[i];
    const TannerGraph tg = tanner_graph(code);
    const auto ts = std::chrono::steady_clock::now();
    const LayoutResult seeded = layout_from_seed(*layout_seed_preset(code), code, tg, false);
    const double seed_secs = detail::since(ts);
    bool ok = seeded.dmax_squared == kReferenceDmax2[i] && seed_secs < 10.0;
    os << code.name << " seed D=" << detail::fmt(seeded.dmax(), 2);
    if (code.n() < 288 || opt.long_run) {
      SearchPolicy p;
      p.jobs = opt.jobs;
      if (code.n() < 144 && !opt.full_search_small) p.r_search = RSearch::Restricted;
      const SearchResult r = search_layouts(code, p);
      ok = ok && r.complete && r.layout.dmax_squared == kReferenceDmax2[i];
      os << " search D=" << detail::fmt(r.layout.dmax(), 2);
    } else {
      os << " search skipped";
    }
    os << (ok ? "" : " (mismatch)") << "; ";
    v.pass = v.pass && ok;
  }
  v.seconds = detail::since(t0);
  v.detail = os.str();
  return v;
}

inline Verdict histogram_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{3, "histogram reproduction", false, "", 0.0};
  const CanonicalLayout cl = canonical_layout();
  const DistanceHistogram h = distance_histogram(cl.layout.placement, cl.tanner);
  std::ostringstream os;
  os << "counts";
  std::vector<int> counts;
  for (const auto& e : h.entries) {
    counts.push_back(e.count);
    os << " " << e.count;
  }
  os << "; total " << h.total();
  v.pass = counts == std::vector<int>(kReferenceCounts.begin(), kReferenceCounts.end()) && h.total() == 864;
  v.seconds = detail::since(t0);
  v.detail = os.str();
  return v;
}

inline Verdict gate_regression() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{4, "gate fidelity regression", true, "", 0.0};
  std::ostringstream os;
  double worst_dev = 0.0, worst_row_secs = 0.0, min_f = 1.0;
  for (const GatePreset& g : gate_presets()) {
    const auto tr = std::chrono::steady_clock::now();
    const SimResult r = evaluate_gate(g.pulse(), g.context());
    worst_row_secs = std::max(worst_row_secs, detail::since(tr));
    worst_dev = std::max(worst_dev, std::abs(r.fidelity - g.fidelity));
    min_f = std::min(min_f, r.fidelity);
    if (g.row == 17) {
      const bool ok17 = r.fidelity >= 0.9988 && r.fidelity <= 0.9996 && r.error_ratio() >= 1.8 && r.error_ratio() <= 2.6;
      v.pass = v.pass && ok17;
      os << "row 17 F=" << detail::fmt(r.fidelity, 5) << " eps/eps_min=" << detail::fmt(r.error_ratio(), 2) << "; ";
    }
  }
  v.pass = v.pass && worst_dev <= 1e-3 && min_f >= 0.999 && worst_row_secs < 5.0;
  os << "max |F-F_ref|=" << detail::fmt(worst_dev, 5) << " min F=" << detail::fmt(min_f, 5)
     << " slowest row " << detail::fmt(worst_row_secs, 2) << " s";
  v.seconds = detail::since(t0);
  v.detail = os.str();
  return v;
}

inline Verdict fidelity_oracle(unsigned long long seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{5, "fidelity formula oracle", true, "", 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.0, 1.0), ang(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a01 = amp(rng), a11 = amp(rng), phi = ang(rng);
    // Average fidelity is (d F_pro + 1)/(d + 1) with d = 4, and the symmetric
    // Bell fidelity is F_pro; at unit amplitudes it is the phase-gate form.
    const double chain = (4.0 * bell_fidelity_symmetric(a01, a11, phi) + 1.0) / 5.0;
    worst = std::max(worst, std::abs(average_fidelity(a01, a11, phi) - chain));
    worst = std::max(worst, std::abs(average_fidelity(1.0, 1.0, phi) -
                                     (4.0 * bell_fidelity_phase_gate(0.0, phi) + 1.0) / 5.0));
  }
  const bool exact = average_fidelity(1.0, 1.0, std::numbers::pi) == 1.0 && average_fidelity(1.0, 1.0, 0.0) == 0.4;
  v.pass = worst <= 1e-12 && exact;
  v.detail = "max deviation " + detail::fmt(worst * 1e15, 3) + "e-15; F_ave(1,1,pi)=" +
             detail::fmt(average_fidelity(1.0, 1.0, std::numbers::pi), 12) +
             " F_ave(1,1,0)=" + detail::fmt(average_fidelity(1.0, 1.0, 0.0), 12);
  v.seconds = detail::since(t0);
  return v;
}

inline Verdict scheduling(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{6, "scheduling", false, "", 0.0};
  const CanonicalLayout cl = canonical_layout();
  ScheduleOptions so;
  so.seed = opt.seed;
  so.restarts = opt.restarts;
  const CanonicalSchedule cs = canonical_schedule(cl, so);
  int serial = 0;
  for (const auto& slot : cs.schedule.slots)
    if (cs.classes[static_cast<std::size_t>(slot.class_index)].class_id >= 12) ++serial;
  TimingModel tm;
  tm.t_switch_us = 1.5;
  const CycleTime ct = cycle_time(cs.schedule, tm);
  const double bound = cycle_time_upper_bound(144, 0.48, tm);
  const double secs = detail::since(t0);
  const bool ok_serial = serial == 448;
  const bool ok_total = cs.schedule.num_slots() <= 700;
  const bool ok_illum = std::abs(ct.illumination_us - 234.0) <= 5.0;
  const bool ok_cycle = std::abs(ct.total_us * 1e-3 - 1.28) <= 0.02;
  const bool ok_bound = std::abs(bound * 1e-3 - 1.72) <= 0.01;
  v.pass = ok_serial && ok_total && ok_illum && ok_cycle && ok_bound && secs < 60.0;
  auto mark = [](bool b) { return b ? "" : " (miss)"; };
  std::ostringstream os;
  os << "serial slots " << serial << mark(ok_serial) << "; total slots " << cs.schedule.num_slots() << mark(ok_total)
     << "; illumination " << detail::fmt(ct.illumination_us, 1) << " us" << mark(ok_illum) << "; cycle "
     << detail::fmt(ct.total_us * 1e-3, 4) << " ms" << mark(ok_cycle) << "; bound " << detail::fmt(bound * 1e-3, 4)
     << " ms" << mark(ok_bound) << "; time " << detail::fmt(secs, 1) << " s";
  v.detail = os.str();
  v.seconds = secs;
  return v;
}

inline Verdict properties(const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{7, "property suites", true, "", 0.0};
  std::ostringstream os;
  std::mt19937_64 rng(opt.seed);

  // Fold is a bijection of the site set on random grid shapes.
  bool fold_ok = true;
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 200 && fold_ok; ++trial) {
    const int n = dim(rng);
    std::vector<int> hit(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < n; ++c) {
      const int f = fold_coordinate(c, n);
      if (f < 0 || f >= n || hit[static_cast<std::size_t>(f)]++) fold_ok = false;
    }
  }
  os << "fold " << (fold_ok ? "ok" : "FAIL");

  // Feasibility is monotone in D_max along the candidate list.
  bool mono_ok = true;
  {
    const auto& code = find_code_preset("72");
    const TannerGraph tg = tanner_graph(code);
    const Placement data = fold(initial_placement(*layout_seed_preset(code), code.shape));
    const AncillaCostTable t = ancilla_cost_table(data, tg);
    bool seen_feasible = false;
    for (long long d2 : candidate_squared_distances(data.grid_rows(), data.grid_cols())) {
      const bool feasible = match_ancillas(t, d2).has_value();
      if (seen_feasible && !feasible) mono_ok = false;
      seen_feasible = seen_feasible || feasible;
    }
  }
  os << "; monotonicity " << (mono_ok ? "ok" : "FAIL");

  // Every emitted schedule covers all gates, keeps atoms disjoint and stays below threshold.
  bool sched_ok = true;
  {
    const CanonicalLayout cl = canonical_layout();
    for (unsigned long long s : {opt.seed, opt.seed + 1}) {
      ScheduleOptions so;
      so.seed = s;
      so.restarts = 5;
      const CanonicalSchedule cs = canonical_schedule(cl, so);
      sched_ok = sched_ok && certify(cs.schedule, cs.gates, cs.classes).ok(so.threshold);
    }
  }
  os << "; schedule certification " << (sched_ok ? "ok" : "FAIL");

  // Norm conservation over every preset, and tolerance halving on the hardest row.
  double drift = 0.0;
  for (const GatePreset& g : gate_presets()) drift = std::max(drift, evaluate_gate(g.pulse(), g.context()).max_norm_drift);
  const bool norm_ok = drift <= 1e-8;
  os << "; max norm drift " << std::scientific << std::setprecision(1) << drift;
  IntegratorOptions fine;
  fine.rel_tol *= 0.5;
  fine.abs_tol *= 0.5;
  const GatePreset& g17 = gate_preset(17);
  const double df = std::abs(evaluate_gate(g17.pulse(), g17.context()).fidelity -
                             evaluate_gate(g17.pulse(), g17.context(), fine).fidelity);
  const bool tol_ok = df <= 1e-6;
  os << "; tolerance halving dF " << df;

  v.pass = fold_ok && mono_ok && sched_ok && norm_ok && tol_ok;
  v.seconds = detail::since(t0);
  v.detail = os.str();
  return v;
}

inline std::vector<std::function<Verdict()>> all_checks(const Options& opt) {
  return {
      [] { return code_construction(); },
      [opt] { return layout_reproduction(opt); },
      [] { return histogram_reproduction(); },
      [] { return gate_regression(); },
      [opt] { return fidelity_oracle(opt.seed); },
      [opt] { return scheduling(opt); },
      [opt] { return properties(opt); },
  };
}

inline std::string format_line(const Verdict& v) {
  return std::string(v.pass ? "PASS" : "FAIL") + " [" + std::to_string(v.id) + "] " + v.name + ": " + v.detail;
}

}  // namespace bbqec::repro
