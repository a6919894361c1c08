#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bbqec/bbcode.hpp"
#include "bbqec/constants.hpp"
#include "bbqec/layout.hpp"

namespace bbqec {

/// Tabulated gate design for one communication distance of the [[144,12,12]] layout.
struct ClassAnchor {
  long long d2;
  int count;
  RydbergLevel level;
  double v_mhz;
  double t_gate_ns;
};

/// Distance classes with the interaction and illumination time used for scheduling.
inline const std::array<ClassAnchor, 17>& class_anchors() {
  using L = RydbergLevel;
  static const std::array<ClassAnchor, 17> a = {{
      {1, 80, L::n50s, 415., 130},   {2, 4, L::n50s, 58.5, 180},    {4, 88, L::n83s, 1160., 150},
      {5, 16, L::n83s, 780., 150},   {10, 12, L::n83s, 170., 180},  {13, 12, L::n83s, 85., 180},
      {17, 56, L::n83s, 40., 180},   {20, 112, L::n83s, 25., 200},  {25, 24, L::n83s, 13., 270},
      {26, 4, L::n83s, 11.5, 270},   {34, 8, L::n83s, 5.2, 270},    {36, 112, L::n90s, 11.2, 350},
      {37, 48, L::n90s, 10.1, 355},  {41, 16, L::n90s, 7.7, 430},   {45, 52, L::n90s, 5.8, 440},
      {50, 4, L::n90s, 4.25, 480},   {52, 216, L::n90s, 3.8, 480},
  }};
  return a;
}

struct GateClass {
  int class_id{0};        ///< 1-based, ascending in distance
  long long d2{0};
  RydbergLevel level{RydbergLevel::n50s};
  double v_mhz{0.0};
  double t_gate_ns{0.0};
  int count{0};
  int expected_count{0};  ///< tabulated occurrences, 0 when extrapolated
  bool extrapolated{false};

  double distance() const { return std::sqrt(static_cast<double>(d2)); }
  double r_um(const PhysicalConstants& k = {}) const { return distance() * k.lattice_spacing_um; }
};

inline RydbergLevel level_for_distance(double d) {
  if (d <= 1.5) return RydbergLevel::n50s;
  if (d <= 5.9) return RydbergLevel::n83s;
  return RydbergLevel::n90s;
}

/// Maps each histogram distance to its tabulated class. Distances missing from
/// the table get the level of the nearest-level rule and V scaled as 1/R^6
/// from the nearest tabulated anchor of that level.
inline std::vector<GateClass> assign_gate_classes(const DistanceHistogram& hist) {
  std::vector<GateClass> out;
  for (const auto& e : hist.entries) {
    GateClass c;
    c.d2 = e.d2;
    c.count = e.count;
    const auto& anchors = class_anchors();
    auto it = std::find_if(anchors.begin(), anchors.end(), [&](const ClassAnchor& a) { return a.d2 == e.d2; });
    if (it != anchors.end()) {
      c.level = it->level;
      c.v_mhz = it->v_mhz;
      c.t_gate_ns = it->t_gate_ns;
      c.expected_count = it->count;
    } else {
      c.level = level_for_distance(e.distance());
      const ClassAnchor* nearest = nullptr;
      for (const auto& a : anchors) {
        if (a.level != c.level) continue;
        if (!nearest || std::abs(std::sqrt(double(a.d2)) - e.distance()) <
                            std::abs(std::sqrt(double(nearest->d2)) - e.distance()))
          nearest = &a;
      }
      c.v_mhz = nearest->v_mhz * std::pow(static_cast<double>(nearest->d2) / static_cast<double>(e.d2), 3.0);
      c.t_gate_ns = nearest->t_gate_ns;
      c.extrapolated = true;
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const GateClass& a, const GateClass& b) { return a.d2 < b.d2; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].class_id = static_cast<int>(i) + 1;
  return out;
}

enum class Subcircuit { X, Z };

/// One CZ between a check qubit and a data qubit.
struct CzGate {
  QubitId check;
  QubitId data;
  Coord check_pos;
  Coord data_pos;
  int class_index{0};  ///< into the class list
  Subcircuit subcircuit{Subcircuit::X};

  std::array<Coord, 2> atoms() const { return {check_pos, data_pos}; }
};

inline std::vector<CzGate> build_gates(const Placement& p, const TannerGraph& tanner,
                                       const std::vector<GateClass>& classes) {
  std::vector<CzGate> gates;
  gates.reserve(tanner.edges.size());
  for (const TannerEdge& e : tanner.edges) {
    CzGate g{e.check, e.data, p.position(e.check), p.position(e.data), -1,
             e.check.kind == QubitKind::X ? Subcircuit::X : Subcircuit::Z};
    const long long d2 = squared_distance(g.check_pos, g.data_pos);
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i].d2 == d2) g.class_index = static_cast<int>(i);
    if (g.class_index < 0) throw std::invalid_argument("gate distance has no class");
    gates.push_back(g);
  }
  return gates;
}

/// V(R)/2pi in MHz between two atoms driven in the same class: V_class (R_class / R_AB)^6.
inline double cross_pair_interaction(Coord a, Coord b, const GateClass& cls) {
  const long long d2 = squared_distance(a, b);
  if (d2 == 0) throw std::invalid_argument("coincident atoms");
  const double ratio = static_cast<double>(cls.d2) / static_cast<double>(d2);
  return cls.v_mhz * ratio * ratio * ratio;
}

/// x_i = (sum of V/2pi from atoms in other pairs) * t_gate, MHz * us.
inline double crosstalk_metric(Coord atom, const std::vector<Coord>& other_atoms, const GateClass& cls) {
  double v = 0.0;
  for (const Coord& b : other_atoms) v += cross_pair_interaction(atom, b, cls);
  return v * cls.t_gate_ns * 1e-3;
}

inline bool shares_atom(const CzGate& g, const CzGate& h) {
  return g.check_pos == h.check_pos || g.check_pos == h.data_pos || g.data_pos == h.check_pos ||
         g.data_pos == h.data_pos;
}

/// Two gates of one class may share a slot iff their four atoms are distinct and
/// every atom's crosstalk from the other pair is strictly below the threshold.
inline bool compatible(const CzGate& g, const CzGate& h, const GateClass& cls, double threshold) {
  if (shares_atom(g, h)) return false;
  const std::vector<Coord> hg{h.check_pos, h.data_pos}, gg{g.check_pos, g.data_pos};
  for (const Coord& a : g.atoms())
    if (!(crosstalk_metric(a, hg, cls) < threshold)) return false;
  for (const Coord& a : h.atoms())
    if (!(crosstalk_metric(a, gg, cls) < threshold)) return false;
  return true;
}

/// Largest x_i over all atoms of a set of concurrently driven gates of one class.
inline double max_crosstalk(const std::vector<CzGate>& gates, const std::vector<int>& slot, const GateClass& cls) {
  double worst = 0.0;
  for (int gi : slot) {
    std::vector<Coord> others;
    for (int gj : slot)
      if (gj != gi) {
        others.push_back(gates[static_cast<std::size_t>(gj)].check_pos);
        others.push_back(gates[static_cast<std::size_t>(gj)].data_pos);
      }
    for (const Coord& a : gates[static_cast<std::size_t>(gi)].atoms())
      worst = std::max(worst, crosstalk_metric(a, others, cls));
  }
  return worst;
}

struct ScheduledSlot {
  Subcircuit subcircuit{Subcircuit::X};
  int class_index{0};
  std::vector<int> gates;  ///< indices into the gate list
  double illumination_ns{0.0};
};

struct Schedule {
  std::vector<ScheduledSlot> slots;
  unsigned long long seed{0};
  int restarts{0};

  int num_slots() const { return static_cast<int>(slots.size()); }
  double illumination_us() const {
    double t = 0.0;
    for (const auto& s : slots) t += s.illumination_ns;
    return t * 1e-3;
  }
};

namespace detail {

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w_) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= o.w_[i];
    return r;
  }
  bool any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x != 0; });
  }
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      std::uint64_t x = w_[k];
      while (x) {
        f(k * 64 + static_cast<std::size_t>(std::countr_zero(x)));
        x &= x - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> w_;
};

/// Greedy grouping of the gates of one (class, subcircuit) bucket.
class BucketScheduler {
 public:
  BucketScheduler(const std::vector<CzGate>& all, std::vector<int> members, const GateClass& cls, double threshold)
      : members_(std::move(members)), n_(members_.size()), threshold_(threshold), adj_(n_, Bits(n_)),
        contrib_(n_ * n_ * 2, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      const CzGate& g = all[static_cast<std::size_t>(members_[i])];
      for (std::size_t j = 0; j < n_; ++j) {
        if (i == j) continue;
        const CzGate& h = all[static_cast<std::size_t>(members_[j])];
        if (shares_atom(g, h)) continue;
        const std::vector<Coord> hh{h.check_pos, h.data_pos};
        contrib_[(i * n_ + j) * 2 + 0] = crosstalk_metric(g.check_pos, hh, cls);
        contrib_[(i * n_ + j) * 2 + 1] = crosstalk_metric(g.data_pos, hh, cls);
      }
    }
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (compatible(all[static_cast<std::size_t>(members_[i])], all[static_cast<std::size_t>(members_[j])], cls,
                       threshold)) {
          adj_[i].set(j);
          adj_[j].set(i);
        }
  }

  /// Repeatedly removes a maximum-size admissible group; among equal-size groups
  /// the one leaving the most compatible pairs wins, remaining ties are random.
  std::vector<std::vector<int>> run(std::mt19937_64& rng) const {
    Bits remaining(n_);
    for (std::size_t i = 0; i < n_; ++i) remaining.set(i);
    std::vector<std::vector<int>> groups;
    while (remaining.any()) {
      auto cands = maximum_groups(remaining, rng);
      std::size_t pick = 0;
      long long best_score = -1;
      std::vector<std::size_t> ties;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        Bits rest = remaining;
        for (std::size_t v : cands[c]) rest.reset(v);
        long long score = 0;
        rest.for_each([&](std::size_t v) { score += static_cast<long long>((adj_[v] & rest).count()); });
        if (score > best_score) {
          best_score = score;
          ties.assign(1, c);
        } else if (score == best_score) {
          ties.push_back(c);
        }
      }
      pick = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
      std::vector<int> grp;
      for (std::size_t v : cands[pick]) {
        remaining.reset(v);
        grp.push_back(members_[v]);
      }
      std::sort(grp.begin(), grp.end());
      groups.push_back(std::move(grp));
    }
    return groups;
  }

 private:
  static constexpr std::size_t kMaxCandidates = 64;
  static constexpr long long kMaxNodes = 200000;

  double contrib(std::size_t on, std::size_t from, int atom) const {
    return contrib_[(on * n_ + from) * 2 + static_cast<std::size_t>(atom)];
  }

  /// Can v join the group while keeping every atom's summed crosstalk below threshold?
  bool admissible(const std::vector<std::size_t>& group, const std::vector<std::array<double, 2>>& x,
                  std::size_t v, std::array<double, 2>& xv) const {
    xv = {0.0, 0.0};
    for (std::size_t k = 0; k < group.size(); ++k) {
      const std::size_t u = group[k];
      for (int a = 0; a < 2; ++a) {
        if (!(x[k][static_cast<std::size_t>(a)] + contrib(u, v, a) < threshold_)) return false;
        xv[static_cast<std::size_t>(a)] += contrib(v, u, a);
      }
    }
    return xv[0] < threshold_ && xv[1] < threshold_;
  }

  /// Branch and bound over cliques of the compatibility graph restricted to
  /// admissible groups, with a greedy-colouring bound. Collects up to
  /// kMaxCandidates groups of the largest size found.
  std::vector<std::vector<std::size_t>> maximum_groups(const Bits& remaining, std::mt19937_64& rng) const {
    std::vector<std::size_t> order;
    remaining.for_each([&](std::size_t v) { order.push_back(v); });
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (adj_[a] & remaining).count() > (adj_[b] & remaining).count();
    });

    std::vector<std::vector<std::size_t>> best;
    std::size_t best_size = 0;
    long long nodes = 0;
    std::vector<std::size_t> group;
    std::vector<std::array<double, 2>> x;

    auto colour_bound = [&](const std::vector<std::size_t>& cand) {
      std::vector<std::vector<std::size_t>> classes;
      for (std::size_t v : cand) {
        bool placed = false;
        for (auto& c : classes) {
          if (std::none_of(c.begin(), c.end(), [&](std::size_t u) { return adj_[u].test(v); })) {
            c.push_back(v);
            placed = true;
            break;
          }
        }
        if (!placed) classes.push_back({v});
      }
      return classes.size();
    };

    auto expand = [&](auto&& self, std::vector<std::size_t> cand) -> void {
      ++nodes;
      if (group.size() > best_size) {
        best_size = group.size();
        best.clear();
      }
      if (group.size() == best_size && best.size() < kMaxCandidates) best.push_back(group);
      if (cand.empty() || nodes > kMaxNodes) return;
      if (group.size() + colour_bound(cand) < best_size) return;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (group.size() + (cand.size() - i) < best_size) return;
        const std::size_t v = cand[i];
        std::array<double, 2> xv{};
        if (!admissible(group, x, v, xv)) continue;
        for (std::size_t k = 0; k < group.size(); ++k)
          for (int a = 0; a < 2; ++a) x[k][static_cast<std::size_t>(a)] += contrib(group[k], v, a);
        group.push_back(v);
        x.push_back(xv);
        std::vector<std::size_t> next;
        for (std::size_t j = i + 1; j < cand.size(); ++j)
          if (adj_[v].test(cand[j])) next.push_back(cand[j]);
        self(self, std::move(next));
        group.pop_back();
        x.pop_back();
        for (std::size_t k = 0; k < group.size(); ++k)
          for (int a = 0; a < 2; ++a) x[k][static_cast<std::size_t>(a)] -= contrib(group[k], v, a);
        if (nodes > kMaxNodes) return;
      }
    };
    expand(expand, order);
    return best;
  }

  std::vector<int> members_;
  std::size_t n_;
  double threshold_;
  std::vector<Bits> adj_;
  std::vector<double> contrib_;
};

}  // namespace detail

struct ScheduleOptions {
  unsigned long long seed{7};
  int restarts{50};
  double threshold{0.01};
  int jobs{1};
};

/// Schedules every CZ: the X-check subcircuit first, then the Z-check
/// subcircuit, classes in ascending distance. Each (class, subcircuit) bucket
/// is grouped greedily `restarts` times and the run with the fewest slots kept.
inline Schedule greedy_schedule(const std::vector<CzGate>& gates, const std::vector<GateClass>& classes,
                                const ScheduleOptions& opt = {}) {
  Schedule sched;
  sched.seed = opt.seed;
  sched.restarts = opt.restarts;
  for (Subcircuit sub : {Subcircuit::X, Subcircuit::Z}) {
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<int> members;
      for (std::size_t i = 0; i < gates.size(); ++i)
        if (gates[i].subcircuit == sub && gates[i].class_index == static_cast<int>(c))
          members.push_back(static_cast<int>(i));
      if (members.empty()) continue;
      const detail::BucketScheduler bucket(gates, members, classes[c], opt.threshold);
      const int restarts = std::max(1, opt.restarts);
      std::vector<std::vector<std::vector<int>>> runs(static_cast<std::size_t>(restarts));
      auto work = [&](int w) {
        for (int r = w; r < restarts; r += std::max(1, opt.jobs)) {
          std::seed_seq seq{opt.seed, static_cast<unsigned long long>(r), static_cast<unsigned long long>(c),
                            static_cast<unsigned long long>(sub == Subcircuit::X ? 0 : 1)};
          std::mt19937_64 rng(seq);
          runs[static_cast<std::size_t>(r)] = bucket.run(rng);
        }
      };
      std::vector<std::thread> pool;
      for (int w = 1; w < std::min(opt.jobs, restarts); ++w) pool.emplace_back(work, w);
      work(0);
      for (auto& t : pool) t.join();
      // Fewest slots wins; the lowest restart index breaks ties.
      std::optional<std::vector<std::vector<int>>> best;
      for (auto& groups : runs)
        if (!best || groups.size() < best->size()) best = std::move(groups);
      for (auto& g : *best)
        sched.slots.push_back({sub, static_cast<int>(c), std::move(g), classes[c].t_gate_ns});
    }
  }
  return sched;
}

struct ScheduleCheck {
  bool covers_all{false};      ///< every gate exactly once
  bool atoms_disjoint{false};  ///< no atom twice within a slot
  bool single_class{false};    ///< each slot holds one class and one subcircuit
  bool x_before_z{false};
  double max_crosstalk{0.0};

  bool ok(double threshold) const {
    return covers_all && atoms_disjoint && single_class && x_before_z && max_crosstalk < threshold;
  }
};

inline ScheduleCheck certify(const Schedule& s, const std::vector<CzGate>& gates,
                             const std::vector<GateClass>& classes) {
  ScheduleCheck chk;
  std::vector<int> seen(gates.size(), 0);
  chk.atoms_disjoint = true;
  chk.single_class = true;
  chk.x_before_z = true;
  bool in_z = false;
  for (const auto& slot : s.slots) {
    if (slot.subcircuit == Subcircuit::Z) in_z = true;
    if (in_z && slot.subcircuit == Subcircuit::X) chk.x_before_z = false;
    std::vector<Coord> atoms;
    for (int g : slot.gates) {
      const CzGate& gate = gates[static_cast<std::size_t>(g)];
      ++seen[static_cast<std::size_t>(g)];
      if (gate.class_index != slot.class_index || gate.subcircuit != slot.subcircuit) chk.single_class = false;
      atoms.push_back(gate.check_pos);
      atoms.push_back(gate.data_pos);
    }
    std::sort(atoms.begin(), atoms.end());
    if (std::adjacent_find(atoms.begin(), atoms.end()) != atoms.end()) chk.atoms_disjoint = false;
    else
      chk.max_crosstalk = std::max(
          chk.max_crosstalk, max_crosstalk(gates, slot.gates, classes[static_cast<std::size_t>(slot.class_index)]));
  }
  chk.covers_all = std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
  return chk;
}

/// Cycle-time cost model; all times in microseconds.
struct TimingModel {
  double t_switch_us{1.5};
  double t_op_us{0.0};
  double t_meas_us{0.0};
  double local_gate_fixed_us{3.5};
  int local_switch_units{4};
};

struct CycleTime {
  double illumination_us{0.0};
  int slots{0};
  int switch_units{0};
  double switching_us{0.0};
  double local_gate_fixed_us{0.0};
  double reset_measure_us{0.0};
  double total_us{0.0};

  double fixed_us() const { return illumination_us + local_gate_fixed_us; }
};

/// total = sum of slot illumination + local gates + (slots + local units) t_switch + t_op + t_meas.
inline CycleTime cycle_time(const Schedule& s, const TimingModel& t) {
  CycleTime c;
  c.illumination_us = s.illumination_us();
  c.slots = s.num_slots();
  c.switch_units = c.slots + t.local_switch_units;
  c.switching_us = c.switch_units * t.t_switch_us;
  c.local_gate_fixed_us = t.local_gate_fixed_us;
  c.reset_measure_us = t.t_op_us + t.t_meas_us;
  c.total_us = c.illumination_us + c.local_gate_fixed_us + c.switching_us + c.reset_measure_us;
  return c;
}

/// No-parallelism bound 6N (t_max + t_switch) + units t_switch + fixed local time.
inline double cycle_time_upper_bound(int n, double t_max_us, const TimingModel& t) {
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  return 6.0 * n * (t_max_us + t.t_switch_us) + t.local_switch_units * t.t_switch_us + t.local_gate_fixed_us;
}

struct SweepRow {
  double t_switch_us;
  double t_op_us;
  double t_meas_us;
  double total_ms;
};

inline std::vector<SweepRow> sweep_cycle_time(const Schedule& s, const std::vector<double>& t_switch_us,
                                              const std::vector<std::pair<double, double>>& op_meas,
                                              TimingModel base = {}) {
  std::vector<SweepRow> rows;
  for (const auto& [op, meas] : op_meas) {
    for (double ts : t_switch_us) {
      base.t_switch_us = ts;
      base.t_op_us = op;
      base.t_meas_us = meas;
      rows.push_back({ts, op, meas, cycle_time(s, base).total_us * 1e-3});
    }
  }
  return rows;
}

}  // namespace bbqec
