#include <gtest/gtest.h>

#include "bbqec/reproduction.hpp"
#include "bbqec/scheduler.hpp"

using namespace bbqec;

namespace {

// The canonical layout and one schedule of it are shared by several tests.
const repro::CanonicalLayout& layout() {
  static const repro::CanonicalLayout cl = repro::canonical_layout();
  return cl;
}

const repro::CanonicalSchedule& schedule() {
  static const repro::CanonicalSchedule cs = [] {
    ScheduleOptions o;
    o.restarts = 10;
    return repro::canonical_schedule(layout(), o);
  }();
  return cs;
}

GateClass make_class(long long d2, double v_mhz, double t_gate_ns) {
  GateClass c;
  c.d2 = d2;
  c.v_mhz = v_mhz;
  c.t_gate_ns = t_gate_ns;
  return c;
}

CzGate make_gate(int idx, Coord check, Coord data, Subcircuit sub = Subcircuit::X) {
  return {{QubitKind::X, idx}, {QubitKind::L, idx}, check, data, 0, sub};
}

}  // namespace

TEST(GateClasses, CanonicalCounts) {
  const auto& cls = schedule().classes;
  ASSERT_EQ(cls.size(), 17u);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    EXPECT_EQ(cls[i].count, repro::kReferenceCounts[i]);
    EXPECT_EQ(cls[i].count, cls[i].expected_count);
    EXPECT_FALSE(cls[i].extrapolated);
    EXPECT_EQ(cls[i].class_id, static_cast<int>(i) + 1);
  }
}

TEST(GateClasses, NearestNeighbourClass) {
  const GateClass& c = schedule().classes.front();
  EXPECT_EQ(c.d2, 1);
  EXPECT_EQ(c.level, RydbergLevel::n50s);
  EXPECT_EQ(c.v_mhz, 415.0);
  EXPECT_EQ(c.t_gate_ns, 130.0);
  EXPECT_NEAR(c.r_um(), 1.7, 1e-12);
}

TEST(GateClasses, EmptyHistogram) { EXPECT_TRUE(assign_gate_classes({}).empty()); }

TEST(GateClasses, ExtrapolatedDistance) {
  DistanceHistogram h;
  h.entries = {{8, 3}};  // D = 2.83, not tabulated; nearest 83s anchor is D^2 = 10
  const auto cls = assign_gate_classes(h);
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_TRUE(cls[0].extrapolated);
  EXPECT_EQ(cls[0].level, RydbergLevel::n83s);
  EXPECT_NEAR(cls[0].v_mhz, 170.0 * std::pow(10.0 / 8.0, 3.0), 1e-9);
  EXPECT_EQ(cls[0].t_gate_ns, 180.0);
}

TEST(GateClasses, LevelRule) {
  EXPECT_EQ(level_for_distance(1.0), RydbergLevel::n50s);
  EXPECT_EQ(level_for_distance(1.5), RydbergLevel::n50s);
  EXPECT_EQ(level_for_distance(5.9), RydbergLevel::n83s);
  EXPECT_EQ(level_for_distance(6.0), RydbergLevel::n90s);
}

TEST(Crosstalk, PowerLaw) {
  const GateClass c = make_class(4, 1160.0, 150.0);
  EXPECT_NEAR(cross_pair_interaction({0, 0}, {0, 2}, c), 1160.0, 1e-9);
  EXPECT_NEAR(cross_pair_interaction({0, 0}, {0, 4}, c), 1160.0 / 64.0, 1e-9);
  EXPECT_THROW(cross_pair_interaction({1, 1}, {1, 1}, c), std::invalid_argument);
  const GateClass g17 = schedule().classes.back();
  EXPECT_LT(cross_pair_interaction({0, 0}, {0, 24}, g17), 0.01 * g17.v_mhz);
}

TEST(Crosstalk, MetricLimits) {
  const GateClass c = make_class(1, 415.0, 130.0);
  EXPECT_EQ(crosstalk_metric({0, 0}, {}, c), 0.0);
  EXPECT_LT(crosstalk_metric({0, 0}, {{0, 100000}, {1, 100000}}, c), 1e-20);
}

TEST(Compatible, ThresholdIsStrict) {
  const GateClass c = make_class(1, 415.0, 130.0);
  const CzGate g = make_gate(0, {0, 0}, {0, 1}), h = make_gate(1, {0, 5}, {0, 6});
  double worst = 0.0;
  for (const Coord& a : g.atoms()) worst = std::max(worst, crosstalk_metric(a, {h.check_pos, h.data_pos}, c));
  for (const Coord& a : h.atoms()) worst = std::max(worst, crosstalk_metric(a, {g.check_pos, g.data_pos}, c));
  EXPECT_FALSE(compatible(g, h, c, worst));
  EXPECT_TRUE(compatible(g, h, c, std::nextafter(worst, 1.0)));
}

TEST(Compatible, SharedAtomIsIncompatible) {
  const GateClass c = make_class(1, 415.0, 130.0);
  EXPECT_FALSE(compatible(make_gate(0, {0, 0}, {0, 1}), make_gate(1, {0, 0}, {1, 0}), c, 1e9));
}

TEST(Compatible, LongestClassInterferesEverywhere) {
  const auto& s = schedule();
  const std::size_t last = s.classes.size() - 1;
  std::vector<const CzGate*> g17;
  for (const CzGate& g : s.gates)
    if (g.class_index == static_cast<int>(last)) g17.push_back(&g);
  ASSERT_EQ(g17.size(), 216u);
  for (std::size_t i = 0; i < g17.size(); ++i)
    for (std::size_t j = i + 1; j < g17.size(); ++j)
      ASSERT_FALSE(compatible(*g17[i], *g17[j], s.classes[last], 0.01));
}

TEST(Compatible, NearestNeighbourGatesAtOppositeCorners) {
  const GateClass& c1 = schedule().classes.front();
  EXPECT_TRUE(compatible(make_gate(0, {0, 0}, {0, 1}), make_gate(1, {11, 23}, {11, 22}), c1, 0.01));
}

TEST(GreedySchedule, PairwiseCompatibleBucketTakesOneSlot) {
  const std::vector<GateClass> cls{make_class(1, 415.0, 130.0)};
  std::vector<CzGate> gates;
  for (int i = 0; i < 6; ++i) gates.push_back(make_gate(i, {0, 20 * i}, {0, 20 * i + 1}));
  const Schedule s = greedy_schedule(gates, cls);
  EXPECT_EQ(s.num_slots(), 1);
  EXPECT_TRUE(certify(s, gates, cls).ok(0.01));
}

TEST(GreedySchedule, SubcircuitsAreSeparated) {
  const std::vector<GateClass> cls{make_class(1, 415.0, 130.0)};
  std::vector<CzGate> gates;
  for (int i = 0; i < 4; ++i)
    gates.push_back(make_gate(i, {0, 20 * i}, {0, 20 * i + 1}, i % 2 ? Subcircuit::Z : Subcircuit::X));
  const Schedule s = greedy_schedule(gates, cls);
  ASSERT_EQ(s.num_slots(), 2);
  EXPECT_EQ(s.slots[0].subcircuit, Subcircuit::X);
  EXPECT_EQ(s.slots[1].subcircuit, Subcircuit::Z);
}

TEST(GreedySchedule, CanonicalIsCertified) {
  const auto& s = schedule();
  const ScheduleCheck chk = certify(s.schedule, s.gates, s.classes);
  EXPECT_TRUE(chk.covers_all);
  EXPECT_TRUE(chk.atoms_disjoint);
  EXPECT_TRUE(chk.single_class);
  EXPECT_TRUE(chk.x_before_z);
  EXPECT_LT(chk.max_crosstalk, 0.01);
  EXPECT_LE(s.schedule.num_slots(), 700);
  for (const auto& slot : s.schedule.slots)
    for (std::size_t a = 0; a < slot.gates.size(); ++a)
      for (std::size_t b = a + 1; b < slot.gates.size(); ++b)
        ASSERT_TRUE(compatible(s.gates[static_cast<std::size_t>(slot.gates[a])],
                               s.gates[static_cast<std::size_t>(slot.gates[b])],
                               s.classes[static_cast<std::size_t>(slot.class_index)], 0.01));
}

TEST(GreedySchedule, LongClassesAreSerial) {
  int shared = 0;
  std::string where;
  for (const auto& slot : schedule().schedule.slots) {
    const GateClass& c = schedule().classes[static_cast<std::size_t>(slot.class_index)];
    if (c.class_id >= 12 && slot.gates.size() > 1) {
      ++shared;
      where += " " + std::to_string(c.class_id);
    }
  }
  EXPECT_EQ(shared, 0) << "multi-gate slots in classes:" << where;
}

TEST(GreedySchedule, IlluminationPerGate) {
  const auto& s = schedule();
  EXPECT_NEAR(s.schedule.illumination_us() / static_cast<double>(s.gates.size()), 0.27, 0.01);
}

TEST(GreedySchedule, DeterministicAcrossWorkerCounts) {
  ScheduleOptions a;
  a.restarts = 4;
  ScheduleOptions b = a;
  b.jobs = 2;
  const auto& s = schedule();
  const Schedule x = greedy_schedule(s.gates, s.classes, a), y = greedy_schedule(s.gates, s.classes, b);
  ASSERT_EQ(x.num_slots(), y.num_slots());
  for (int i = 0; i < x.num_slots(); ++i) EXPECT_EQ(x.slots[i].gates, y.slots[i].gates);
}

TEST(GreedySchedule, LooserThresholdNeverAddsSlots) {
  const auto& s = schedule();
  int prev = std::numeric_limits<int>::max();
  for (double th : {0.005, 0.01, 0.02}) {
    ScheduleOptions o;
    o.restarts = 5;
    o.threshold = th;
    const Schedule sch = greedy_schedule(s.gates, s.classes, o);
    EXPECT_TRUE(certify(sch, s.gates, s.classes).ok(th));
    EXPECT_LE(sch.num_slots(), prev) << th;
    prev = sch.num_slots();
  }
}

// --- timing ----------------------------------------------------------------

namespace {

// 693 slots whose illumination adds up to 234 us.
Schedule synthetic_schedule() {
  Schedule s;
  s.slots.resize(693);
  for (auto& slot : s.slots) slot.illumination_ns = 234000.0 / 693.0;
  return s;
}

}  // namespace

TEST(CycleTime, ReferenceOperatingPoint) {
  const CycleTime c = cycle_time(synthetic_schedule(), {});
  EXPECT_NEAR(c.total_us * 1e-3, 1.28, 0.01);
  EXPECT_EQ(c.switch_units, 697);
  EXPECT_NEAR(c.illumination_us, 234.0, 1e-9);
}

TEST(CycleTime, ZeroSwitchingLeavesFixedTime) {
  TimingModel t;
  t.t_switch_us = 0.0;
  const CycleTime c = cycle_time(synthetic_schedule(), t);
  EXPECT_NEAR(c.total_us, 234.0 + 3.5, 1e-9);
  EXPECT_NEAR(c.total_us, c.fixed_us(), 1e-12);
}

TEST(CycleTime, ResetAndMeasureAreAdditive) {
  TimingModel t;
  const double base = cycle_time(schedule().schedule, t).total_us;
  t.t_op_us = 10.0;
  t.t_meas_us = 10.0;
  EXPECT_NEAR(cycle_time(schedule().schedule, t).total_us - base, 20.0, 1e-9);
}

TEST(CycleTime, UpperBound) {
  EXPECT_NEAR(cycle_time_upper_bound(144, 0.48, {}) * 1e-3, 1.72, 0.01);
  TimingModel zero;
  zero.t_switch_us = 0.0;
  EXPECT_DOUBLE_EQ(cycle_time_upper_bound(144, 0.0, zero), 3.5);
  EXPECT_THROW(cycle_time_upper_bound(0, 0.48, {}), std::invalid_argument);
  EXPECT_GE(cycle_time_upper_bound(144, 0.48, {}), cycle_time(schedule().schedule, {}).total_us);
}

TEST(CycleTime, SweepIsAffineWithSlotSlope) {
  const Schedule s = synthetic_schedule();
  const auto rows = sweep_cycle_time(s, {0.0, 1.0, 1.5, 3.0}, {{0.0, 0.0}, {170.0, 500.0}});
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_NEAR((rows[1].total_ms - rows[0].total_ms) * 1e3, 697.0, 1e-9);
  EXPECT_NEAR(rows[0].total_ms * 1e3, 237.5, 1e-9);
  EXPECT_NEAR(rows[2].total_ms, cycle_time(s, {}).total_us * 1e-3, 1e-12);
  EXPECT_NEAR((rows[4].total_ms - rows[0].total_ms) * 1e3, 670.0, 1e-9);
}
