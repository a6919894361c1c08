// Lays out a bivariate bicycle code from its reference seed, prints the
// connection-length histogram, then schedules the check CZs and reports the
// cycle time.
//
//   layout_and_schedule [preset]      (default [[144,12,12]])

#include <iomanip>
#include <iostream>

#include "bbqec/layout.hpp"
#include "bbqec/scheduler.hpp"

int main(int argc, char** argv) {
  using namespace bbqec;
  const BBCodeSpec& code = find_code_preset(argc > 1 ? argv[1] : "[[144,12,12]]");
  const TannerGraph tg = tanner_graph(code);
  const LayoutSeed seed = *layout_seed_preset(code);
  const LayoutResult lay = layout_from_seed(seed, code, tg);

  std::cout << code.name << "  seed " << to_string(seed) << "\n"
            << "grid " << lay.placement.grid_rows() << " x " << lay.placement.grid_cols() << ", D_max = "
            << std::setprecision(4) << lay.dmax() << "\n\n  D        count\n";
  const DistanceHistogram h = distance_histogram(lay.placement, tg);
  for (const auto& e : h.entries) std::cout << "  " << std::setw(8) << std::left << e.distance() << e.count << "\n";

  const auto classes = assign_gate_classes(h);
  const auto gates = build_gates(lay.placement, tg, classes);
  ScheduleOptions opt;
  opt.restarts = 10;
  const Schedule s = greedy_schedule(gates, classes, opt);
  const CycleTime ct = cycle_time(s, {});
  std::cout << "\n" << s.num_slots() << " slots, " << ct.illumination_us << " us of illumination, cycle "
            << ct.total_us * 1e-3 << " ms at 1.5 us switching\n";
  return certify(s, gates, classes).ok(opt.threshold) ? 0 : 1;
}
