// Simulates every preset CZ pulse and prints the fidelity next to the
// lifetime-limited floor.

#include <cstdio>

#include "bbqec/rydberg_gate.hpp"

int main() {
  using namespace bbqec;
  std::printf("row  level   V/MHz   t/ns   F        F_ref    eps/eps_min\n");
  for (const GatePreset& g : gate_presets()) {
    const SimResult r = evaluate_gate(g.pulse(), g.context());
    std::printf("%3d  %-7s %6.1f  %5.0f  %.5f  %.4f   %5.2f\n", g.row, std::string(level_label(g.level)).c_str(),
                g.v_mhz, g.t_gate_ns, r.fidelity, g.fidelity, r.error_ratio());
  }
}
