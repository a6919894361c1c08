#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bbqec/nelder_mead.hpp"
#include "bbqec/rydberg_gate.hpp"

namespace bbqec {

/// Box on the searched pulse parameters (Omega0, Delta0, a, f, tau).
struct PulseBounds {
  std::array<double, 5> lo{1e-3, -5.0, 0.0, 1e-3, 10.0};
  std::array<double, 5> hi{30.0, 5.0, kTwoPi, 30.0, 2000.0};
};

struct OptimizeBudget {
  int restarts = 8;
  int evals_per_restart = 300;
  double time_budget_secs = 0.0;  ///< 0 = unlimited
  unsigned long long seed = 2024;
};

struct OptimizeResult {
  PulseParams params;
  SimResult sim;
  double initial_fidelity{0.0};
  int evals{0};
  bool budget_exhausted{false};
  bool degenerate{false};  ///< V = 0: the pair factorizes and no entangling phase exists
};

inline std::array<double, 5> pack(const PulseParams& p) {
  return {p.omega0_mhz, p.delta0_mhz, p.phase_amp, p.mod_freq_mhz, p.window_ns};
}

inline PulseParams unpack(const std::array<double, 5>& x, const PulseParams& base) {
  PulseParams p = base;
  p.omega0_mhz = x[0];
  p.delta0_mhz = x[1];
  p.phase_amp = x[2];
  p.mod_freq_mhz = x[3];
  p.window_ns = x[4];
  return p;
}

/// Maximizes the decay-corrected fidelity over (Omega0, Delta0, a, f, tau) at
/// fixed gate time. Restart 0 starts from `init`; later restarts start from
/// seeded random perturbations of it. The result never scores below `init`.
inline OptimizeResult optimize_pulse(const GateContext& ctx, const PulseParams& init, const OptimizeBudget& budget = {},
                                     const PulseBounds& bounds = {}, const IntegratorOptions& integ = {}) {
  validate(ctx);
  validate(init);
  const auto start = std::chrono::steady_clock::now();
  OptimizeResult out;
  out.degenerate = !(ctx.v_mhz > 0.0);
  out.params = init;
  out.sim = evaluate_gate(init, ctx, integ);
  out.initial_fidelity = out.sim.fidelity;
  out.evals = 1;

  auto timed_out = [&] {
    if (budget.time_budget_secs <= 0.0) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
    return el.count() > budget.time_budget_secs;
  };

  auto objective = [&](const std::vector<double>& x) {
    std::array<double, 5> a{};
    for (std::size_t i = 0; i < 5; ++i) {
      if (x[i] < bounds.lo[i] || x[i] > bounds.hi[i]) return 1.0;
      a[i] = x[i];
    }
    if (timed_out()) return 1.0;
    const PulseParams p = unpack(a, init);
    const SimResult r = evaluate_gate(p, ctx, integ);
    ++out.evals;
    if (r.fidelity > out.sim.fidelity) {
      out.sim = r;
      out.params = p;
    }
    return -r.fidelity;
  };

  std::mt19937_64 rng(budget.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const auto x_init = pack(init);
  bool all_converged = true;
  for (int r = 0; r < budget.restarts && !timed_out(); ++r) {
    std::vector<double> x0(x_init.begin(), x_init.end());
    if (r > 0) {
      for (std::size_t i = 0; i < 5; ++i) {
        const double span = 0.1 * (bounds.hi[i] - bounds.lo[i]);
        x0[i] = std::clamp(x0[i] + 0.25 * span * jitter(rng), bounds.lo[i], bounds.hi[i]);
      }
    }
    std::vector<double> step(5);
    for (std::size_t i = 0; i < 5; ++i) {
      const double s = 0.02 * std::max(std::abs(x0[i]), 0.05 * (bounds.hi[i] - bounds.lo[i]));
      step[i] = x0[i] + s > bounds.hi[i] ? -s : s;
    }
    NelderMeadOptions nm;
    nm.max_evals = budget.evals_per_restart;
    nm.f_tol = 1e-9;
    nm.x_tol = 1e-4;
    const auto res = nelder_mead(objective, x0, step, nm);
    all_converged = all_converged && res.converged;
  }
  out.budget_exhausted = timed_out() || !all_converged;
  return out;
}

}  // namespace bbqec
