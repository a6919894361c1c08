#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bbqec/constants.hpp"

namespace bbqec {

/// Analytic CZ pulse: constant Rabi amplitude with logistic edges, and a phase
/// that is a linear detuning ramp plus a super-Gaussian windowed sine.
/// Frequencies are in MHz (cycles), times in ns.
struct PulseParams {
  double omega0_mhz{0.0};    ///< peak Rabi frequency Omega/2pi
  double delta0_mhz{0.0};    ///< static detuning Delta0/2pi
  double phase_amp{0.0};     ///< a, radians
  double mod_freq_mhz{0.0};  ///< f
  double window_ns{0.0};     ///< tau of the super-Gaussian window
  double t_gate_ns{0.0};
  double edge_ns{1.825};     ///< tau_e

  double t_mid() const { return 0.5 * t_gate_ns; }
};

inline void validate(const PulseParams& p) {
  if (!(p.omega0_mhz >= 0.0)) throw std::invalid_argument("Rabi frequency must be non-negative");
  if (!(p.mod_freq_mhz > 0.0)) throw std::invalid_argument("modulation frequency must be positive");
  if (!(p.window_ns > 0.0)) throw std::invalid_argument("phase window must be positive");
  if (!(p.edge_ns > 0.0)) throw std::invalid_argument("edge time must be positive");
  if (!(p.t_gate_ns > 40.0 * p.edge_ns))
    throw std::invalid_argument("gate time " + std::to_string(p.t_gate_ns) + " ns too short for the pulse edges");
}

/// Two-atom environment of a gate.
struct GateContext {
  double v_mhz{0.0};        ///< blockade interaction V/2pi
  double lifetime_us{0.0};  ///< Rydberg lifetime tau_R
  std::string level;
  double distance_um{0.0};  ///< metadata only
};

inline void validate(const GateContext& c) {
  if (!(c.v_mhz >= 0.0)) throw std::invalid_argument("interaction strength must be non-negative");
  if (!(c.lifetime_us > 0.0)) throw std::invalid_argument("Rydberg lifetime must be positive");
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Omega(t) in MHz (as Omega/2pi).
inline double rabi_envelope(double t_ns, const PulseParams& p) {
  const double te = p.edge_ns;
  const double s = logistic((t_ns - 20.0 * te) / te) + logistic((p.t_gate_ns - 20.0 * te - t_ns) / te) - 1.0;
  return p.omega0_mhz * std::max(0.0, s);
}

/// phi(t) = 2 pi Delta0 t + a sin[2 pi f (t - t0)] exp(-((t - t0)/tau)^4), radians.
inline double phase_profile(double t_ns, const PulseParams& p) {
  const double u = t_ns - p.t_mid();
  const double w = u / p.window_ns;
  return kTwoPi * p.delta0_mhz * 1e-3 * t_ns + p.phase_amp * std::sin(kTwoPi * p.mod_freq_mhz * 1e-3 * u) * std::exp(-(w * w) * (w * w));
}

/// Instantaneous detuning d(phi)/dt / 2pi in MHz, by central difference.
inline double detuning_mhz(double t_ns, const PulseParams& p, double h = 1e-3) {
  return (phase_profile(t_ns + h, p) - phase_profile(t_ns - h, p)) / (2.0 * h) / kTwoPi * 1e3;
}

}  // namespace bbqec
