#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bbqec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constants shared by the gate and scheduling models. Every field
/// can be overridden from a run config.
struct PhysicalConstants {
  double lattice_spacing_um = 1.7;
  double edge_time_ns = 1.825;        ///< tau_e of the Rabi envelope
  double lifetime_50s_us = 60.4;
  double lifetime_83s_us = 209.0;
  double lifetime_90s_us = 252.0;
  double crosstalk_threshold = 0.01;  ///< x_i must be strictly below this
  double local_gate_fixed_us = 3.5;
  int local_switch_units = 4;
  double t_switch_us = 1.5;
};

enum class RydbergLevel { n50s, n83s, n90s };

inline constexpr std::string_view level_label(RydbergLevel l) {
  switch (l) {
    case RydbergLevel::n50s: return "50s1/2";
    case RydbergLevel::n83s: return "83s1/2";
    case RydbergLevel::n90s: return "90s1/2";
  }
  return "?";
}

inline RydbergLevel parse_level(std::string_view s) {
  if (s.starts_with("50")) return RydbergLevel::n50s;
  if (s.starts_with("83")) return RydbergLevel::n83s;
  if (s.starts_with("90")) return RydbergLevel::n90s;
  throw std::invalid_argument("unknown Rydberg level '" + std::string(s) + "'");
}

inline double lifetime_us(RydbergLevel l, const PhysicalConstants& k = {}) {
  switch (l) {
    case RydbergLevel::n50s: return k.lifetime_50s_us;
    case RydbergLevel::n83s: return k.lifetime_83s_us;
    case RydbergLevel::n90s: return k.lifetime_90s_us;
  }
  return 0.0;
}

}  // namespace bbqec
