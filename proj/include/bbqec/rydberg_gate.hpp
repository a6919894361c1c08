#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "bbqec/constants.hpp"
#include "bbqec/pulse.hpp"

namespace bbqec {

using cplx = std::complex<double>;

/// How the single-atom and pair traces are weighted into T_R.
enum class RydbergTimeWeighting {
  basis_average,  ///< mean over |00>,|01>,|10>,|11>: (2 P_R + P_gR + 2 P_RR) / 4
  half_sum,       ///< (P_R + P_gR + P_RR) / 2
};

inline constexpr std::string_view weighting_name(RydbergTimeWeighting w) {
  return w == RydbergTimeWeighting::basis_average ? "basis-average" : "half-sum";
}

inline RydbergTimeWeighting parse_weighting(std::string_view s) {
  if (s == "basis-average") return RydbergTimeWeighting::basis_average;
  if (s == "half-sum") return RydbergTimeWeighting::half_sum;
  throw std::invalid_argument("unknown T_R weighting '" + std::string(s) + "'");
}

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double grid_ns = 0.1;  ///< sampling grid; also the largest allowed step
  RydbergTimeWeighting weighting = RydbergTimeWeighting::basis_average;
};

/// Uniform sampling grid over [0, t_gate]; the last interval may be shorter.
inline std::vector<double> time_grid(double t_gate_ns, double dt_ns) {
  if (!(dt_ns > 0.0)) throw std::invalid_argument("time grid spacing must be positive");
  std::vector<double> t;
  const auto steps = static_cast<long>(std::floor(t_gate_ns / dt_ns + 1e-9));
  for (long i = 0; i <= steps; ++i) t.push_back(static_cast<double>(i) * dt_ns);
  if (t_gate_ns - t.back() > 1e-9) t.push_back(t_gate_ns);
  return t;
}

namespace detail {

/// Integrates i dc/dt = H(t) c with an adaptive Dormand-Prince 5(4) stepper,
/// stepping interval by interval over the grid and recording every sample.
template <std::size_t N, typename Rhs, typename Observer>
double integrate_on_grid(Rhs&& rhs, std::array<cplx, N>& state, const std::vector<double>& grid,
                         const IntegratorOptions& opt, Observer&& observe) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<cplx, N>;
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  double max_drift = 0.0;
  auto norm_drift = [&] {
    double n = 0.0;
    for (const cplx& c : state) n += std::norm(c);
    max_drift = std::max(max_drift, std::abs(n - 1.0));
  };
  observe(std::size_t{0}, state);
  norm_drift();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    odeint::integrate_adaptive(stepper, rhs, state, grid[k - 1], grid[k], h);
    observe(k, state);
    norm_drift();
  }
  return max_drift;
}

}  // namespace detail

/// One atom driven between |1> and |r>.
struct SingleAtomResult {
  double a01{1.0};
  double phi01{0.0};
  std::vector<double> p_ground;
  std::vector<double> p_rydberg;
  double max_norm_drift{0.0};
};

/// Two atoms in the symmetric basis {|11>, |W>, |rr>}.
struct PairResult {
  double a11{1.0};
  double phi11{0.0};
  std::vector<double> p_gg;
  std::vector<double> p_single;  ///< |c_W|^2 = P_gR + P_Rg
  std::vector<double> p_rr;
  double max_norm_drift{0.0};
};

inline SingleAtomResult simulate_single(const PulseParams& p, const IntegratorOptions& opt = {}) {
  validate(p);
  const auto grid = time_grid(p.t_gate_ns, opt.grid_ns);
  std::array<cplx, 2> c{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  auto rhs = [&p](const std::array<cplx, 2>& x, std::array<cplx, 2>& dx, double t) {
    const double half_rabi = 0.5 * kTwoPi * 1e-3 * rabi_envelope(t, p);
    const cplx e = std::polar(1.0, -phase_profile(t, p));
    const cplx mi{0.0, -1.0};
    dx[0] = mi * half_rabi * e * x[1];
    dx[1] = mi * half_rabi * std::conj(e) * x[0];
  };
  SingleAtomResult r;
  r.p_ground.resize(grid.size());
  r.p_rydberg.resize(grid.size());
  r.max_norm_drift = detail::integrate_on_grid(rhs, c, grid, opt, [&](std::size_t k, const std::array<cplx, 2>& x) {
    r.p_ground[k] = std::norm(x[0]);
    r.p_rydberg[k] = std::norm(x[1]);
  });
  r.a01 = std::abs(c[0]);
  r.phi01 = std::arg(c[0]);
  return r;
}

inline PairResult simulate_pair(const PulseParams& p, const GateContext& ctx, const IntegratorOptions& opt = {}) {
  validate(p);
  validate(ctx);
  const auto grid = time_grid(p.t_gate_ns, opt.grid_ns);
  std::array<cplx, 3> c{cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}};
  const double v = kTwoPi * 1e-3 * ctx.v_mhz;
  auto rhs = [&p, v](const std::array<cplx, 3>& x, std::array<cplx, 3>& dx, double t) {
    const double g = std::numbers::sqrt2 * 0.5 * kTwoPi * 1e-3 * rabi_envelope(t, p);
    const cplx e = std::polar(1.0, -phase_profile(t, p));
    const cplx mi{0.0, -1.0};
    dx[0] = mi * g * e * x[1];
    dx[1] = mi * (g * std::conj(e) * x[0] + g * e * x[2]);
    dx[2] = mi * (g * std::conj(e) * x[1] + v * x[2]);
  };
  PairResult r;
  r.p_gg.resize(grid.size());
  r.p_single.resize(grid.size());
  r.p_rr.resize(grid.size());
  r.max_norm_drift = detail::integrate_on_grid(rhs, c, grid, opt, [&](std::size_t k, const std::array<cplx, 3>& x) {
    r.p_gg[k] = std::norm(x[0]);
    r.p_single[k] = std::norm(x[1]);
    r.p_rr[k] = std::norm(x[2]);
  });
  r.a11 = std::abs(c[0]);
  r.phi11 = std::arg(c[0]);
  return r;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double x) {
  const double pi = std::numbers::pi;
  double r = std::fmod(x + pi, kTwoPi);
  if (r < 0) r += kTwoPi;
  r -= pi;
  return r <= -pi ? r + kTwoPi : r;
}

/// phi = phi11 - 2 phi01 for a symmetric gate.
inline double gate_phase(double phi11, double phi01) { return wrap_phase(phi11 - 2.0 * phi01); }

/// Bell-state fidelity of a perfect-amplitude phase gate.
inline double bell_fidelity_phase_gate(double phi00, double phi) {
  return (3.0 + 2.0 * std::cos(phi00) - std::cos(phi - phi00) - 2.0 * std::cos(phi)) / 8.0;
}

/// Two-qubit average fidelity against CZ for a symmetric diagonal gate (phi00 = 0).
inline double average_fidelity(double a01, double a11, double phi) {
  return (5.0 + 4.0 * a01 * a01 + 4.0 * a01 + a11 * a11 - 2.0 * (1.0 + 2.0 * a01) * a11 * std::cos(phi)) / 20.0;
}

/// Bell-preparation fidelity of the same symmetric gate (phi00 = 0).
inline double bell_fidelity_symmetric(double a01, double a11, double phi) {
  return (1.0 + 4.0 * a01 * a01 + 4.0 * a01 + a11 * a11 - 2.0 * (1.0 + 2.0 * a01) * a11 * std::cos(phi)) / 16.0;
}

/// Integrated Rydberg time in ns from the single-atom trace P_R, the pair's
/// singly excited trace P_gR (= |c_W|^2) and doubly excited trace P_RR, all
/// sampled on one grid (trapezoid rule). In the pair, P_RR counts two excited
/// atoms, so the basis average weights it twice like the two single-atom states.
inline double integrated_rydberg_time(const std::vector<double>& grid, const std::vector<double>& p_r,
                                      const std::vector<double>& p_single, const std::vector<double>& p_rr,
                                      RydbergTimeWeighting w = RydbergTimeWeighting::basis_average) {
  if (p_r.size() != grid.size() || p_single.size() != grid.size() || p_rr.size() != grid.size())
    throw std::invalid_argument("population traces are not on a common time grid");
  const double cs = w == RydbergTimeWeighting::basis_average ? 0.25 : 0.5;
  double acc = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double f0 = 0.5 * (p_r[k - 1] + p_rr[k - 1]) + cs * p_single[k - 1];
    const double f1 = 0.5 * (p_r[k] + p_rr[k]) + cs * p_single[k];
    acc += 0.5 * (f0 + f1) * (grid[k] - grid[k - 1]);
  }
  return acc;
}

/// F = F_ave - T_R / tau_R, with T_R in ns and tau_R in us.
inline double decay_corrected_fidelity(double f_ave, double t_r_ns, double lifetime_us) {
  return f_ave - t_r_ns / (lifetime_us * 1e3);
}

/// Lifetime-limited error floor 2 / (V tau_R), V angular.
inline double minimum_gate_error(double v_mhz, double lifetime_us) {
  if (!(v_mhz > 0.0) || !(lifetime_us > 0.0)) throw std::invalid_argument("V and tau_R must be positive");
  return 2.0 / (kTwoPi * v_mhz * lifetime_us);
}

struct FidelityFloor {
  double eps_min{0.0};
  std::optional<double> ratio;  ///< eps / eps_min when eps is supplied
};

inline FidelityFloor fidelity_floor(const GateContext& ctx, std::optional<double> eps = std::nullopt) {
  FidelityFloor f{minimum_gate_error(ctx.v_mhz, ctx.lifetime_us), std::nullopt};
  if (eps) f.ratio = *eps / f.eps_min;
  return f;
}

struct SimResult {
  double a01{1.0}, a11{1.0};
  double phi01{0.0}, phi11{0.0};
  double phase{0.0};
  double t_r_ns{0.0};
  double f_ave{0.0};
  double f_bell{0.0};
  double fidelity{0.0};  ///< decay corrected
  double eps_r{0.0};
  double eps_min{0.0};   ///< 0 when V = 0
  double max_norm_drift{0.0};

  double error() const { return 1.0 - fidelity; }
  double error_ratio() const { return eps_min > 0.0 ? error() / eps_min : 0.0; }
};

struct GateTraces {
  std::vector<double> t_ns;
  SingleAtomResult single;
  PairResult pair;
};

inline SimResult evaluate_gate(const PulseParams& p, const GateContext& ctx, const IntegratorOptions& opt = {},
                               GateTraces* traces = nullptr) {
  SingleAtomResult s = simulate_single(p, opt);
  PairResult d = simulate_pair(p, ctx, opt);
  const auto grid = time_grid(p.t_gate_ns, opt.grid_ns);
  SimResult r;
  r.a01 = s.a01;
  r.a11 = d.a11;
  r.phi01 = s.phi01;
  r.phi11 = d.phi11;
  r.phase = gate_phase(d.phi11, s.phi01);
  r.t_r_ns = integrated_rydberg_time(grid, s.p_rydberg, d.p_single, d.p_rr, opt.weighting);
  r.f_ave = average_fidelity(r.a01, r.a11, r.phase);
  r.f_bell = bell_fidelity_symmetric(r.a01, r.a11, r.phase);
  r.fidelity = decay_corrected_fidelity(r.f_ave, r.t_r_ns, ctx.lifetime_us);
  r.eps_r = r.t_r_ns / (ctx.lifetime_us * 1e3);
  r.eps_min = ctx.v_mhz > 0.0 ? minimum_gate_error(ctx.v_mhz, ctx.lifetime_us) : 0.0;
  r.max_norm_drift = std::max(s.max_norm_drift, d.max_norm_drift);
  if (traces) {
    traces->t_ns = grid;
    traces->single = std::move(s);
    traces->pair = std::move(d);
  }
  return r;
}

/// One row of the tabulated gate designs for the [[144,12,12]] layout.
struct GatePreset {
  int row;
  double distance;       ///< lattice units
  double r_um;
  RydbergLevel level;
  double v_mhz;
  double fidelity;       ///< tabulated decay-corrected fidelity
  double t_gate_ns;
  double phase_amp;
  double mod_freq_mhz;
  double omega_mhz;
  double delta0_mhz;
  double window_ns;
  double v_over_omega;
  double eps_ratio;      ///< tabulated eps / eps_min

  PulseParams pulse(const PhysicalConstants& k = {}) const {
    return {omega_mhz, delta0_mhz, phase_amp, mod_freq_mhz, window_ns, t_gate_ns, k.edge_time_ns};
  }
  GateContext context(const PhysicalConstants& k = {}) const {
    return {v_mhz, lifetime_us(level, k), std::string(level_label(level)), r_um};
  }
};

inline const std::array<GatePreset, 17>& gate_presets() {
  using L = RydbergLevel;
  static const std::array<GatePreset, 17> rows = {{
      {1, 1.0, 1.7, L::n50s, 415., 0.9996, 130, 0.774, 20.0, 21.5, -1.59, 1907, 19.3, 31.},
      {2, 1.41, 2.40, L::n50s, 58.5, 0.9993, 180, 0.749, 10.6, 11.3, -1.59, 374, 5.2, 7.8},
      {3, 2.0, 3.4, L::n83s, 1160., 0.9999, 150, 1.44, 9.96, 15.9, -0.818, 20.3, 73., 76.},
      {4, 2.24, 3.81, L::n83s, 780., 0.9999, 150, 1.45, 9.91, 15.9, -0.856, 20.2, 49., 51.},
      {5, 3.16, 5.37, L::n83s, 170., 0.9998, 180, 0.707, 11.5, 11.4, -0.451, 744, 15., 22.},
      {6, 3.61, 6.14, L::n83s, 85., 0.9998, 180, 0.594, 13.3, 11.2, 0.152, 922, 7.6, 11.},
      {7, 4.12, 7.00, L::n83s, 40., 0.9998, 180, 0.569, 14.1, 11.1, -0.505, 81, 3.6, 5.3},
      {8, 4.47, 7.60, L::n83s, 25., 0.9998, 200, 0.622, 14.4, 9.54, -0.897, 452, 2.6, 3.3},
      {9, 5.0, 8.65, L::n83s, 13., 0.9996, 270, 0.439, 14.46, 11.2, 0.395, 97.3, 1.2, 3.4},
      {10, 5.10, 8.67, L::n83s, 11.5, 0.9996, 270, 0.502, 14.63, 11.545, 0.34, 94.2, 1.0, 3.0},
      {11, 5.83, 9.91, L::n83s, 5.2, 0.9995, 270, 2.0, 12.9, 6.72, -0.976, 34.5, 0.77, 1.7},
      {12, 6.0, 10.2, L::n90s, 11.2, 0.9996, 350, 0.578, 6.42, 4.32, -0.383, 1756, 2.6, 3.5},
      {13, 6.08, 10.3, L::n90s, 10.1, 0.9995, 400, 0.725, 5.89, 3.85, -0.469, 821, 2.6, 4.0},
      {14, 6.40, 10.9, L::n90s, 7.7, 0.9994, 450, 0.496, 8.01, 5.88, 0.422, 197, 1.3, 3.7},
      {15, 6.71, 11.4, L::n90s, 5.8, 0.9994, 460, 0.556, 7.54, 5.98, 0.338, 171, 0.97, 2.8},
      {16, 7.07, 12.0, L::n90s, 4.3, 0.9993, 465, 1.16, 5.05, 6.36, 0.794, 367, 0.68, 2.4},
      {17, 7.21, 12.3, L::n90s, 3.8, 0.9993, 480, 1.46, 7.06, 7.26, 0.074, 103, 0.52, 2.1},
  }};
  return rows;
}

inline const GatePreset& gate_preset(int row) {
  if (row < 1 || row > 17) throw std::out_of_range("gate preset row must be in 1..17");
  return gate_presets()[static_cast<std::size_t>(row - 1)];
}

}  // namespace bbqec
