#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "pvrfid/error.hpp"

namespace pvrfid {

struct ConstantLeak {
  double current = 0.0;  // A
};

struct ResistiveLeak {
  double resistance = 0.0;  // ohm, in parallel with the capacitor
};

using LeakModel = std::variant<std::monostate, ConstantLeak, ResistiveLeak>;

// Zero leakage maps to "no leak" so the positivity invariant holds.
inline LeakModel constant_leak(double amps) {
  if (amps == 0.0) return std::monostate{};
  return ConstantLeak{amps};
}

struct CapacitorModel {
  double capacitance = 1.0;  // F
  double v_max = 3.0;        // V
  LeakModel leak;
};

struct ChargeState {
  double v = 0.0;  // V
  double t = 0.0;  // s
};

inline void validate(const CapacitorModel& c) {
  using detail::require;
  require(c.capacitance > 0.0, ErrorKind::validation, "capacitance must be > 0");
  require(c.v_max > 0.0, ErrorKind::validation, "capacitor v_max must be > 0");
  std::visit(
      [](const auto& leak) {
        using T = std::decay_t<decltype(leak)>;
        if constexpr (std::is_same_v<T, ConstantLeak>)
          require(leak.current > 0.0, ErrorKind::validation, "leak current must be > 0");
        else if constexpr (std::is_same_v<T, ResistiveLeak>)
          require(leak.resistance > 0.0, ErrorKind::validation, "leak resistance must be > 0");
      },
      c.leak);
}

inline double stored_energy(double c, double v) { return 0.5 * c * v * v; }

inline double usable_energy(double c, double v_hi, double v_lo) {
  detail::require(v_hi >= v_lo && v_lo >= 0.0, ErrorKind::validation,
                  "usable energy needs v_hi >= v_lo >= 0");
  return 0.5 * c * (v_hi * v_hi - v_lo * v_lo);
}

inline double leak_current(const CapacitorModel& c, double v) {
  return std::visit(
      [v](const auto& leak) -> double {
        using T = std::decay_t<decltype(leak)>;
        if constexpr (std::is_same_v<T, ConstantLeak>) return leak.current;
        else if constexpr (std::is_same_v<T, ResistiveLeak>) return v / leak.resistance;
        else return 0.0;
      },
      c.leak);
}

// One explicit-Euler step of C dv/dt = i_net, clamped to [0, v_max].
inline ChargeState step(const ChargeState& s, const CapacitorModel& c, double i_net, double dt) {
  detail::require(dt > 0.0, ErrorKind::validation, "time step must be > 0");
  const double v = std::clamp(s.v + i_net * dt / c.capacitance, 0.0, c.v_max);
  return {v, s.t + dt};
}

struct DecayPoint {
  double t = 0.0;  // s since the decay started
  double v = 0.0;  // V
};

// Least squares for k = 1/(R C) in ln(v/v0) = -k t (line through the origin),
// then R = 1/(k C).
inline double fit_leak_resistance(double c, double v0, const std::vector<DecayPoint>& points) {
  detail::require(c > 0.0 && v0 > 0.0, ErrorKind::validation, "fit needs c > 0 and v0 > 0");
  if (points.empty()) throw Error(ErrorKind::degenerate_points, "no decay points");
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    if (!(p.t > 0.0) || !(p.v > 0.0) || !(p.v < v0))
      throw Error(ErrorKind::degenerate_points, "decay points need t > 0 and 0 < v < v0");
    num += p.t * -std::log(p.v / v0);
    den += p.t * p.t;
  }
  return den / (num * c);
}

}  // namespace pvrfid
