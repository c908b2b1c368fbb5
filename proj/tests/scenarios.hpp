#pragma once

// Scenario builders shared by the unit tests and the acceptance binary.

#include "pvrfid/simulator.hpp"

namespace pvrfid::testing {

inline DiodeModel prototype_module() { return fit_single_diode(3.7, 4.3, 0.60, 1.06, 4); }

inline constexpr double kDecayResistance = 12331.517312;  // 5000 s / ln(3/2), C = 1 F

// Charge test: 1 F from 0 V, photocurrent scaled to 5 mA at short circuit.
inline Scenario charge_scenario(double duration = 4 * 3600.0) {
  Scenario s;
  s.pv = prototype_module();
  s.photocurrent_scale = 5e-3 / s.pv.isc;
  s.cap = {1.0, 3.0, ResistiveLeak{kDecayResistance}};
  s.schedule = {20000.0, std::nullopt};
  s.light = constant_light(0.0, duration);
  s.duration = duration;
  return s;
}

inline ICProfile no_load() {
  ICProfile ic;
  ic.i_sleep = ic.i_ready = ic.i_measure = 0.0;
  return ic;
}

// Dark decay of a fully charged 1 F capacitor through the fitted resistance.
inline Scenario decay_scenario() {
  Scenario s = charge_scenario(8000.0);
  s.light = {};
  s.ic = no_load();
  s.schedule = {};
  s.initial_v = 3.0;
  return s;
}

// Day-long persistence run: full charge, dark, constant leak.
inline Scenario persistence_scenario(double capacitance, double leak_amps) {
  Scenario s;
  s.pv = prototype_module();
  s.cap = {capacitance, 3.0, constant_leak(leak_amps)};
  s.duration = constants::seconds_per_day;
  s.dt = 10.0;
  s.initial_v = 3.0;
  return s;
}

inline double voltage_at(const Trace& trace, double t) {
  for (std::size_t k = 1; k < trace.size(); ++k)
    if (trace[k].t >= t) {
      const auto& a = trace[k - 1];
      const auto& b = trace[k];
      return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
    }
  return trace.back().v;
}

}  // namespace pvrfid::testing
