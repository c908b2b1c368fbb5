#pragma once

// Fixed-step coupling of PV source, capacitor buffer and IC load.
//
// The PV string is wired straight to the capacitor, so its operating voltage
// is the capacitor voltage. Each step evaluates every current at the voltage
// at the start of the step (explicit Euler) and advances the capacitor with
// storage::step. Powers in a record are the step's currents times the
// mid-step voltage, which makes sum(p_in - p_load - p_leak) * dt equal the
// change of stored energy up to rounding.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pvrfid/constants.hpp"
#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"
#include "pvrfid/ic_load.hpp"
#include "pvrfid/pv_model.hpp"
#include "pvrfid/storage.hpp"

namespace pvrfid {

struct LightSegment {
  double start = 0.0;      // s
  double end = 0.0;        // s
  double intensity = 1.0;  // suns (photocurrent multiplier)
};

struct LightProfile {
  std::vector<LightSegment> segments;

  // Mean intensity over [a, b).
  double average(double a, double b) const {
    double acc = 0.0;
    for (const auto& s : segments) {
      const double lo = std::max(a, s.start);
      const double hi = std::min(b, s.end);
      if (hi > lo) acc += (hi - lo) * s.intensity;
    }
    return acc / (b - a);
  }

  double integral(double a, double b) const { return average(a, b) * (b - a); }
};

inline LightProfile constant_light(double start, double end, double intensity = 1.0) {
  if (!(end > start)) return {};
  return {{{start, end, intensity}}};
}

// Suns-equivalent intensity of an arbitrary illuminant for a given EQE:
// ratio of its spectral photocurrent to that of the reference spectrum.
inline double relative_intensity(const SpectralResponse& eqe, const Spectrum& illuminant,
                                 const Spectrum& reference) {
  return jsc_from_eqe(eqe, illuminant) / jsc_from_eqe(eqe, reference);
}

inline void validate(const LightProfile& l) {
  double prev_end = -INFINITY;
  for (const auto& s : l.segments) {
    detail::require(s.start <= s.end, ErrorKind::validation, "light segment ends before it starts");
    detail::require(s.start >= prev_end, ErrorKind::validation,
                    "light segments must be ordered and non-overlapping");
    detail::require(s.intensity >= 0.0, ErrorKind::validation, "light intensity must be >= 0");
    prev_end = s.end;
  }
}

struct Scenario {
  DiodeModel pv;
  double photocurrent_scale = 1.0;
  CapacitorModel cap;
  ICProfile ic;
  MeasurementSchedule schedule;
  LightProfile light;
  double duration = 3600.0;  // s
  double dt = 1.0;           // s
  double initial_v = 0.0;    // V
};

inline void validate(const Scenario& s) {
  try {
    validate(s.pv);
    validate(s.cap);
    validate(s.ic);
    validate(s.schedule, s.ic);
    validate(s.light);
    detail::require(s.photocurrent_scale >= 0.0, ErrorKind::validation,
                    "photocurrent scale must be >= 0");
    detail::require(s.dt > 0.0, ErrorKind::validation, "dt must be > 0");
    detail::require(s.duration >= s.dt, ErrorKind::validation, "duration must be >= dt");
    detail::require(s.initial_v >= 0.0 && s.initial_v <= s.cap.v_max, ErrorKind::validation,
                    "initial voltage must lie in [0, v_max]");
  } catch (const Error& e) {
    throw Error(ErrorKind::invalid_scenario, e.what());
  }
}

struct TraceRecord {
  double t = 0.0;       // s
  double v = 0.0;       // V
  ICMode mode = ICMode::off;
  double p_in = 0.0;    // W
  double p_load = 0.0;  // W
  double p_leak = 0.0;  // W
  long long measurement_count = 0;
};

using Trace = std::vector<TraceRecord>;

namespace detail {

// Measurements are scheduled at j * 3600/rate seconds, j >= 1, and only fire
// while the time of day lies in the active window. Counts events in [a, b).
inline long long count_plain(double period, double lo, double hi) {
  if (!(hi > lo)) return 0;
  const auto first = std::max(1LL, static_cast<long long>(std::ceil(lo / period)));
  const auto past = static_cast<long long>(std::ceil(hi / period));
  return std::max(0LL, past - first);
}

template <typename Fn>
inline void for_each_window_piece(const MeasurementSchedule& s, double a, double b, Fn&& fn) {
  if (!s.active_window) {
    fn(a, b);
    return;
  }
  const double day = constants::seconds_per_day;
  for (double d = std::floor(a / day); d * day < b; d += 1.0) {
    const double lo = std::max(a, d * day + s.active_window->start);
    const double hi = std::min(b, d * day + s.active_window->end);
    if (hi > lo) fn(lo, hi);
  }
}

inline long long count_events(const MeasurementSchedule& s, double a, double b) {
  if (s.rate <= 0.0) return 0;
  const double period = constants::seconds_per_hour / s.rate;
  long long n = 0;
  for_each_window_piece(s, a, b, [&](double lo, double hi) { n += count_plain(period, lo, hi); });
  return n;
}

inline double active_time(const MeasurementSchedule& s, double a, double b) {
  double acc = 0.0;
  for_each_window_piece(s, a, b, [&](double lo, double hi) { acc += hi - lo; });
  return acc;
}

struct StepFlows {
  ICMode mode = ICMode::off;
  long long events = 0;
  double i_in = 0.0;
  double i_load = 0.0;
  double i_leak = 0.0;
};

inline StepFlows evaluate_step(const Scenario& s, double v, double t) {
  StepFlows f;
  const double b = t + s.dt;
  const double light = s.light.average(t, b);
  if (light > 0.0)
    f.i_in = std::max(0.0, s.photocurrent_scale * light * iv_current(s.pv, v));
  f.i_leak = leak_current(s.cap, v);
  if (v < s.ic.v_threshold) return f;  // off: no load

  const double t_active = active_time(s.schedule, t, b);
  f.events = count_events(s.schedule, t, b);
  const double t_meas = std::min(t_active, static_cast<double>(f.events) * s.ic.t_measure);
  const double charge = s.ic.i_sleep * (s.dt - t_active) +
                        s.ic.i_ready * (t_active - t_meas) + s.ic.i_measure * t_meas;
  f.i_load = charge / s.dt;
  f.mode = f.events > 0 ? ICMode::measure : (t_active > 0.0 ? ICMode::ready : ICMode::sleep);
  return f;
}

}  // namespace detail

inline Trace simulate(const Scenario& s) {
  validate(s);
  const auto steps = static_cast<long long>(std::floor(s.duration / s.dt + 1e-9));
  const double c = s.cap.capacitance;

  Trace trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  double v = s.initial_v;
  long long count = 0;
  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * s.dt;
    auto f = detail::evaluate_step(s, v, t);
    const double i_net = f.i_in - f.i_load - f.i_leak;
    const double raw = v + i_net * s.dt / c;
    const double next = step({v, t}, s.cap, i_net, s.dt).v;

    // Attribute clamped charge: surplus at v_max is shunted from the PV
    // input, a deficit at 0 V comes out of the leak first, then the load.
    if (raw > next) {
      f.i_in -= (raw - next) * c / s.dt;
    } else if (raw < next) {
      double deficit = (next - raw) * c / s.dt;
      const double from_leak = std::min(deficit, f.i_leak);
      f.i_leak -= from_leak;
      deficit -= from_leak;
      f.i_load = std::max(0.0, f.i_load - deficit);
    }

    const double v_mid = 0.5 * (v + next);
    trace.push_back({t, v, f.mode, v_mid * f.i_in, v_mid * f.i_load, v_mid * f.i_leak, count});
    if (k < steps) {
      v = next;
      if (f.mode == ICMode::measure) count += f.events;
    }
  }
  return trace;
}

// First time the trace reaches v_target, linearly interpolated.
inline std::optional<double> time_to_voltage(const Trace& trace, double v_target) {
  detail::require(!trace.empty(), ErrorKind::validation, "empty trace");
  if (trace.front().v >= v_target) return trace.front().t;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const auto& a = trace[k - 1];
    const auto& b = trace[k];
    if (b.v >= v_target) return a.t + (v_target - a.v) / (b.v - a.v) * (b.t - a.t);
  }
  return std::nullopt;
}

// Total time with v >= v_threshold, treating v as piecewise linear.
inline double on_time(const Trace& trace, double v_threshold) {
  double total = 0.0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const auto& a = trace[k - 1];
    const auto& b = trace[k];
    const double span = b.t - a.t;
    const bool a_on = a.v >= v_threshold;
    const bool b_on = b.v >= v_threshold;
    if (a_on && b_on) {
      total += span;
    } else if (a_on != b_on) {
      const double cross = (v_threshold - a.v) / (b.v - a.v) * span;
      total += a_on ? cross : span - cross;
    }
  }
  return total;
}

// Light on over [0, light_on), dark afterwards; returns seconds spent on.
inline double on_time_experiment(Scenario s, double light_on, double intensity = 1.0) {
  s.light = constant_light(0.0, light_on, intensity);
  return on_time(simulate(s), s.ic.v_threshold);
}

// Fraction of step intervals in which the IC was powered.
inline double trace_availability(const Trace& trace) {
  if (trace.size() < 2) return trace.empty() || trace.front().mode == ICMode::off ? 0.0 : 1.0;
  std::size_t on = 0;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k)
    if (trace[k].mode != ICMode::off) ++on;
  return static_cast<double>(on) / static_cast<double>(trace.size() - 1);
}

struct AvailabilityReport {
  double energy_balance = 0.0;  // fraction from the daily energy budget
  double trace_fraction = 0.0;  // fraction from a full-day simulation
  double harvest_energy = 0.0;  // J
  double usable_energy = 0.0;   // J, initial charge above threshold
  double leak_energy = 0.0;     // J
  double required_energy = 0.0; // J
  double operating_voltage = 0.0;  // V, used for harvest and leak terms
};

// Daily budget:
//   clamp((E_harvest + E_usable - E_leak) / E_required, 0, 1)
// E_required is the IC demand at its threshold voltage. Harvest and leak are
// evaluated at the middle of the operating window (v_threshold + v_max) / 2.
inline AvailabilityReport energy_balance(const Scenario& s) {
  validate(s);
  detail::require(s.duration == constants::seconds_per_day, ErrorKind::invalid_scenario,
                  "availability needs a 86400 s scenario");
  AvailabilityReport r;
  const double day = constants::seconds_per_day;
  r.operating_voltage = 0.5 * (s.ic.v_threshold + s.cap.v_max);
  const double v_op = r.operating_voltage;

  r.harvest_energy = s.photocurrent_scale * s.light.integral(0.0, day) *
                     std::max(0.0, iv_current(s.pv, v_op)) * v_op;
  r.usable_energy = s.initial_v > s.ic.v_threshold
                        ? usable_energy(s.cap.capacitance, s.initial_v, s.ic.v_threshold)
                        : 0.0;
  r.leak_energy = leak_current(s.cap, v_op) * v_op * day;
  r.required_energy = daily_energy(s.ic, s.schedule, s.ic.v_threshold);

  const double supply = r.harvest_energy + r.usable_energy - r.leak_energy;
  if (r.required_energy <= 0.0)
    r.energy_balance = supply >= 0.0 ? 1.0 : 0.0;
  else
    r.energy_balance = std::clamp(supply / r.required_energy, 0.0, 1.0);
  return r;
}

inline AvailabilityReport availability(const Scenario& s) {
  auto r = energy_balance(s);
  r.trace_fraction = trace_availability(simulate(s));
  return r;
}

inline constexpr const char* kTraceCsvHeader = "t_s,v_V,mode,p_in_W,p_load_W,p_leak_W,meas_count";

inline std::string format_trace_csv(const Trace& trace) {
  std::string out = std::string(kTraceCsvHeader) + "\n";
  out.reserve(trace.size() * 64);
  for (const auto& r : trace) {
    out += format_sig6(r.t);
    out += ',';
    out += format_sig6(r.v);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    out += format_sig6(r.p_in);
    out += ',';
    out += format_sig6(r.p_load);
    out += ',';
    out += format_sig6(r.p_leak);
    out += ',';
    out += std::to_string(r.measurement_count);
    out += '\n';
  }
  return out;
}

}  // namespace pvrfid
