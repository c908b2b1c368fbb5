#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "pvrfid/constants.hpp"
#include "pvrfid/error.hpp"

namespace pvrfid {

// Sensor-tag IC load: per-mode supply currents, the duration of one sensor
// measurement, the supply window, and the RF wake-up sensitivities.
struct ICProfile {
  double i_sleep = 1.6e-6;     // A
  double i_ready = 6e-6;       // A
  double i_measure = 30e-6;    // A
  double t_measure = 8e-3;     // s
  double v_threshold = 1.5;    // V, boot / EEPROM minimum
  double v_max = 3.0;          // V
  double sens_passive = -8.3;  // dBm, RF-powered wake-up
  double sens_assisted = -22;  // dBm, externally powered
};

enum class ICMode { off, sleep, ready, measure };

inline const char* to_string(ICMode mode) {
  switch (mode) {
    case ICMode::off: return "off";
    case ICMode::sleep: return "sleep";
    case ICMode::ready: return "ready";
    case ICMode::measure: return "measure";
  }
  return "?";
}

inline void validate(const ICProfile& p) {
  using detail::require;
  require(p.i_sleep >= 0.0, ErrorKind::validation, "sleep current must be >= 0");
  require(p.i_sleep <= p.i_ready && p.i_ready <= p.i_measure, ErrorKind::validation,
          "IC currents must satisfy sleep <= ready <= measure");
  require(p.t_measure > 0.0, ErrorKind::validation, "measurement duration must be > 0");
  require(p.v_threshold > 0.0 && p.v_threshold < p.v_max, ErrorKind::validation,
          "IC voltages must satisfy 0 < threshold < max");
  require(p.sens_assisted <= p.sens_passive, ErrorKind::validation,
          "assisted sensitivity must not be worse than passive");
}

// Time-of-day interval, seconds from midnight.
struct TimeWindow {
  double start = 0.0;
  double end = constants::seconds_per_day;

  double duration() const { return std::max(0.0, end - start); }
};

struct MeasurementSchedule {
  double rate = 0.0;  // measurements per hour
  std::optional<TimeWindow> active_window;  // none: active all day
};

inline double mode_current(const ICProfile& p, ICMode mode) {
  switch (mode) {
    case ICMode::off: return 0.0;
    case ICMode::sleep: return p.i_sleep;
    case ICMode::ready: return p.i_ready;
    case ICMode::measure: return p.i_measure;
  }
  return 0.0;
}

// Highest rate at which back-to-back measurements do not overlap.
inline double max_rate(const ICProfile& p) { return constants::seconds_per_hour / p.t_measure; }

inline void validate(const MeasurementSchedule& s, const ICProfile& p) {
  detail::require(s.rate >= 0.0, ErrorKind::validation, "measurement rate must be >= 0");
  if (s.rate > max_rate(p) * (1.0 + 1e-12))
    throw Error(ErrorKind::rate_too_high, "measurements of " + std::to_string(p.t_measure) +
                                              " s would overlap");
  if (s.active_window) {
    const auto& w = *s.active_window;
    detail::require(w.start >= 0.0 && w.start <= w.end && w.end <= constants::seconds_per_day,
                    ErrorKind::validation, "active window must lie within one day");
  }
}

// Fraction of time spent measuring at `rate` per hour.
inline double duty_fraction(const ICProfile& p, double rate) {
  validate(MeasurementSchedule{rate, std::nullopt}, p);
  if (rate >= max_rate(p)) return 1.0;
  return std::min(1.0, rate * p.t_measure / constants::seconds_per_hour);
}

// Measure current replaces ready current while a measurement runs.
inline double average_current(const ICProfile& p, double rate) {
  const double f = duty_fraction(p, rate);
  return (1.0 - f) * p.i_ready + f * p.i_measure;
}

inline double average_power(const ICProfile& p, double rate, double v) {
  if (v < p.v_threshold)
    throw Error(ErrorKind::under_voltage, "supply below IC threshold voltage");
  return v * average_current(p, rate);
}

// Energy over one day: scheduled activity inside the active window, sleep
// current for the rest of the day.
inline double daily_energy(const ICProfile& p, const MeasurementSchedule& s, double v) {
  validate(s, p);
  const double active =
      s.active_window ? s.active_window->duration() : constants::seconds_per_day;
  const double idle = constants::seconds_per_day - active;
  return v * (average_current(p, s.rate) * active + p.i_sleep * idle);
}

}  // namespace pvrfid
