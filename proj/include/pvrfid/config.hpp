#pragma once

// Flat dotted-key configuration:
//
//   # comment
//   cap.capacitance_F = 1
//   sweep.leak_grid_uA = 0, 10, 20, 40
//
// Every key is declared in kSchema with its type, constraint and default, and
// carries its unit in the name. Unknown keys are rejected; a known quantity
// written with a different unit suffix is reported as a unit mismatch.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"
#include "pvrfid/ic_load.hpp"
#include "pvrfid/link_budget.hpp"
#include "pvrfid/pv_model.hpp"
#include "pvrfid/simulator.hpp"
#include "pvrfid/sizing.hpp"
#include "pvrfid/storage.hpp"

namespace pvrfid {

enum class ValueType { number, integer, list, text };
enum class Constraint { any, positive, nonnegative, open_fraction, unit_interval, at_least_one };

struct KeySpec {
  std::string_view key;
  ValueType type;
  Constraint constraint;
  std::string_view default_text;
};

// clang-format off
inline constexpr std::array kSchema = {
    KeySpec{"pv.jsc_mA_cm2",              ValueType::number,  Constraint::positive,      "3.7"},
    KeySpec{"pv.voc_V",                   ValueType::number,  Constraint::positive,      "4.3"},
    KeySpec{"pv.ff",                      ValueType::number,  Constraint::open_fraction, "0.6"},
    KeySpec{"pv.area_cm2",                ValueType::number,  Constraint::positive,      "1.06"},
    KeySpec{"pv.n_series",                ValueType::integer, Constraint::at_least_one,  "4"},
    KeySpec{"pv.efficiency",              ValueType::number,  Constraint::unit_interval, "0.101"},
    KeySpec{"pv.irradiance_mW_cm2",       ValueType::number,  Constraint::nonnegative,   "100"},
    KeySpec{"pv.photocurrent_scale",      ValueType::number,  Constraint::nonnegative,   "1"},
    KeySpec{"pv.bandgap_eV",              ValueType::number,  Constraint::positive,      "1.6"},
    KeySpec{"ic.i_sleep_uA",              ValueType::number,  Constraint::nonnegative,   "1.6"},
    KeySpec{"ic.i_ready_uA",              ValueType::number,  Constraint::nonnegative,   "6"},
    KeySpec{"ic.i_measure_uA",            ValueType::number,  Constraint::nonnegative,   "30"},
    KeySpec{"ic.t_measure_ms",            ValueType::number,  Constraint::positive,      "8"},
    KeySpec{"ic.v_threshold_V",           ValueType::number,  Constraint::positive,      "1.5"},
    KeySpec{"ic.v_max_V",                 ValueType::number,  Constraint::positive,      "3"},
    KeySpec{"ic.sens_passive_dbm",        ValueType::number,  Constraint::any,           "-8.3"},
    KeySpec{"ic.sens_assisted_dbm",       ValueType::number,  Constraint::any,           "-22"},
    KeySpec{"cap.capacitance_F",          ValueType::number,  Constraint::positive,      "1"},
    KeySpec{"cap.v_max_V",                ValueType::number,  Constraint::positive,      "3"},
    KeySpec{"cap.leak_uA",                ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"cap.leak_R_ohm",             ValueType::number,  Constraint::nonnegative,   "12331.5"},
    KeySpec{"link.eirp_dbm",              ValueType::number,  Constraint::any,           "36"},
    KeySpec{"link.reader_gain_dbi",       ValueType::number,  Constraint::any,           "8.5"},
    KeySpec{"link.tag_gain_dbi",          ValueType::number,  Constraint::any,           "2"},
    KeySpec{"link.tau",                   ValueType::number,  Constraint::unit_interval, "0.0440353"},
    KeySpec{"link.polarization_loss_dB",  ValueType::number,  Constraint::nonnegative,   "3"},
    KeySpec{"link.modulation_loss_dB",    ValueType::number,  Constraint::nonnegative,   "5"},
    KeySpec{"link.reader_sensitivity_dbm",ValueType::number,  Constraint::any,           "-84"},
    KeySpec{"link.frequency_Hz",          ValueType::number,  Constraint::positive,      "915000000"},
    KeySpec{"link.reference_distance_m",  ValueType::number,  Constraint::positive,      "1"},
    KeySpec{"sim.duration_s",             ValueType::number,  Constraint::positive,      "14400"},
    KeySpec{"sim.dt_s",                   ValueType::number,  Constraint::positive,      "1"},
    KeySpec{"sim.initial_V",              ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sim.light_on_s",             ValueType::number,  Constraint::nonnegative,   "2700"},
    KeySpec{"sim.intensity_suns",         ValueType::number,  Constraint::nonnegative,   "1"},
    KeySpec{"sim.rate_per_hour",          ValueType::number,  Constraint::nonnegative,   "20000"},
    KeySpec{"sim.window_start_s",         ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sim.window_end_s",           ValueType::number,  Constraint::nonnegative,   "86400"},
    KeySpec{"avail.initial_V",            ValueType::number,  Constraint::nonnegative,   "3"},
    KeySpec{"avail.light_on_s",           ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"avail.intensity_suns",       ValueType::number,  Constraint::nonnegative,   "1"},
    KeySpec{"sweep.cap_grid_F",           ValueType::list,    Constraint::positive,      "1e-06,0.001,1,100"},
    KeySpec{"sweep.leak_grid_uA",         ValueType::list,    Constraint::nonnegative,   "0,10,20,40"},
    KeySpec{"sizing.target",              ValueType::number,  Constraint::unit_interval, "1"},
    KeySpec{"sizing.area_grid_cm2",       ValueType::list,    Constraint::positive,      "0.02,0.1,0.5,1.06"},
    KeySpec{"sizing.cap_grid_F",          ValueType::list,    Constraint::positive,      "0.001,0.01,0.1,1"},
    KeySpec{"sizing.leak_uA",             ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sizing.light_start_s",       ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sizing.light_on_s",          ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sizing.intensity_suns",      ValueType::number,  Constraint::nonnegative,   "1"},
    KeySpec{"sizing.initial_V",           ValueType::number,  Constraint::nonnegative,   "3"},
    KeySpec{"sizing.dt_s",                ValueType::number,  Constraint::positive,      "1"},
    KeySpec{"sizing.method",              ValueType::text,    Constraint::any,           "trace"},
    KeySpec{"sizing.cost_per_cm2",        ValueType::number,  Constraint::nonnegative,   "0"},
    KeySpec{"sizing.cost_per_F",          ValueType::number,  Constraint::nonnegative,   "0"},
};
// clang-format on

// Recognized unit tails, including ones no key uses, so that a misspelled
// unit is reported as such rather than as an unknown key.
inline constexpr std::array<std::string_view, 36> kUnitSuffixes = {
    "V",   "mV",  "A",   "mA",  "uA",  "nA",  "W",   "mW",  "uW",   "F",   "mF",
    "uF",  "nF",  "s",   "ms",  "min", "h",   "ohm", "kohm", "dbm", "dBm", "dbi",
    "dBi", "dB",  "Hz",  "kHz", "MHz", "GHz", "m",   "cm",  "mm",  "cm2", "m2",
    "nm",  "eV",  "suns"};

using ConfigValue = std::variant<double, long long, std::vector<double>, std::string>;

namespace detail {

inline const KeySpec* find_spec(std::string_view key) {
  for (const auto& s : kSchema)
    if (s.key == key) return &s;
  return nullptr;
}

// Splits "cap.capacitance_F" into ("cap.capacitance", "F"); keys whose tail
// is not a known unit have no suffix.
inline std::pair<std::string_view, std::string_view> split_unit(std::string_view key) {
  for (const auto& u : kUnitSuffixes) {
    if (key.size() > u.size() + 1 && key.substr(key.size() - u.size()) == u &&
        key[key.size() - u.size() - 1] == '_') {
      auto stem = key.substr(0, key.size() - u.size() - 1);
      return {stem, key.substr(key.size() - u.size())};
    }
  }
  return {key, {}};
}

inline std::string_view quantity_stem(std::string_view key) {
  auto [stem, unit] = split_unit(key);
  while (!unit.empty()) {
    auto [inner, inner_unit] = split_unit(stem);
    if (inner_unit.empty()) break;
    stem = inner;
    unit = inner_unit;
  }
  return stem;
}

inline bool satisfies(Constraint c, double v) {
  switch (c) {
    case Constraint::any: return std::isfinite(v);
    case Constraint::positive: return v > 0.0 && std::isfinite(v);
    case Constraint::nonnegative: return v >= 0.0 && std::isfinite(v);
    case Constraint::open_fraction: return v > 0.0 && v < 1.0;
    case Constraint::unit_interval: return v >= 0.0 && v <= 1.0;
    case Constraint::at_least_one: return v >= 1.0;
  }
  return false;
}

inline const char* describe(Constraint c) {
  switch (c) {
    case Constraint::any: return "finite";
    case Constraint::positive: return "> 0";
    case Constraint::nonnegative: return ">= 0";
    case Constraint::open_fraction: return "in (0, 1)";
    case Constraint::unit_interval: return "in [0, 1]";
    case Constraint::at_least_one: return ">= 1";
  }
  return "";
}

// Parses a raw value for `spec`; returns an error message or empty string.
inline std::string parse_value(const KeySpec& spec, std::string_view raw, ConfigValue& out) {
  raw = trim(raw);
  auto bad_range = [&](double v) {
    return "value " + format_roundtrip(v) + " for " + std::string(spec.key) + " must be " +
           describe(spec.constraint);
  };
  switch (spec.type) {
    case ValueType::number: {
      double v = 0.0;
      if (!parse_double(raw, v)) return "malformed number '" + std::string(raw) + "'";
      if (!satisfies(spec.constraint, v)) return bad_range(v);
      out = v;
      return {};
    }
    case ValueType::integer: {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty())
        return "malformed integer '" + std::string(raw) + "'";
      if (!satisfies(spec.constraint, static_cast<double>(v)))
        return bad_range(static_cast<double>(v));
      out = v;
      return {};
    }
    case ValueType::list: {
      std::vector<double> values;
      while (!raw.empty()) {
        const auto comma = raw.find(',');
        double v = 0.0;
        if (!parse_double(raw.substr(0, comma), v))
          return "malformed list entry '" + std::string(trim(raw.substr(0, comma))) + "'";
        if (!satisfies(spec.constraint, v)) return bad_range(v);
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        raw.remove_prefix(comma + 1);
        if (trim(raw).empty()) return "trailing comma";
      }
      out = std::move(values);
      return {};
    }
    case ValueType::text:
      out = std::string(raw);
      return {};
  }
  return "unsupported type";
}

}  // namespace detail

class Config {
 public:
  static Config defaults() {
    Config c;
    for (const auto& spec : kSchema) {
      ConfigValue v;
      const auto err = detail::parse_value(spec, spec.default_text, v);
      if (!err.empty()) throw Error(ErrorKind::validation, "bad default: " + err);
      c.values_.emplace(std::string(spec.key), std::move(v));
    }
    return c;
  }

  double number(std::string_view key) const { return std::get<double>(at(key)); }
  long long integer(std::string_view key) const { return std::get<long long>(at(key)); }
  const std::vector<double>& list(std::string_view key) const {
    return std::get<std::vector<double>>(at(key));
  }
  const std::string& text(std::string_view key) const { return std::get<std::string>(at(key)); }

  // Sets `key` from its textual form, applying schema checks.
  void set(std::string_view key, std::string_view raw) {
    const auto* spec = detail::find_spec(key);
    if (!spec) throw Error(ErrorKind::unknown_key, std::string(key));
    ConfigValue v;
    const auto err = detail::parse_value(*spec, raw, v);
    if (!err.empty()) throw Error(ErrorKind::validation, err);
    values_[std::string(key)] = std::move(v);
  }

  // One `key = value` line per key in schema order; parses back identically.
  std::string dump() const {
    std::string out;
    for (const auto& spec : kSchema) {
      out += spec.key;
      out += " = ";
      const auto& v = at(spec.key);
      if (const auto* d = std::get_if<double>(&v)) {
        out += format_roundtrip(*d);
      } else if (const auto* i = std::get_if<long long>(&v)) {
        out += std::to_string(*i);
      } else if (const auto* l = std::get_if<std::vector<double>>(&v)) {
        for (std::size_t k = 0; k < l->size(); ++k) {
          if (k) out += ',';
          out += format_roundtrip((*l)[k]);
        }
      } else {
        out += std::get<std::string>(v);
      }
      out += '\n';
    }
    return out;
  }

  bool operator==(const Config&) const = default;

 private:
  const ConfigValue& at(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) throw Error(ErrorKind::unknown_key, std::string(key));
    return it->second;
  }

  std::map<std::string, ConfigValue> values_;
};

inline Config parse_config_text(std::string_view text, std::string_view source = "<memory>") {
  Config cfg = Config::defaults();
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  auto fail = [&](ErrorKind kind, const std::string& msg) {
    throw Error(kind, std::string(source) + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::parse_error, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto raw = line.substr(eq + 1);
    if (key.empty()) fail(ErrorKind::parse_error, "missing key");

    const auto* spec = detail::find_spec(key);
    if (!spec) {
      const auto stem = detail::quantity_stem(key);
      for (const auto& s : kSchema) {
        if (detail::quantity_stem(s.key) == stem)
          fail(ErrorKind::unit_mismatch,
               "'" + std::string(key) + "' uses the wrong unit; expected '" + std::string(s.key) + "'");
      }
      fail(ErrorKind::unknown_key, "unknown key '" + std::string(key) + "'");
    }
    if (auto [it, fresh] = seen.emplace(std::string(key), line_no); !fresh)
      fail(ErrorKind::parse_error,
           "duplicate key '" + std::string(key) + "' (first on line " + std::to_string(it->second) + ")");
    ConfigValue v;
    const auto err = detail::parse_value(*spec, raw, v);
    if (!err.empty()) fail(ErrorKind::validation, err);
    cfg.set(key, trim(raw));
  }
  return cfg;
}

inline Config parse_config(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Domain objects from a config. Cross-field invariants are checked by the
// module validators.

inline DiodeModel pv_from(const Config& c) {
  return fit_single_diode(c.number("pv.jsc_mA_cm2"), c.number("pv.voc_V"), c.number("pv.ff"),
                          c.number("pv.area_cm2"), static_cast<int>(c.integer("pv.n_series")));
}

inline ICProfile ic_from(const Config& c) {
  ICProfile p{.i_sleep = c.number("ic.i_sleep_uA") * 1e-6,
              .i_ready = c.number("ic.i_ready_uA") * 1e-6,
              .i_measure = c.number("ic.i_measure_uA") * 1e-6,
              .t_measure = c.number("ic.t_measure_ms") * 1e-3,
              .v_threshold = c.number("ic.v_threshold_V"),
              .v_max = c.number("ic.v_max_V"),
              .sens_passive = c.number("ic.sens_passive_dbm"),
              .sens_assisted = c.number("ic.sens_assisted_dbm")};
  validate(p);
  return p;
}

inline CapacitorModel cap_from(const Config& c) {
  const double leak_ua = c.number("cap.leak_uA");
  const double leak_r = c.number("cap.leak_R_ohm");
  detail::require(leak_ua == 0.0 || leak_r == 0.0, ErrorKind::validation,
                  "set at most one of cap.leak_uA and cap.leak_R_ohm");
  CapacitorModel m{c.number("cap.capacitance_F"), c.number("cap.v_max_V"), {}};
  if (leak_ua > 0.0) m.leak = ConstantLeak{leak_ua * 1e-6};
  if (leak_r > 0.0) m.leak = ResistiveLeak{leak_r};
  validate(m);
  return m;
}

inline LinkConfig link_from(const Config& c) {
  LinkConfig l{.eirp = c.number("link.eirp_dbm"),
               .reader_antenna_gain = c.number("link.reader_gain_dbi"),
               .tag_gain = c.number("link.tag_gain_dbi"),
               .tau = c.number("link.tau"),
               .polarization_loss = c.number("link.polarization_loss_dB"),
               .modulation_loss = c.number("link.modulation_loss_dB"),
               .reader_sensitivity = c.number("link.reader_sensitivity_dbm"),
               .frequency = c.number("link.frequency_Hz")};
  validate(l);
  return l;
}

inline MeasurementSchedule schedule_from(const Config& c) {
  MeasurementSchedule s{c.number("sim.rate_per_hour"), std::nullopt};
  const TimeWindow w{c.number("sim.window_start_s"), c.number("sim.window_end_s")};
  if (w.start > 0.0 || w.end < constants::seconds_per_day) s.active_window = w;
  return s;
}

// Charge/discharge run: light for sim.light_on_s, then dark.
inline Scenario simulation_from(const Config& c) {
  Scenario s;
  s.pv = pv_from(c);
  s.photocurrent_scale = c.number("pv.photocurrent_scale");
  s.cap = cap_from(c);
  s.ic = ic_from(c);
  s.schedule = schedule_from(c);
  s.light = constant_light(0.0, c.number("sim.light_on_s"), c.number("sim.intensity_suns"));
  s.duration = c.number("sim.duration_s");
  s.dt = c.number("sim.dt_s");
  s.initial_v = c.number("sim.initial_V");
  validate(s);
  return s;
}

// One-day scenario for availability and persistence sweeps.
inline Scenario availability_from(const Config& c) {
  Scenario s = simulation_from(c);
  s.duration = constants::seconds_per_day;
  s.initial_v = c.number("avail.initial_V");
  s.light = constant_light(0.0, c.number("avail.light_on_s"), c.number("avail.intensity_suns"));
  validate(s);
  return s;
}

inline SizingRequest sizing_from(const Config& c) {
  SizingRequest r;
  r.target_availability = c.number("sizing.target");
  const double start = c.number("sizing.light_start_s");
  r.light = constant_light(start, start + c.number("sizing.light_on_s"),
                           c.number("sizing.intensity_suns"));
  r.schedule = schedule_from(c);
  r.ic = ic_from(c);
  r.area_grid = c.list("sizing.area_grid_cm2");
  r.cap_grid = c.list("sizing.cap_grid_F");
  r.leak = constant_leak(c.number("sizing.leak_uA") * 1e-6);
  r.base_cell = pv_from(c);
  r.photocurrent_scale = c.number("pv.photocurrent_scale");
  r.v_max = c.number("cap.v_max_V");
  r.initial_v = c.number("sizing.initial_V");
  r.dt = c.number("sizing.dt_s");
  const auto& method = c.text("sizing.method");
  if (method == "trace") r.method = AvailabilityMethod::trace;
  else if (method == "energy") r.method = AvailabilityMethod::energy_balance;
  else throw Error(ErrorKind::validation, "sizing.method must be 'trace' or 'energy'");
  r.cost_per_cm2 = c.number("sizing.cost_per_cm2");
  r.cost_per_farad = c.number("sizing.cost_per_F");
  validate(r);
  return r;
}

}  // namespace pvrfid
