#pragma once

// Free-space UHF RFID link budget. All levels in dB units; distances in m.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pvrfid/constants.hpp"
#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"

namespace pvrfid {

inline constexpr double kUsBandLowHz = 902e6;
inline constexpr double kUsBandHighHz = 928e6;

struct LinkConfig {
  double eirp = 36.0;                   // dBm
  double reader_antenna_gain = 8.5;     // dBi
  double tag_gain = 2.0;                // dBi
  double tau = 1.0;                     // power transmission coefficient
  double polarization_loss = 3.0;       // dB
  double modulation_loss = 5.0;         // dB
  double reader_sensitivity = -84.0;    // dBm
  double frequency = 915e6;             // Hz
};

inline void validate(const LinkConfig& cfg) {
  using detail::require;
  require(cfg.tau >= 0.0 && cfg.tau <= 1.0, ErrorKind::validation, "tau must lie in [0, 1]");
  require(cfg.frequency > 0.0, ErrorKind::validation, "frequency must be > 0");
  require(cfg.polarization_loss >= 0.0 && cfg.modulation_loss >= 0.0, ErrorKind::validation,
          "losses must be >= 0");
}

inline bool in_us_band(double frequency) {
  return frequency >= kUsBandLowHz && frequency <= kUsBandHighHz;
}

inline double wavelength(double frequency) { return constants::speed_of_light / frequency; }

inline double free_space_path_loss(double frequency, double d) {
  if (!(d > 0.0)) throw Error(ErrorKind::nonpositive_distance, "distance must be > 0");
  return 20.0 * std::log10(4.0 * constants::pi * d / wavelength(frequency));
}

inline double friis_received_power(double eirp, double g_rx, double frequency, double d) {
  return eirp + g_rx - free_space_path_loss(frequency, d);
}

// Distance at which the free-space loss equals `budget_db`, for a one-way
// (exponent 20) or two-way (exponent 40) path.
inline double range_for_budget(double frequency, double budget_db, double exponent) {
  return wavelength(frequency) / (4.0 * constants::pi) * std::pow(10.0, budget_db / exponent);
}

// Reader-to-tag activation limit.
inline double forward_limited_range(const LinkConfig& cfg, double sensitivity) {
  validate(cfg);
  if (cfg.tau == 0.0) throw Error(ErrorKind::zero_tau, "tag absorbs no power (tau = 0)");
  const double budget = cfg.eirp + cfg.tag_gain + 10.0 * std::log10(cfg.tau) -
                        cfg.polarization_loss - sensitivity;
  return range_for_budget(cfg.frequency, budget, 20.0);
}

// Backscatter (tag-to-reader) limit:
// eirp + 2 G_tag + G_reader - L_mod - 2 FSPL(d) >= reader sensitivity.
inline double reverse_limited_range(const LinkConfig& cfg) {
  validate(cfg);
  const double budget = cfg.eirp + 2.0 * cfg.tag_gain + cfg.reader_antenna_gain -
                        cfg.modulation_loss - cfg.reader_sensitivity;
  return range_for_budget(cfg.frequency, budget, 40.0);
}

inline double read_range(const LinkConfig& cfg, double ic_sensitivity) {
  return std::min(forward_limited_range(cfg, ic_sensitivity), reverse_limited_range(cfg));
}

// Forward-limited range gain from improving the wake-up sensitivity.
inline double range_ratio(double sens_passive, double sens_assisted) {
  detail::require(sens_assisted <= sens_passive, ErrorKind::validation,
                  "assisted sensitivity must not exceed passive");
  return std::pow(10.0, (sens_passive - sens_assisted) / 20.0);
}

// Returns cfg with tau chosen so the forward range at `sensitivity` equals
// `target_range`. Throws when that would need tau > 1.
inline LinkConfig calibrate_tau(LinkConfig cfg, double sensitivity, double target_range) {
  detail::require(target_range > 0.0, ErrorKind::validation, "target range must be > 0");
  const double fspl = free_space_path_loss(cfg.frequency, target_range);
  const double tau_db =
      fspl + sensitivity - cfg.eirp - cfg.tag_gain + cfg.polarization_loss;
  cfg.tau = std::pow(10.0, tau_db / 10.0);
  detail::require(cfg.tau <= 1.0, ErrorKind::validation,
                  "target range unreachable with tau <= 1");
  return cfg;
}

// ---------------------------------------------------------------------------
// Threshold-power sweeps

struct ThresholdPoint {
  double frequency = 0.0;  // Hz
  double threshold = 0.0;  // dBm, minimum transmit power that wakes the tag
};

struct ThresholdSweep {
  std::vector<ThresholdPoint> points;
  double reference_distance = 1.0;  // m
};

struct RangePoint {
  double frequency = 0.0;  // Hz
  double range = 0.0;      // m
};

inline void validate(const ThresholdSweep& s) {
  detail::require(s.reference_distance > 0.0, ErrorKind::validation,
                  "reference distance must be > 0");
  for (std::size_t k = 1; k < s.points.size(); ++k)
    detail::require(s.points[k].frequency > s.points[k - 1].frequency, ErrorKind::validation,
                    "sweep frequencies must be strictly increasing");
}

// Each point is independent: d = d_ref * 10^((P_max - P_threshold)/20).
inline std::vector<RangePoint> sweep_to_range(const ThresholdSweep& sweep, double eirp_max) {
  validate(sweep);
  std::vector<RangePoint> out;
  out.reserve(sweep.points.size());
  for (const auto& p : sweep.points)
    out.push_back({p.frequency,
                   sweep.reference_distance * std::pow(10.0, (eirp_max - p.threshold) / 20.0)});
  return out;
}

inline constexpr const char* kSweepCsvHeader = "frequency_hz,threshold_dbm";
inline constexpr const char* kRangeCsvHeader = "frequency_hz,range_m";

inline ThresholdSweep parse_threshold_sweep(std::string_view text, double reference_distance,
                                            std::string_view source = "<memory>") {
  ThresholdSweep s{{}, reference_distance};
  for (auto [f, p] : parse_two_column_csv(text, kSweepCsvHeader, source)) s.points.push_back({f, p});
  validate(s);
  return s;
}

inline ThresholdSweep load_threshold_sweep(const std::filesystem::path& path,
                                           double reference_distance) {
  return parse_threshold_sweep(read_text_file(path), reference_distance, path.string());
}

inline std::string format_range_csv(const std::vector<RangePoint>& ranges) {
  std::string out = std::string(kRangeCsvHeader) + "\n";
  for (const auto& r : ranges) out += format_sig6(r.frequency) + "," + format_sig6(r.range) + "\n";
  return out;
}

}  // namespace pvrfid
