#pragma once

// Photovoltaic source: resistance-free single-diode IV curve parameterized by
// its short-circuit current, open-circuit voltage and ideality, plus spectral
// (EQE-weighted) photocurrent and a flat-efficiency harvest estimate.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pvrfid/constants.hpp"
#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"

namespace pvrfid {

struct DiodeModel {
  double isc = 0.0;         // A
  double voc = 0.0;         // V, whole string
  double n_ideality = 1.0;  // per cell
  double temperature = constants::reference_temperature;  // K
  int n_series = 1;
  double area = 1.0;  // cm^2, total active area

  // Modified ideality factor n_series * n * kT/q (V).
  double modified_ideality() const {
    return n_series * n_ideality * constants::thermal_voltage(temperature);
  }
};

inline void validate(const DiodeModel& m) {
  using detail::require;
  require(m.isc >= 0.0, ErrorKind::validation, "diode isc must be >= 0");
  require(m.voc >= 0.0, ErrorKind::validation, "diode voc must be >= 0");
  require(m.voc > 0.0 || m.isc == 0.0, ErrorKind::validation,
          "diode with photocurrent needs voc > 0");
  require(m.n_ideality > 0.0, ErrorKind::validation, "ideality must be > 0");
  require(m.temperature > 0.0, ErrorKind::validation, "temperature must be > 0");
  require(m.n_series >= 1, ErrorKind::validation, "n_series must be >= 1");
  require(m.area > 0.0, ErrorKind::validation, "area must be > 0");
}

// I(V) = Isc - I0 (exp(V/a) - 1) with I0 pinned by I(Voc) = 0, written as
// Isc (1 - expm1(V/a)/expm1(Voc/a)). Both endpoints come out exact.
inline double iv_current(const DiodeModel& m, double v) {
  if (m.isc == 0.0) return 0.0;
  const double a = m.modified_ideality();
  const double x = v / a;
  const double xo = m.voc / a;
  double ratio;
  if (xo < 1.0) {
    ratio = std::expm1(x) / std::expm1(xo);
  } else {
    // Same ratio, rearranged so exp() never sees more than x - xo.
    ratio = std::exp(x - xo) * (-std::expm1(-x)) / (-std::expm1(-xo));
  }
  return m.isc * (1.0 - ratio);
}

// dI/dV, used by the maximum-power search.
inline double iv_slope(const DiodeModel& m, double v) {
  if (m.isc == 0.0) return 0.0;
  const double a = m.modified_ideality();
  const double xo = m.voc / a;
  if (xo < 1.0) return -m.isc / a * std::exp(v / a) / std::expm1(xo);
  return -m.isc / a * std::exp(v / a - xo) / (-std::expm1(-xo));
}

struct OperatingPoint {
  double v = 0.0;  // V
  double i = 0.0;  // A
  double p = 0.0;  // W
};

// P(V) = V I(V) is strictly concave on [0, Voc], so dP/dV is bisected.
inline OperatingPoint mpp(const DiodeModel& m) {
  validate(m);
  if (m.isc == 0.0 || m.voc == 0.0) return {};
  double lo = 0.0;
  double hi = m.voc;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * m.voc; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double dp = iv_current(m, mid) + mid * iv_slope(m, mid);
    (dp > 0.0 ? lo : hi) = mid;
  }
  const double v = 0.5 * (lo + hi);
  const double i = iv_current(m, v);
  return {v, i, v * i};
}

inline double fill_factor(const DiodeModel& m) {
  if (m.isc == 0.0 || m.voc == 0.0) return 0.0;
  return mpp(m).p / (m.voc * m.isc);
}

inline DiodeModel series_module(const DiodeModel& cell, int n) {
  validate(cell);
  detail::require(n >= 1, ErrorKind::validation, "series count must be >= 1");
  DiodeModel module = cell;
  module.voc = cell.voc * n;
  module.n_series = cell.n_series * n;
  module.area = cell.area * n;
  return module;
}

inline constexpr double kIdealityLow = 0.5;
inline constexpr double kIdealityHigh = 10.0;

// Fits the ideality factor so the curve's fill factor matches `ff`.
// jsc_density in mA/cm^2, area in cm^2; isc = jsc_density * area.
inline DiodeModel fit_single_diode(double jsc_density, double voc, double ff, double area,
                                   int n_series) {
  using detail::require;
  require(ff > 0.0 && ff < 1.0, ErrorKind::validation, "fill factor must lie in (0, 1)");
  require(voc > 0.0, ErrorKind::validation, "voc must be > 0");
  require(jsc_density > 0.0, ErrorKind::validation, "jsc must be > 0");
  require(area > 0.0, ErrorKind::validation, "area must be > 0");
  require(n_series >= 1, ErrorKind::validation, "n_series must be >= 1");

  DiodeModel m{.isc = jsc_density * area * 1e-3,
               .voc = voc,
               .n_ideality = 1.0,
               .temperature = constants::reference_temperature,
               .n_series = n_series,
               .area = area};
  auto ff_at = [&](double n) {
    DiodeModel trial = m;
    trial.n_ideality = n;
    return fill_factor(trial);
  };
  // FF falls monotonically as ideality grows.
  const double ff_hi = ff_at(kIdealityLow);
  const double ff_lo = ff_at(kIdealityHigh);
  if (ff > ff_hi || ff < ff_lo) {
    throw Error(ErrorKind::infeasible_fill_factor,
                "FF " + format_sig6(ff) + " outside [" + format_sig6(ff_lo) + ", " +
                    format_sig6(ff_hi) + "] reachable at Voc " + format_sig6(voc) + " V");
  }
  double lo = kIdealityLow;
  double hi = kIdealityHigh;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ff_at(mid) > ff ? lo : hi) = mid;
  }
  m.n_ideality = 0.5 * (lo + hi);
  return m;
}

// Power-conversion efficiency implied by Jsc (mA/cm^2), Voc and FF under a
// 100 mW/cm^2 reference illumination.
inline double efficiency_from_summary(double jsc_density, double voc, double ff) {
  return jsc_density * voc * ff / 100.0;
}

// ---------------------------------------------------------------------------
// Spectral photocurrent

struct SpectralSample {
  double wavelength_nm = 0.0;
  double value = 0.0;
};

struct SpectralResponse {
  std::vector<SpectralSample> samples;  // value: EQE fraction
  double bandgap_cutoff_nm = 0.0;
};

struct Spectrum {
  std::vector<SpectralSample> samples;  // value: W m^-2 nm^-1
  std::string label;
};

// Absorption edge for a bandgap in eV: lambda = hc / Eg.
inline double bandgap_wavelength_nm(double bandgap_ev) {
  return constants::planck * constants::speed_of_light /
         (bandgap_ev * constants::elementary_charge) * 1e9;
}

namespace detail {
inline void require_increasing(const std::vector<SpectralSample>& s, const char* what) {
  require(!s.empty(), ErrorKind::validation, std::string(what) + " has no samples");
  for (std::size_t k = 1; k < s.size(); ++k)
    require(s[k].wavelength_nm > s[k - 1].wavelength_nm, ErrorKind::validation,
            std::string(what) + " wavelengths must be strictly increasing");
}

inline double interpolate(const std::vector<SpectralSample>& s, double wl) {
  auto it = std::lower_bound(s.begin(), s.end(), wl, [](const SpectralSample& a, double w) {
    return a.wavelength_nm < w;
  });
  if (it == s.end()) return s.back().value;
  if (it->wavelength_nm == wl || it == s.begin()) return it->value;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double f = (wl - a.wavelength_nm) / (b.wavelength_nm - a.wavelength_nm);
  return a.value + f * (b.value - a.value);
}
}  // namespace detail

inline void validate(const SpectralResponse& r) {
  detail::require_increasing(r.samples, "EQE");
  for (const auto& s : r.samples) {
    detail::require(s.value >= 0.0 && s.value <= 1.0, ErrorKind::validation,
                    "EQE values must lie in [0, 1]");
    detail::require(s.wavelength_nm <= r.bandgap_cutoff_nm || s.value == 0.0,
                    ErrorKind::validation, "EQE must vanish beyond the bandgap cutoff");
  }
}

inline void validate(const Spectrum& s) {
  detail::require_increasing(s.samples, "spectrum");
  for (const auto& p : s.samples)
    detail::require(p.value >= 0.0, ErrorKind::validation, "irradiance must be >= 0");
}

// Jsc = q * integral EQE(l) * E(l) * l / (h c) dl, trapezoidal on the union of
// both sample grids restricted to the common support. Returns mA/cm^2.
inline double jsc_from_eqe(const SpectralResponse& eqe, const Spectrum& spectrum) {
  validate(eqe);
  validate(spectrum);
  const double lo = std::max(eqe.samples.front().wavelength_nm,
                             spectrum.samples.front().wavelength_nm);
  const double hi = std::min(eqe.samples.back().wavelength_nm,
                             spectrum.samples.back().wavelength_nm);
  if (!(hi > lo)) throw Error(ErrorKind::empty_overlap, "EQE and spectrum supports are disjoint");

  std::vector<double> grid{lo, hi};
  for (const auto* set : {&eqe.samples, &spectrum.samples})
    for (const auto& s : *set)
      if (s.wavelength_nm > lo && s.wavelength_nm < hi) grid.push_back(s.wavelength_nm);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto integrand = [&](double wl) {
    return detail::interpolate(eqe.samples, wl) * detail::interpolate(spectrum.samples, wl) * wl;
  };
  double sum = 0.0;  // W m^-2 nm * nm
  double prev = integrand(grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double cur = integrand(grid[k]);
    sum += 0.5 * (grid[k] - grid[k - 1]) * (prev + cur);
    prev = cur;
  }
  const double photons = sum * 1e-9 / (constants::planck * constants::speed_of_light);
  return constants::elementary_charge * photons / 10.0;  // A/m^2 -> mA/cm^2
}

inline constexpr const char* kSpectralCsvHeader = "wavelength_nm,value";

inline std::vector<SpectralSample> load_spectral_csv(const std::filesystem::path& path) {
  std::vector<SpectralSample> out;
  for (auto [wl, v] : read_two_column_csv(path, kSpectralCsvHeader)) out.push_back({wl, v});
  return out;
}

inline Spectrum load_spectrum(const std::filesystem::path& path) {
  Spectrum s{load_spectral_csv(path), path.stem().string()};
  validate(s);
  return s;
}

inline SpectralResponse load_spectral_response(const std::filesystem::path& path,
                                               double bandgap_cutoff_nm) {
  SpectralResponse r{load_spectral_csv(path), bandgap_cutoff_nm};
  validate(r);
  return r;
}

// Flat-efficiency harvest: P = eta * area * irradiance.
// area in cm^2, irradiance in mW/cm^2, result in W.
inline double harvest_power(double efficiency, double area, double irradiance) {
  detail::require(efficiency >= 0.0 && area >= 0.0 && irradiance >= 0.0, ErrorKind::validation,
                  "harvest inputs must be nonnegative");
  return efficiency * area * irradiance * 1e-3;
}

}  // namespace pvrfid
