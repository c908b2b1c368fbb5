#pragma once

namespace pvrfid::constants {

// CODATA 2018 exact values.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double boltzmann = 1.380649e-23;             // J/K
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double speed_of_light = 299792458.0;         // m/s

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double reference_temperature = 298.15;  // K
inline constexpr double seconds_per_day = 86400.0;
inline constexpr double seconds_per_hour = 3600.0;

inline constexpr double thermal_voltage(double temperature_k) {
  return boltzmann * temperature_k / elementary_charge;
}

}  // namespace pvrfid::constants
