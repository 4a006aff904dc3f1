#pragma once

#include <algorithm>
#include <cmath>

#include "bems/types.hpp"

namespace bems::solar {

constexpr Real kPi = 3.14159265358979323846;

inline Real deg2rad(Real d) { return d * kPi / 180.0; }

// Solar declination (rad) for a day of the year.
inline Real declination(int day_of_year) {
  return deg2rad(23.45) * std::sin(2.0 * kPi * (284 + day_of_year) / 365.0);
}

// Cosine of the solar zenith angle at a minute of the day (solar time).
inline Real cos_zenith(Real latitude_rad, Real decl, int minute_of_day) {
  const Real hour_angle = deg2rad(15.0) * (minute_of_day / 60.0 - 12.0);
  return std::sin(latitude_rad) * std::sin(decl) +
         std::cos(latitude_rad) * std::cos(decl) * std::cos(hour_angle);
}

// Cosine of the beam incidence angle on a south-facing surface tilted by
// `tilt_rad` from horizontal.
inline Real cos_incidence_south(Real latitude_rad, Real tilt_rad, Real decl, int minute_of_day) {
  const Real hour_angle = deg2rad(15.0) * (minute_of_day / 60.0 - 12.0);
  return std::cos(latitude_rad - tilt_rad) * std::cos(decl) * std::cos(hour_angle) +
         std::sin(latitude_rad - tilt_rad) * std::sin(decl);
}

// Incidence angle (rad) clamped into [0, pi/2); pi/2-epsilon means the sun is
// behind the collector plane.
inline Real incidence_angle(Real latitude_deg, Real tilt_deg, int day_of_year,
                            int minute_of_day) {
  const Real c = cos_incidence_south(deg2rad(latitude_deg), deg2rad(tilt_deg),
                                     declination(day_of_year), minute_of_day);
  return std::acos(std::clamp(c, Real(1e-6), Real(1)));
}

// Clear-sky long-wave irradiance from the Swinbank sky-temperature fit.
inline Real sky_longwave(Real t_amb_c) {
  const Real tk = t_amb_c + kCelsiusToKelvin;
  const Real t_sky = 0.0552 * std::pow(tk, 1.5);
  return kStefanBoltzmann * t_sky * t_sky * t_sky * t_sky;
}

}  // namespace bems::solar
