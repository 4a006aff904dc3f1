#pragma once

#include <algorithm>
#include <cmath>

#include "bems/types.hpp"

namespace bems::pvt {

struct PvtParams {
  Real area = 8.0;            // m^2
  Real eta0 = 0.513;          // zero-loss efficiency
  Real k_d = 0.903;           // diffuse incidence modifier (constant)
  Real b0_th = 0.087;         // thermal beam IAM constant
  Real c1 = 6.032;            // W/m^2K
  Real c2 = 0.035;            // W/m^2K^2
  Real c3 = 0.00008;          // J/m^3K (wind-dependent loss)
  Real c4 = 0.203;            // long-wave gain factor
  Real c6 = 0.006;            // (m/s)^-1 wind-dependent zero-loss penalty
  Real c_eff = 16912.0;       // J/m^2K effective areal heat capacity
  Real r_pvt = 0.0662;        // m^2K/W cell-to-fluid resistance
  Real mdot = 0.1;            // kg/s cooling fluid
  Real cp_w = 4186.0;         // J/kgK
  Real b0_el = 0.238;         // electrical IAM constant
  Real eta_el_ref = 0.1228;   // reference electrical efficiency
  Real beta = 0.0037;         // 1/K power-temperature coefficient
  Real a_g = 1.090e-5;        // m^2/W irradiance-loss model
  Real b_g = -0.047;
  Real c_g = -1.400;
  Real t_ref = 25.0;          // deg C reference cell temperature
  Real sigma = kStefanBoltzmann;
  Real substep_s = 0.25;      // implicit integration substep, s

  void validate() const;
};

struct PvtWeather {
  Real g = 0.0;         // W/m^2 global irradiance on the collector plane
  Real g_beam = 0.0;    // W/m^2
  Real g_diff = 0.0;    // W/m^2
  Real theta = 0.0;     // rad, beam incidence angle
  Real t_amb = 0.0;     // deg C
  Real wind = 0.0;      // m/s
  Real e_longwave = 0.0;  // W/m^2
};

struct PvtState {
  Real t_out = 15.0;  // deg C outlet fluid temperature
};

// K = 1 - b0 (1/cos(theta) - 1), clamped at zero.
template <typename Scalar>
Scalar incidence_modifier(Scalar theta, Scalar b0) {
  Scalar k = Scalar(1) - b0 * (Scalar(1) / std::cos(theta) - Scalar(1));
  return std::max(Scalar(0), k);
}

struct ThermalStepResult {
  PvtState state;
  Real p_thermal = 0.0;  // W carried by the cooling fluid, may be negative
};

// Advances the outlet temperature over dt seconds with the inlet held by the
// caller. The quadratic ambient-loss term is handled implicitly per substep.
ThermalStepResult step_thermal(const PvtState& state, Real t_in, const PvtWeather& w,
                               const PvtParams& p, Real dt);

Real cell_temperature(Real t_in, Real t_out, const PvtParams& p);

struct PerformanceRatio {
  Real iam = 1.0;
  Real irradiance = 1.0;
  Real temperature = 1.0;
  Real total = 1.0;
};

template <typename Scalar>
Scalar irradiance_ratio(Scalar g, Scalar a, Scalar b, Scalar c) {
  const Scalar e = Scalar(2.718281828459045235360287471352662498L);
  Scalar ln1 = std::log(g + Scalar(1));
  Scalar lne = std::log(g + e);
  return a * g + b * ln1 + c * (lne * lne / (g + Scalar(1)) - Scalar(1));
}

PerformanceRatio performance_ratio(const PvtWeather& w, Real t_cell, const PvtParams& p);

Real electrical_power(const PvtWeather& w, Real pr_total, const PvtParams& p);

}  // namespace bems::pvt
