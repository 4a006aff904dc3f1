#pragma once

#include "bems/types.hpp"

namespace bems::thermostat {

// Two independent hysteresis loops: fan coil against the indoor set-point,
// heat pump against the tank-top set-point. The heat pump runs at full draw
// when on; there is no modulation channel in this baseline.
struct ThermostatConfig {
  Real t_in_setpoint = 19.7;   // deg C
  Real t_tes_setpoint = 65.0;  // deg C, tank top
  Real deadband_in = 0.3;      // K half-width
  Real deadband_tes = 2.0;     // K half-width

  void validate() const;
};

struct ThermostatOutput {
  bool hp_on = false;
  bool fcu_on = false;
};

ThermostatOutput thermostat_step(const ThermostatConfig& cfg, Real t_in, Real t_tes_top,
                                 const ThermostatOutput& prev);

}  // namespace bems::thermostat
