#include "bems/thermostat.hpp"

#include <stdexcept>

namespace bems::thermostat {

void ThermostatConfig::validate() const {
  if (!(deadband_in > 0.0 && deadband_tes > 0.0))
    throw std::invalid_argument("thermostat: deadbands must be > 0");
}

namespace {

bool hysteresis(Real value, Real setpoint, Real band, bool prev_on) {
  if (value < setpoint - band) return true;
  if (value > setpoint + band) return false;
  return prev_on;
}

}  // namespace

ThermostatOutput thermostat_step(const ThermostatConfig& cfg, Real t_in, Real t_tes_top,
                                 const ThermostatOutput& prev) {
  ThermostatOutput out;
  out.fcu_on = hysteresis(t_in, cfg.t_in_setpoint, cfg.deadband_in, prev.fcu_on);
  out.hp_on = hysteresis(t_tes_top, cfg.t_tes_setpoint, cfg.deadband_tes, prev.hp_on);
  return out;
}

}  // namespace bems::thermostat
