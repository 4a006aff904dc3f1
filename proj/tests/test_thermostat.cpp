#include <doctest.h>

#include "bems/thermostat.hpp"

using namespace bems;
using namespace bems::thermostat;

TEST_CASE("fan-coil hysteresis band") {
  ThermostatConfig cfg;
  ThermostatOutput prev;

  prev.fcu_on = false;
  CHECK(thermostat_step(cfg, 18.0, 65.0, prev).fcu_on);        // below band
  CHECK_FALSE(thermostat_step(cfg, 21.0, 65.0, prev).fcu_on);  // above band

  prev.fcu_on = true;
  CHECK(thermostat_step(cfg, 19.7, 65.0, prev).fcu_on);  // hold inside band
  prev.fcu_on = false;
  CHECK_FALSE(thermostat_step(cfg, 19.7, 65.0, prev).fcu_on);
}

TEST_CASE("heat pump hysteresis against the tank top") {
  ThermostatConfig cfg;
  ThermostatOutput prev;
  prev.hp_on = false;
  CHECK(thermostat_step(cfg, 20.0, 62.0, prev).hp_on);
  CHECK_FALSE(thermostat_step(cfg, 20.0, 68.0, prev).hp_on);
  prev.hp_on = true;
  CHECK(thermostat_step(cfg, 20.0, 65.5, prev).hp_on);
}

TEST_CASE("output is a function of temperatures and previous state only") {
  ThermostatConfig cfg;
  // Exhaustive sweep over a temperature grid and both memory states: calling
  // twice with identical arguments must agree, and fixed temperatures must
  // hold their output (no chattering).
  for (int mem = 0; mem < 4; ++mem) {
    ThermostatOutput prev;
    prev.hp_on = mem & 1;
    prev.fcu_on = mem & 2;
    for (Real t_in = 18.0; t_in <= 22.0; t_in += 0.05) {
      for (Real t_tes = 60.0; t_tes <= 70.0; t_tes += 0.25) {
        const ThermostatOutput a = thermostat_step(cfg, t_in, t_tes, prev);
        const ThermostatOutput b = thermostat_step(cfg, t_in, t_tes, prev);
        CHECK(a.hp_on == b.hp_on);
        CHECK(a.fcu_on == b.fcu_on);
        const ThermostatOutput again = thermostat_step(cfg, t_in, t_tes, a);
        CHECK(again.hp_on == a.hp_on);
        CHECK(again.fcu_on == a.fcu_on);
      }
    }
  }
}

TEST_CASE("switch count on a slow ramp is bounded by the band transitions") {
  ThermostatConfig cfg;
  ThermostatOutput out;
  int switches = 0;
  bool last = out.fcu_on;
  for (int i = 0; i <= 800; ++i) {
    const Real t_in = 18.5 + 2.5 * i / 800.0;  // single rising sweep
    out = thermostat_step(cfg, t_in, 65.0, out);
    if (out.fcu_on != last) ++switches;
    last = out.fcu_on;
  }
  CHECK(switches <= 2);
}

TEST_CASE("bad deadbands are rejected") {
  ThermostatConfig cfg;
  cfg.deadband_in = 0.0;
  CHECK_THROWS(cfg.validate());
}
