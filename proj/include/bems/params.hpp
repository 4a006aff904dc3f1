#pragma once

#include "bems/building.hpp"
#include "bems/config.hpp"
#include "bems/heat_pump.hpp"
#include "bems/pvt.hpp"
#include "bems/tess.hpp"
#include "bems/thermostat.hpp"

namespace bems {

// Site geometry and irradiance-decomposition defaults used wherever the beam
// component or incidence angle has to be reconstructed from global values.
struct SiteParams {
  Real latitude_deg = 35.7;
  Real tilt_deg = 35.7;
  Real diffuse_fraction = 0.3;
  int day_of_year = 10;
};

struct SystemParams {
  building::BuildingParams building;
  pvt::PvtParams pvt;
  tess::TessParams tank;
  heat_pump::HpParams heat_pump;
  tess::HeatingCurve heating_curve;
  thermostat::ThermostatConfig thermostat;
  SiteParams site;

  void validate() const;
};

// Overlays config entries (dotted keys, e.g. "building.r_wall_ex") onto the
// built-in defaults. Unknown keys under the known prefixes are rejected.
SystemParams system_params_from_config(const KeyValueConfig& cfg);

// The full default configuration, one documented key per parameter.
std::string default_config_text();

}  // namespace bems
