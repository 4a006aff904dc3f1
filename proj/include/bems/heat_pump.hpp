#pragma once

#include "bems/tess.hpp"
#include "bems/types.hpp"

namespace bems::heat_pump {

struct HpParams {
  Real ua_evp_pvt = 400.0;    // W/K
  Real ua_evp_air = 600.0;    // W/K
  Real mdot_air = 0.35;       // kg/s air-side flow
  Real cp_air = 4186.0;       // J/kgK capacity rate factor paired with mdot_air
  Real p_e_max = 6000.0;      // W maximum electrical draw
  Real p_e_min_on = 1000.0;   // W minimum draw when running
  Real t_supply_max = 95.0;   // deg C condenser supply cap
  Real evap_approach = 5.0;   // K evaporator pinch below the colder source
  Real mdot_pvt = 0.1;        // kg/s PVT loop flow through the evaporator
  Real cp_w = 4186.0;         // J/kgK

  void validate() const;
};

struct EvaporatorHeat {
  Real q_pvt = 0.0;   // W
  Real q_air = 0.0;   // W
  Real q_total = 0.0; // W
};

// Effectiveness-form recovery from each source, clamped at zero (an
// evaporator never pumps heat backwards).
EvaporatorHeat evaporator_heat(Real t_out_pvt, Real t_amb, Real t_evp, const HpParams& p);

struct HpOperatingPoint {
  bool on = false;
  Real p_electric = 0.0;   // W
  Real p_evaporator = 0.0; // W heat recovered
  Real p_condenser = 0.0;  // W heat delivered to the tank loop
  Real cop = 0.0;          // p_condenser / p_electric when drawing power
  Real t_supply = 0.0;     // deg C condenser outlet into the tank
  Real t_evp = 0.0;        // deg C evaporating temperature used
};

// Evaluates one operating point. The condenser supply temperature follows the
// loop balance t_supply = tes_out + P_th / (mdot_loop cp); if it would exceed
// the cap, delivery is curtailed and the electrical draw reduced to keep the
// energy identity P_th = P_e + P_evp.
HpOperatingPoint operating_point(bool on, Real p_electric, Real t_out_pvt, Real t_amb,
                                 Real tes_out, const HpParams& p, const tess::TessParams& tank);

// COP at full electrical draw for the given source and sink temperatures.
Real predict_cop(Real t_amb, Real t_out_pvt, Real tes_out, const HpParams& p,
                 const tess::TessParams& tank);

}  // namespace bems::heat_pump
