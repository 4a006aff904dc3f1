#pragma once

#include <string>
#include <vector>

#include "bems/types.hpp"

namespace bems::tess {

// Three-segment stratified tank, index 0 = top. Geometry defaults derive
// from a 2000 l vessel with height-over-diameter ratio 4.
struct TessParams {
  Real m_total = 2000.0;    // kg of water
  Real k_loss = 0.6;        // W/m^2K tank loss factor
  Real k_water = 0.6;       // W/mK water conductivity
  Real a_cross = 0.58126;   // m^2
  Real a_surface = 10.4627; // m^2
  Real height = 3.44126;    // m
  Real mdot_loop = 0.25;    // kg/s condenser loop flow
  Real mdot_fcu = 0.13;     // kg/s fan-coil loop flow when on
  Real cp_w = 4186.0;       // J/kgK
  Real t_min = 45.0;        // deg C lower segment bound
  Real t_max = 95.0;        // deg C upper bound on the top segment
  Real t_fcu_return = 40.0; // deg C fan-coil return temperature
  Real substep_s = 1.0;     // explicit integration substep, s

  void validate() const;
};

// Tank geometry for a given volume (m^3) and height/diameter ratio.
struct TankGeometry {
  Real a_cross, a_surface, height;
};
TankGeometry tank_geometry(Real volume_m3, Real height_over_diameter);

struct TessState {
  Vec3 t = Vec3::Constant(60.0);  // deg C, t(0) top ... t(2) bottom

  Real top() const { return t(0); }
  Real middle() const { return t(1); }
  Real bottom() const { return t(2); }

  static TessState uniform(Real temp) {
    TessState s;
    s.t.setConstant(temp);
    return s;
  }
};

// Advances the segment energy balances over dt seconds. t_in_loop is the
// condenser supply temperature entering the top segment; the fan-coil loop
// runs only when fcu_on. If a substep inverts stratification, the affected
// neighbours are mixed to their mass-weighted mean.
TessState step_tess(const TessState& s, Real t_in_loop, bool fcu_on, Real t_amb,
                    const TessParams& p, Real dt);

// Delivered fan-coil power, Eq-style u * mdot * cp * (T_top - T_return).
Real fcu_power(const TessState& s, bool fcu_on, const TessParams& p);

// Condenser draw leaves from the bottom segment.
Real condenser_outlet(const TessState& s);

// Outdoor-reset heating curve: clamp(t0 - slope * T_amb, lo, hi), deg C.
struct HeatingCurve {
  Real t0 = 38.0;
  Real slope = 0.4;
  Real lo = 30.0;
  Real hi = 55.0;

  Real flow_temp(Real t_amb) const;
};

enum class TessViolation { TopAboveMax, OrderInverted, BottomBelowFlow };

struct TessViolationReport {
  TessViolation kind;
  std::string detail;
};

std::vector<TessViolationReport> check_constraints(const TessState& s, Real t_flow,
                                                   const TessParams& p);

}  // namespace bems::tess
