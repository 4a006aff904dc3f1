#pragma once

#include "bems/types.hpp"

namespace bems::building {

// Four-node RC network: exterior wall surface, interior wall surface,
// internal thermal mass, indoor air. Resistances are area-specific (m^2K/W)
// and capacitances area-specific (J/m^2K); wall-node parameters lump with the
// external wall area, indoor-air and internal-mass parameters with the floor
// area. Lumped values can be overridden directly through the config.
struct BuildingParams {
  Real r_wall_ex = 0.0924;  // m^2K/W
  Real r_wall = 0.0853;
  Real r_wall_in = 0.004;
  Real r_win = 0.0102;
  Real r_i = 0.0065;
  Real c_wall_ex = 205e3;  // J/m^2K
  Real c_wall_in = 195e3;
  Real c_in = 3.69e3;
  Real c_itm = 526e3;

  Real alpha = 0.3;      // wall solar absorptance
  Real a_wall = 60.0;    // m^2
  Real a_e_wind = 6.0;   // m^2, effective window area
  Real a_floor = 50.0;   // m^2
  Real shgc = 0.5;
  Real f_air = 0.5;      // indoor-air share of window solar gain

  void validate() const;  // throws std::invalid_argument
};

// Lumped (absolute) network values: resistances in K/W, capacitances in J/K.
struct LumpedRc {
  Real r_wall_ex, r_wall, r_wall_in, r_win, r_i;
  Real c_wall_ex, c_wall_in, c_in, c_itm;
};

LumpedRc lump(const BuildingParams& p);

// State order everywhere: [T_wall_ex, T_wall_in, T_itm, T_in] in deg C.
struct BuildingState {
  Vec4 t = Vec4::Zero();

  Real t_wall_ex() const { return t(0); }
  Real t_wall_in() const { return t(1); }
  Real t_itm() const { return t(2); }
  Real t_in() const { return t(3); }

  static BuildingState uniform(Real temp) {
    BuildingState s;
    s.t.setConstant(temp);
    return s;
  }
};

struct ContinuousDynamics {
  Mat4 a;                        // state matrix, 1/s
  Eigen::Matrix<Real, 4, 1> b;   // fan-coil input column, K/(J)
  Eigen::Matrix<Real, 4, 3> e;   // disturbance columns [G, T_amb, p_internal]
};

struct LinearDynamics {
  Mat4 a_d;
  Eigen::Matrix<Real, 4, 1> b_d;
  Eigen::Matrix<Real, 4, 3> e_d;
  Real dt = 0.0;  // s
};

struct DisturbanceSample {
  Real irradiance = 0.0;   // W/m^2, global on the facade
  Real t_amb = 0.0;        // deg C
  Real p_internal = 0.0;   // W
};

// Assembles the continuous-time matrices from the node energy balances.
ContinuousDynamics build_continuous_matrices(const BuildingParams& p);
ContinuousDynamics build_continuous_matrices(const LumpedRc& rc, const BuildingParams& p);

// Exact zero-order-hold discretization via the augmented matrix exponential.
LinearDynamics discretize(const ContinuousDynamics& c, Real dt);

struct SolarGains {
  Real p_wall = 0.0;  // absorbed by the exterior wall, W
  Real p_in = 0.0;    // window gain routed to indoor air, W
  Real p_itm = 0.0;   // window gain routed to internal mass, W
};

SolarGains solar_gains(Real irradiance, const BuildingParams& p);

// One discrete step. p_fcu is fan-coil thermal power into the indoor air (W).
BuildingState step_state(const LinearDynamics& dyn, const BuildingState& x, Real p_fcu,
                         const DisturbanceSample& d);

// Walls and internal mass in steady state for a held indoor temperature with
// no sun; used to seed simulations at a physical operating point.
BuildingState steady_state_for_indoor(const BuildingParams& p, Real t_in, Real t_amb);

}  // namespace bems::building
