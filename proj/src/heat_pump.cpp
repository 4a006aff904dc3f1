#include "bems/heat_pump.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bems::heat_pump {

void HpParams::validate() const {
  if (ua_evp_pvt < 0.0 || ua_evp_air < 0.0)
    throw std::invalid_argument("heat_pump: UA values must be >= 0");
  if (!(p_e_max >= p_e_min_on && p_e_min_on >= 0.0))
    throw std::invalid_argument("heat_pump: need p_e_max >= p_e_min_on >= 0");
  if (mdot_pvt < 0.0 || mdot_air < 0.0)
    throw std::invalid_argument("heat_pump: flows must be >= 0");
}

namespace {

Real effectiveness_recovery(Real capacity_rate, Real ua, Real t_source, Real t_evp) {
  if (capacity_rate <= 0.0) return 0.0;
  const Real q = capacity_rate * (t_source - t_evp) * (1.0 - std::exp(-ua / capacity_rate));
  return std::max(0.0, q);
}

}  // namespace

EvaporatorHeat evaporator_heat(Real t_out_pvt, Real t_amb, Real t_evp, const HpParams& p) {
  EvaporatorHeat e;
  e.q_pvt = effectiveness_recovery(p.mdot_pvt * p.cp_w, p.ua_evp_pvt, t_out_pvt, t_evp);
  e.q_air = effectiveness_recovery(p.mdot_air * p.cp_air, p.ua_evp_air, t_amb, t_evp);
  e.q_total = e.q_pvt + e.q_air;
  return e;
}

HpOperatingPoint operating_point(bool on, Real p_electric, Real t_out_pvt, Real t_amb,
                                 Real tes_out, const HpParams& p, const tess::TessParams& tank) {
  HpOperatingPoint op;
  op.on = on;
  op.t_evp = std::min(t_amb, t_out_pvt) - p.evap_approach;
  if (!on) {
    op.t_supply = tes_out;
    return op;
  }
  if (!(p_electric > 0.0)) throw std::invalid_argument("heat_pump: running with no power draw");
  if (p_electric > p.p_e_max) throw std::invalid_argument("heat_pump: draw above p_e_max");

  const EvaporatorHeat evp = evaporator_heat(t_out_pvt, t_amb, op.t_evp, p);
  const Real mc_loop = tank.mdot_loop * tank.cp_w;

  Real p_th = p_electric + evp.q_total;
  Real p_e = p_electric;
  Real p_evp = evp.q_total;

  const Real p_th_cap = std::max(0.0, (p.t_supply_max - tes_out) * mc_loop);
  if (p_th > p_th_cap) {
    p_th = p_th_cap;
    p_e = std::max(0.0, p_th - evp.q_total);
    p_evp = p_th - p_e;
  }

  op.p_electric = p_e;
  op.p_evaporator = p_evp;
  op.p_condenser = p_th;
  op.cop = p_e > 0.0 ? p_th / p_e : 0.0;
  op.t_supply = mc_loop > 0.0 ? tes_out + p_th / mc_loop : tes_out;
  return op;
}

Real predict_cop(Real t_amb, Real t_out_pvt, Real tes_out, const HpParams& p,
                 const tess::TessParams& tank) {
  return operating_point(true, p.p_e_max, t_out_pvt, t_amb, tes_out, p, tank).cop;
}

}  // namespace bems::heat_pump
