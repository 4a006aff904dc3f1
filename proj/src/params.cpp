#include "bems/params.hpp"

#include <stdexcept>

namespace bems {

void SystemParams::validate() const {
  building.validate();
  pvt.validate();
  tank.validate();
  heat_pump.validate();
  thermostat.validate();
  if (!(site.diffuse_fraction >= 0.0 && site.diffuse_fraction <= 1.0))
    throw std::invalid_argument("site: diffuse_fraction must lie in [0,1]");
  if (site.day_of_year < 1 || site.day_of_year > 366)
    throw std::invalid_argument("site: day_of_year out of range");
}

SystemParams system_params_from_config(const KeyValueConfig& cfg) {
  SystemParams p;

  auto real = [&cfg](const char* key, Real& field) { field = cfg.get_real(key, field); };
  auto integer = [&cfg](const char* key, int& field) { field = cfg.get_int(key, field); };

  real("building.r_wall_ex", p.building.r_wall_ex);
  real("building.r_wall", p.building.r_wall);
  real("building.r_wall_in", p.building.r_wall_in);
  real("building.r_win", p.building.r_win);
  real("building.r_i", p.building.r_i);
  real("building.c_wall_ex", p.building.c_wall_ex);
  real("building.c_wall_in", p.building.c_wall_in);
  real("building.c_in", p.building.c_in);
  real("building.c_itm", p.building.c_itm);
  real("building.alpha", p.building.alpha);
  real("building.a_wall", p.building.a_wall);
  real("building.a_e_wind", p.building.a_e_wind);
  real("building.a_floor", p.building.a_floor);
  real("building.shgc", p.building.shgc);
  real("building.f_air", p.building.f_air);

  real("pvt.area", p.pvt.area);
  real("pvt.eta0", p.pvt.eta0);
  real("pvt.k_d", p.pvt.k_d);
  real("pvt.b0_th", p.pvt.b0_th);
  real("pvt.c1", p.pvt.c1);
  real("pvt.c2", p.pvt.c2);
  real("pvt.c3", p.pvt.c3);
  real("pvt.c4", p.pvt.c4);
  real("pvt.c6", p.pvt.c6);
  real("pvt.c_eff", p.pvt.c_eff);
  real("pvt.r_pvt", p.pvt.r_pvt);
  real("pvt.mdot", p.pvt.mdot);
  real("pvt.cp_w", p.pvt.cp_w);
  real("pvt.b0_el", p.pvt.b0_el);
  real("pvt.eta_el_ref", p.pvt.eta_el_ref);
  real("pvt.beta", p.pvt.beta);
  real("pvt.a_g", p.pvt.a_g);
  real("pvt.b_g", p.pvt.b_g);
  real("pvt.c_g", p.pvt.c_g);
  real("pvt.t_ref", p.pvt.t_ref);
  real("pvt.substep_s", p.pvt.substep_s);

  // Geometry defaults derive from the configured volume and aspect ratio and
  // may be overridden key by key afterwards.
  Real volume_l = 2000.0, aspect = 4.0;
  volume_l = cfg.get_real("tess.volume_l", volume_l);
  aspect = cfg.get_real("tess.height_over_diameter", aspect);
  const tess::TankGeometry geom = tess::tank_geometry(volume_l / 1000.0, aspect);
  p.tank.a_cross = geom.a_cross;
  p.tank.a_surface = geom.a_surface;
  p.tank.height = geom.height;
  p.tank.m_total = volume_l;  // 1 kg/l

  real("tess.m_total", p.tank.m_total);
  real("tess.k_loss", p.tank.k_loss);
  real("tess.k_water", p.tank.k_water);
  real("tess.a_cross", p.tank.a_cross);
  real("tess.a_surface", p.tank.a_surface);
  real("tess.height", p.tank.height);
  real("tess.mdot_loop", p.tank.mdot_loop);
  real("tess.mdot_fcu", p.tank.mdot_fcu);
  real("tess.cp_w", p.tank.cp_w);
  real("tess.t_min", p.tank.t_min);
  real("tess.t_max", p.tank.t_max);
  real("tess.t_fcu_return", p.tank.t_fcu_return);
  real("tess.substep_s", p.tank.substep_s);

  real("hp.ua_evp_pvt", p.heat_pump.ua_evp_pvt);
  real("hp.ua_evp_air", p.heat_pump.ua_evp_air);
  real("hp.mdot_air", p.heat_pump.mdot_air);
  real("hp.cp_air", p.heat_pump.cp_air);
  real("hp.p_e_max", p.heat_pump.p_e_max);
  real("hp.p_e_min_on", p.heat_pump.p_e_min_on);
  real("hp.t_supply_max", p.heat_pump.t_supply_max);
  real("hp.evap_approach", p.heat_pump.evap_approach);
  p.heat_pump.mdot_pvt = p.pvt.mdot;
  p.heat_pump.cp_w = p.pvt.cp_w;
  real("hp.mdot_pvt", p.heat_pump.mdot_pvt);
  real("hp.cp_w", p.heat_pump.cp_w);

  real("heating_curve.t0", p.heating_curve.t0);
  real("heating_curve.slope", p.heating_curve.slope);
  real("heating_curve.lo", p.heating_curve.lo);
  real("heating_curve.hi", p.heating_curve.hi);

  real("thermostat.t_in_setpoint", p.thermostat.t_in_setpoint);
  real("thermostat.t_tes_setpoint", p.thermostat.t_tes_setpoint);
  real("thermostat.deadband_in", p.thermostat.deadband_in);
  real("thermostat.deadband_tes", p.thermostat.deadband_tes);

  real("site.latitude_deg", p.site.latitude_deg);
  real("site.tilt_deg", p.site.tilt_deg);
  real("site.diffuse_fraction", p.site.diffuse_fraction);
  integer("site.day_of_year", p.site.day_of_year);

  p.validate();
  return p;
}

std::string default_config_text() {
  SystemParams d;
  std::string out;
  auto line = [&out](const std::string& s) { out += s + "\n"; };
  auto kv = [&line](const std::string& k, Real v) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.10g", v);
    line(k + " = " + buf);
  };

  line("# Building thermal network (area-specific resistances m^2K/W,");
  line("# capacitances J/m^2K; lumped with the wall or floor area).");
  kv("building.r_wall_ex", d.building.r_wall_ex);
  kv("building.r_wall", d.building.r_wall);
  kv("building.r_wall_in", d.building.r_wall_in);
  kv("building.r_win", d.building.r_win);
  kv("building.r_i", d.building.r_i);
  kv("building.c_wall_ex", d.building.c_wall_ex);
  kv("building.c_wall_in", d.building.c_wall_in);
  kv("building.c_in", d.building.c_in);
  kv("building.c_itm", d.building.c_itm);
  kv("building.alpha", d.building.alpha);
  kv("building.a_wall", d.building.a_wall);
  kv("building.a_e_wind", d.building.a_e_wind);
  kv("building.a_floor", d.building.a_floor);
  kv("building.shgc", d.building.shgc);
  kv("building.f_air", d.building.f_air);
  line("");
  line("# PVT collector thermal and electrical coefficients.");
  kv("pvt.area", d.pvt.area);
  kv("pvt.eta0", d.pvt.eta0);
  kv("pvt.k_d", d.pvt.k_d);
  kv("pvt.b0_th", d.pvt.b0_th);
  kv("pvt.c1", d.pvt.c1);
  kv("pvt.c2", d.pvt.c2);
  kv("pvt.c3", d.pvt.c3);
  kv("pvt.c4", d.pvt.c4);
  kv("pvt.c6", d.pvt.c6);
  kv("pvt.c_eff", d.pvt.c_eff);
  kv("pvt.r_pvt", d.pvt.r_pvt);
  kv("pvt.mdot", d.pvt.mdot);
  kv("pvt.cp_w", d.pvt.cp_w);
  kv("pvt.b0_el", d.pvt.b0_el);
  kv("pvt.eta_el_ref", d.pvt.eta_el_ref);
  kv("pvt.beta", d.pvt.beta);
  kv("pvt.a_g", d.pvt.a_g);
  kv("pvt.b_g", d.pvt.b_g);
  kv("pvt.c_g", d.pvt.c_g);
  kv("pvt.t_ref", d.pvt.t_ref);
  kv("pvt.substep_s", d.pvt.substep_s);
  line("");
  line("# Stratified storage tank; geometry derives from volume and aspect");
  line("# ratio unless the areas are overridden explicitly.");
  kv("tess.volume_l", 2000.0);
  kv("tess.height_over_diameter", 4.0);
  kv("tess.k_loss", d.tank.k_loss);
  kv("tess.k_water", d.tank.k_water);
  kv("tess.mdot_loop", d.tank.mdot_loop);
  kv("tess.mdot_fcu", d.tank.mdot_fcu);
  kv("tess.cp_w", d.tank.cp_w);
  kv("tess.t_min", d.tank.t_min);
  kv("tess.t_max", d.tank.t_max);
  kv("tess.t_fcu_return", d.tank.t_fcu_return);
  kv("tess.substep_s", d.tank.substep_s);
  line("");
  line("# Dual-source heat pump.");
  kv("hp.ua_evp_pvt", d.heat_pump.ua_evp_pvt);
  kv("hp.ua_evp_air", d.heat_pump.ua_evp_air);
  kv("hp.mdot_air", d.heat_pump.mdot_air);
  kv("hp.cp_air", d.heat_pump.cp_air);
  kv("hp.p_e_max", d.heat_pump.p_e_max);
  kv("hp.p_e_min_on", d.heat_pump.p_e_min_on);
  kv("hp.t_supply_max", d.heat_pump.t_supply_max);
  kv("hp.evap_approach", d.heat_pump.evap_approach);
  line("");
  line("# Outdoor-reset heating curve for the tank flow-temperature floor.");
  kv("heating_curve.t0", d.heating_curve.t0);
  kv("heating_curve.slope", d.heating_curve.slope);
  kv("heating_curve.lo", d.heating_curve.lo);
  kv("heating_curve.hi", d.heating_curve.hi);
  line("");
  line("# Baseline hysteresis controller.");
  kv("thermostat.t_in_setpoint", d.thermostat.t_in_setpoint);
  kv("thermostat.t_tes_setpoint", d.thermostat.t_tes_setpoint);
  kv("thermostat.deadband_in", d.thermostat.deadband_in);
  kv("thermostat.deadband_tes", d.thermostat.deadband_tes);
  line("");
  line("# Site geometry for incidence angles and beam/diffuse splits.");
  kv("site.latitude_deg", d.site.latitude_deg);
  kv("site.tilt_deg", d.site.tilt_deg);
  kv("site.diffuse_fraction", d.site.diffuse_fraction);
  line("site.day_of_year = 10");
  line("");
  line("# Receding-horizon controller.");
  line("mpc.n_scenarios = 100");
  line("mpc.n_reduced = 5");
  line("mpc.knn_k = 20");
  line("mpc.comfort_lo = 19");
  line("mpc.comfort_hi = 23");
  line("mpc.comfort_margin = 0.1");
  line("mpc.tes_lo = 45");
  line("mpc.tes_hi = 95");
  line("mpc.slack_penalty = 1e6");
  line("mpc.feed_in_factor = 1");
  line("mpc.solver.time_limit_s = 20");
  line("mpc.solver.node_limit = 200000");
  line("mpc.solver.iteration_budget = 400000");
  line("mpc.solver.early_stop_gap = 0.002");
  return out;
}

}  // namespace bems
