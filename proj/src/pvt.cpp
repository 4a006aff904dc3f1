#include "bems/pvt.hpp"

#include <stdexcept>

namespace bems::pvt {

void PvtParams::validate() const {
  if (!(area > 0.0)) throw std::invalid_argument("pvt: area must be > 0");
  if (!(eta0 > 0.0 && eta0 < 1.0)) throw std::invalid_argument("pvt: eta0 must lie in (0,1)");
  if (mdot < 0.0) throw std::invalid_argument("pvt: mdot must be >= 0");
  if (!(cp_w > 0.0)) throw std::invalid_argument("pvt: cp_w must be > 0");
  if (!(c_eff > 0.0)) throw std::invalid_argument("pvt: c_eff must be > 0");
  if (!(substep_s > 0.0 && substep_s <= 1.0))
    throw std::invalid_argument("pvt: substep_s must lie in (0,1]");
}

namespace {

// Source terms of the fluid energy balance that do not depend on the fluid
// temperature: optical gain, long-wave exchange, wind penalty. All in W.
Real constant_source(const PvtWeather& w, const PvtParams& p) {
  const Real kb = incidence_modifier(w.theta, p.b0_th);
  const Real t_amb_k = w.t_amb + kCelsiusToKelvin;
  Real s = p.area * p.eta0 * (kb * w.g_beam + p.k_d * w.g_diff);
  s += p.area * p.c4 * (w.e_longwave - p.sigma * t_amb_k * t_amb_k * t_amb_k * t_amb_k);
  s -= p.area * p.c6 * w.wind * w.g;
  return s;
}

}  // namespace

ThermalStepResult step_thermal(const PvtState& state, Real t_in, const PvtWeather& w,
                               const PvtParams& p, Real dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pvt: dt must be > 0");

  const Real source = constant_source(w, p);
  const Real cap = p.area * p.c_eff / 2.0;  // J/K on dT_out/dt with T_in held
  const Real flow = p.mdot * p.cp_w;        // W/K

  Real t_out = state.t_out;
  Real remaining = dt;
  while (remaining > 0.0) {
    const Real h = std::min(p.substep_s, remaining);
    remaining -= h;

    // Implicit Euler in m = T_m' - T_amb with T_out' = 2(m + T_amb) - T_in:
    //   qa m^2 + qb m + qc = 0, picking the root continuous in c2 -> 0.
    const Real qa = p.area * p.c2;
    const Real qb = p.area * p.c1 + p.area * p.c3 * w.wind + 2.0 * cap / h + 2.0 * flow;
    const Real qc = (cap / h) * (2.0 * w.t_amb - t_in - t_out) - source +
                    2.0 * flow * (w.t_amb - t_in);
    Real m;
    if (qa == 0.0) {
      m = -qc / qb;
    } else {
      Real disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) disc = 0.0;
      m = -2.0 * qc / (qb + std::sqrt(disc));
    }
    t_out = 2.0 * (m + w.t_amb) - t_in;
  }

  ThermalStepResult r;
  r.state.t_out = t_out;
  r.p_thermal = flow * (t_out - t_in);
  return r;
}

Real cell_temperature(Real t_in, Real t_out, const PvtParams& p) {
  return 0.5 * (t_in + t_out) + p.r_pvt * p.mdot * p.cp_w * (t_out - t_in) / p.area;
}

PerformanceRatio performance_ratio(const PvtWeather& w, Real t_cell, const PvtParams& p) {
  if (w.g < 0.0) throw std::invalid_argument("pvt: irradiance must be >= 0");
  PerformanceRatio pr;
  pr.iam = incidence_modifier(w.theta, p.b0_el);
  pr.irradiance = std::max(0.0, irradiance_ratio(w.g, p.a_g, p.b_g, p.c_g));
  pr.temperature = std::max(0.0, 1.0 - p.beta * (t_cell - p.t_ref));
  pr.total = pr.iam * pr.irradiance * pr.temperature;
  return pr;
}

Real electrical_power(const PvtWeather& w, Real pr_total, const PvtParams& p) {
  if (pr_total < 0.0) throw std::invalid_argument("pvt: performance ratio must be >= 0");
  return p.eta_el_ref * pr_total * w.g * p.area;
}

}  // namespace bems::pvt
