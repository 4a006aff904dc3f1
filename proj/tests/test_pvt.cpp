#include <doctest.h>

#include <cmath>

#include "bems/pvt.hpp"
#include "bems/rng.hpp"

using namespace bems;
using namespace bems::pvt;

namespace {

Real ambient_longwave(Real t_amb_c) {
  const Real tk = t_amb_c + kCelsiusToKelvin;
  return kStefanBoltzmann * tk * tk * tk * tk;
}

// Fine-step explicit Euler on the fluid energy balance, written directly from
// the balance terms as an independent check on the implicit stepper.
Real explicit_euler_outlet(Real t_out0, Real t_in, const PvtWeather& w, const PvtParams& p,
                           Real duration, Real h) {
  const Real kb = incidence_modifier(w.theta, p.b0_th);
  const Real tk = w.t_amb + kCelsiusToKelvin;
  Real t_out = t_out0;
  for (Real t = 0.0; t < duration - 1e-9; t += h) {
    const Real tm = 0.5 * (t_in + t_out);
    Real rhs = p.area * p.eta0 * (kb * w.g_beam + p.k_d * w.g_diff);
    rhs -= p.area * p.c1 * (tm - w.t_amb);
    rhs -= p.area * p.c2 * (tm - w.t_amb) * (tm - w.t_amb);
    rhs -= p.area * p.c3 * w.wind * (tm - w.t_amb);
    rhs += p.area * p.c4 * (w.e_longwave - p.sigma * tk * tk * tk * tk);
    rhs -= p.area * p.c6 * w.wind * w.g;
    rhs -= p.mdot * p.cp_w * (t_out - t_in);
    t_out += h * rhs / (p.area * p.c_eff / 2.0);
  }
  return t_out;
}

}  // namespace

TEST_CASE("incidence modifier closed-form points") {
  CHECK(incidence_modifier(0.0, 0.087) == 1.0);
  const Real sixty = 60.0 * M_PI / 180.0;
  CHECK(incidence_modifier(sixty, 0.087) == doctest::Approx(0.913).epsilon(1e-12));
  CHECK(incidence_modifier(sixty, 0.238) == doctest::Approx(0.762).epsilon(1e-12));
  CHECK(incidence_modifier(1.53, 0.238) >= 0.0);  // near grazing, clamped
}

TEST_CASE("night equilibrium is a fixed point with zero output") {
  PvtParams p;
  PvtWeather w;
  w.t_amb = 3.0;
  w.e_longwave = ambient_longwave(w.t_amb);
  PvtState s;
  s.t_out = w.t_amb;
  const ThermalStepResult r = step_thermal(s, w.t_amb, w, p, 1800.0);
  CHECK(r.state.t_out == doctest::Approx(w.t_amb).epsilon(1e-12));
  CHECK(r.p_thermal == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero flow carries no thermal power") {
  PvtParams p;
  p.mdot = 0.0;
  PvtWeather w;
  w.g = w.g_beam = 700.0;
  w.t_amb = 10.0;
  w.e_longwave = ambient_longwave(w.t_amb);
  PvtState s;
  s.t_out = 25.0;
  const ThermalStepResult r = step_thermal(s, 15.0, w, p, 600.0);
  CHECK(r.p_thermal == 0.0);
}

TEST_CASE("implicit thermal step tracks the fine explicit oracle") {
  PvtParams p;
  PvtWeather w;
  w.g = 800.0;
  w.g_beam = 560.0;
  w.g_diff = 240.0;
  w.theta = 35.0 * M_PI / 180.0;
  w.t_amb = 8.0;
  w.wind = 2.0;
  w.e_longwave = ambient_longwave(w.t_amb) - 60.0;  // clear-sky deficit
  const Real t_in = 12.0;
  PvtState s;
  s.t_out = 14.0;
  const ThermalStepResult r = step_thermal(s, t_in, w, p, 1800.0);
  const Real oracle = explicit_euler_outlet(14.0, t_in, w, p, 1800.0, 0.01);
  CHECK(std::abs(r.state.t_out - oracle) < 0.01);

  // Night-time cooling may push the thermal output negative; it is passed
  // through unclamped.
  PvtWeather night;
  night.t_amb = 0.0;
  night.e_longwave = ambient_longwave(night.t_amb) - 80.0;
  PvtState hot;
  hot.t_out = 30.0;
  const ThermalStepResult rn = step_thermal(hot, 28.0, night, p, 1800.0);
  CHECK(rn.p_thermal < 0.0);
}

TEST_CASE("cell temperature follows the loop balance") {
  PvtParams p;
  p.mdot = 0.0;
  CHECK(cell_temperature(30.0, 40.0, p) == doctest::Approx(35.0));
  p.mdot = 0.05;
  CHECK(cell_temperature(40.0, 40.0, p) == doctest::Approx(40.0));
  p.r_pvt = 0.0662;
  p.cp_w = 4186.0;
  p.area = 8.0;
  CHECK(cell_temperature(30.0, 40.0, p) == doctest::Approx(52.319575).epsilon(1e-9));
}

TEST_CASE("performance ratio factors hit their closed-form anchors") {
  PvtParams p;
  PvtWeather w;
  w.g = 0.0;
  PerformanceRatio pr = performance_ratio(w, p.t_ref, p);
  CHECK(pr.irradiance == 0.0);
  CHECK(pr.temperature == 1.0);
  CHECK(pr.iam == 1.0);
  CHECK(pr.total == 0.0);

  w.g = 1000.0;
  pr = performance_ratio(w, p.t_ref, p);
  // Independent extended-precision re-evaluation of the irradiance factor.
  const long double oracle =
      irradiance_ratio<long double>(1000.0L, 1.090e-5L, -0.047L, -1.400L);
  CHECK(std::abs(pr.irradiance - static_cast<double>(oracle)) < 1e-3);
  CHECK(pr.irradiance == doctest::Approx(1.0193989).epsilon(1e-6));
}

TEST_CASE("electrical power scales with area and respects the reference bound") {
  PvtParams p;
  PvtWeather w;
  w.g = 0.0;
  CHECK(electrical_power(w, 1.0, p) == 0.0);

  w.g = 1000.0;
  CHECK(electrical_power(w, 1.0, p) == doctest::Approx(982.4).epsilon(1e-12));

  PvtParams doubled = p;
  doubled.area = 2.0 * p.area;
  CHECK(electrical_power(w, 0.8, doubled) == doctest::Approx(2.0 * electrical_power(w, 0.8, p)));

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    w.g = rng.uniform(0.0, 1100.0);
    w.theta = rng.uniform(0.0, 1.2);
    const Real t_cell = rng.uniform(-5.0, 70.0);
    const PerformanceRatio pr = performance_ratio(w, t_cell, p);
    const Real pe = electrical_power(w, pr.total, p);
    CHECK(pe >= 0.0);
    if (pr.total <= 1.0) CHECK(pe <= p.eta_el_ref * w.g * p.area + 1e-9);
  }
}
