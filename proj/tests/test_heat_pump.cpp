#include <doctest.h>

#include <cmath>
#include <limits>

#include "bems/heat_pump.hpp"
#include "bems/rng.hpp"

using namespace bems;
using namespace bems::heat_pump;

TEST_CASE("evaporator effectiveness limits") {
  HpParams p;
  p.ua_evp_pvt = 0.0;
  EvaporatorHeat e = evaporator_heat(15.0, 5.0, 0.0, p);
  CHECK(e.q_pvt == 0.0);

  p.ua_evp_pvt = std::numeric_limits<Real>::infinity();
  e = evaporator_heat(15.0, 5.0, 0.0, p);
  CHECK(e.q_pvt == doctest::Approx(p.mdot_pvt * p.cp_w * 15.0).epsilon(1e-12));

  // Sources below the evaporating temperature contribute nothing.
  p = HpParams{};
  e = evaporator_heat(-10.0, -8.0, 0.0, p);
  CHECK(e.q_pvt == 0.0);
  CHECK(e.q_air == 0.0);
  CHECK(e.q_total == 0.0);
}

TEST_CASE("evaporator heat matches an extended-precision re-evaluation") {
  HpParams p;
  p.ua_evp_pvt = 800.0;
  p.ua_evp_air = 1500.0;
  p.mdot_air = 1.0;
  const Real t_pvt = 15.0, t_amb = 5.0, t_evp = 0.0;
  const EvaporatorHeat e = evaporator_heat(t_pvt, t_amb, t_evp, p);
  auto oracle = [](long double w, long double ua, long double dt) {
    return static_cast<double>(w * dt * (1.0L - std::exp(-ua / w)));
  };
  CHECK(e.q_pvt == doctest::Approx(oracle(0.1L * 4186.0L, 800.0L, 15.0L)).epsilon(1e-12));
  CHECK(e.q_air == doctest::Approx(oracle(1.0L * 4186.0L, 1500.0L, 5.0L)).epsilon(1e-12));
  CHECK(e.q_total == doctest::Approx(e.q_pvt + e.q_air).epsilon(1e-15));
}

TEST_CASE("operating point honours the off state and the energy identity") {
  HpParams p;
  tess::TessParams tank;
  const HpOperatingPoint off = operating_point(false, 0.0, 20.0, 10.0, 50.0, p, tank);
  CHECK(off.p_electric == 0.0);
  CHECK(off.p_condenser == 0.0);
  CHECK(off.t_supply == 50.0);

  CHECK_THROWS(operating_point(true, 0.0, 20.0, 10.0, 50.0, p, tank));

  // Both sources pinned at the evaporating temperature: all heat comes from
  // the compressor, COP collapses to 1.
  HpParams pinch = p;
  pinch.evap_approach = 0.0;
  const HpOperatingPoint unit = operating_point(true, 5000.0, 8.0, 8.0, 50.0, pinch, tank);
  CHECK(unit.cop == doctest::Approx(1.0));
  CHECK(unit.p_condenser == doctest::Approx(unit.p_electric));

  Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    const Real t_pvt = rng.uniform(-10.0, 60.0);
    const Real t_amb = rng.uniform(-15.0, 35.0);
    const Real tes_out = rng.uniform(45.0, 94.0);
    const Real pe = rng.uniform(p.p_e_min_on, p.p_e_max);
    const HpOperatingPoint op = operating_point(true, pe, t_pvt, t_amb, tes_out, p, tank);
    CHECK(op.p_condenser == doctest::Approx(op.p_electric + op.p_evaporator).epsilon(1e-12));
    if (op.p_electric > 0.0) CHECK(op.cop >= 1.0 - 1e-12);
    CHECK(op.t_supply <= p.t_supply_max + 1e-9);
  }
}

TEST_CASE("condenser cap curtails delivery") {
  HpParams p;
  tess::TessParams tank;
  // Bottom segment nearly at the cap: almost no headroom.
  const HpOperatingPoint op = operating_point(true, p.p_e_max, 30.0, 20.0, 94.9, p, tank);
  const Real headroom = (p.t_supply_max - 94.9) * tank.mdot_loop * tank.cp_w;
  CHECK(op.p_condenser <= headroom + 1e-9);
  CHECK(op.t_supply <= p.t_supply_max + 1e-9);
  CHECK(op.p_condenser == doctest::Approx(op.p_electric + op.p_evaporator).epsilon(1e-12));
}

TEST_CASE("predicted COP is pure and monotone in ambient above the loop temperature") {
  HpParams p;
  tess::TessParams tank;
  CHECK(predict_cop(10.0, 15.0, 50.0, p, tank) ==
        doctest::Approx(predict_cop(10.0, 15.0, 50.0, p, tank)));

  // Sources at the evaporating temperature collapse to COP 1.
  HpParams pinch = p;
  pinch.evap_approach = 0.0;
  CHECK(predict_cop(12.0, 12.0, 50.0, pinch, tank) == doctest::Approx(1.0));

  // With ambient at or above the collector outlet, the pinch rides the
  // collector and extra ambient warmth only feeds the air evaporator.
  const Real t_pvt = 6.0;
  Real prev = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const Real t_amb = t_pvt + i * 0.5;
    const Real cop = predict_cop(t_amb, t_pvt, 55.0, p, tank);
    if (i > 0) CHECK(cop >= prev - 1e-12);
    prev = cop;
  }
}

TEST_CASE("daily energy audit closes exactly") {
  HpParams p;
  tess::TessParams tank;
  Rng rng(17);
  long double sum_th = 0.0L, sum_e = 0.0L, sum_evp = 0.0L;
  for (int i = 0; i < 1440; ++i) {
    const bool on = rng.uniform() < 0.6;
    const Real pe = on ? rng.uniform(p.p_e_min_on, p.p_e_max) : 0.0;
    const HpOperatingPoint op =
        operating_point(on, pe, rng.uniform(0.0, 40.0), rng.uniform(-5.0, 20.0),
                        rng.uniform(45.0, 90.0), p, tank);
    sum_th += op.p_condenser * 60.0;
    sum_e += op.p_electric * 60.0;
    sum_evp += op.p_evaporator * 60.0;
  }
  CHECK(std::abs(static_cast<double>(sum_th - sum_e - sum_evp)) <=
        1e-9 * std::abs(static_cast<double>(sum_th)));
}
