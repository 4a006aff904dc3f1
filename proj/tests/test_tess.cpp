#include <doctest.h>

#include <cmath>

#include "bems/rng.hpp"
#include "bems/tess.hpp"

using namespace bems;
using namespace bems::tess;

namespace {

// Straight transcription of the printed segment balances at a fixed small
// step, used as the fine-step oracle.
Vec3 explicit_oracle(Vec3 t, Real t_in_loop, bool fcu_on, Real t_amb, const TessParams& p,
                     Real duration, Real h) {
  const Real c_seg = (p.m_total / 3.0) * p.cp_w;
  const Real mc_loop = p.mdot_loop * p.cp_w;
  const Real mc_fcu = (fcu_on ? p.mdot_fcu : 0.0) * p.cp_w;
  const Real loss = p.k_loss * p.a_surface / 3.0;
  const Real cond = p.k_water * p.a_cross / (p.height / 3.0);
  for (Real time = 0.0; time < duration - 1e-9; time += h) {
    const Real q1 = mc_loop * (t_in_loop - t(0)) - loss * (t(0) - t_amb) - cond * (t(0) - t(1));
    const Real q2 = (mc_loop - mc_fcu) * (t(0) - t(1)) - loss * (t(1) - t_amb) +
                    cond * ((t(0) - t(1)) - (t(1) - t(2)));
    const Real q3 = mc_fcu * p.t_fcu_return - mc_loop * t(2) + (mc_loop - mc_fcu) * t(1) -
                    loss * (t(2) - t_amb) + cond * (t(1) - t(2));
    t(0) += h * q1 / c_seg;
    t(1) += h * q2 / c_seg;
    t(2) += h * q3 / c_seg;
  }
  return t;
}

}  // namespace

TEST_CASE("tank geometry reproduces the 2000 l, h/d = 4 vessel") {
  const TankGeometry g = tank_geometry(2.0, 4.0);
  CHECK(g.height / (g.height / 4.0) == doctest::Approx(4.0));
  CHECK(g.a_cross * g.height == doctest::Approx(2.0).epsilon(1e-9));
  TessParams p;
  CHECK(p.a_cross == doctest::Approx(g.a_cross).epsilon(1e-4));
  CHECK(p.a_surface == doctest::Approx(g.a_surface).epsilon(1e-4));
  CHECK(p.height == doctest::Approx(g.height).epsilon(1e-4));
}

TEST_CASE("all-equal temperatures with idle fan coil are a fixed point") {
  TessParams p;
  const Real temp = 55.0;
  TessState s = TessState::uniform(temp);
  const TessState next = step_tess(s, temp, false, temp, p, 1800.0);
  CHECK((next.t - s.t).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lossless steps conserve enthalpy to the flow-boundary identity") {
  TessParams p;
  p.k_loss = 0.0;
  p.k_water = 0.0;
  const Real c_seg = (p.m_total / 3.0) * p.cp_w;
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    TessState s;
    s.t(0) = rng.uniform(60.0, 90.0);
    s.t(1) = rng.uniform(50.0, s.t(0));
    s.t(2) = rng.uniform(45.0, s.t(1));
    const Real t_in = rng.uniform(45.0, 95.0);
    const bool fcu = rng.uniform() < 0.5;
    const Real dt = p.substep_s;  // single explicit update
    const TessState next = step_tess(s, t_in, fcu, 10.0, p, dt);
    const Real dh = c_seg * (next.t.sum() - s.t.sum());
    const Real mf = fcu ? p.mdot_fcu : 0.0;
    const Real expected = dt * p.cp_w *
                          (p.mdot_loop * t_in + mf * p.t_fcu_return - mf * s.t(0) -
                           p.mdot_loop * s.t(2));
    const Real scale = std::max(std::abs(expected), c_seg * 1e-3);
    CHECK(std::abs(dh - expected) / scale < 1e-9);
  }
}

TEST_CASE("coarse step matches the fine-step oracle") {
  TessParams p;
  TessState s;
  s.t << 75.0, 62.0, 50.0;
  const Real t_in = 68.0;
  const TessState coarse = step_tess(s, t_in, true, 15.0, p, 1800.0);
  const Vec3 fine = explicit_oracle(s.t, t_in, true, 15.0, p, 1800.0, 0.1);
  CHECK((coarse.t - fine).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("fan-coil power anchors") {
  TessParams p;
  TessState s;
  s.t << 60.0, 55.0, 50.0;
  CHECK(fcu_power(s, false, p) == 0.0);
  s.t(0) = p.t_fcu_return;
  CHECK(fcu_power(s, true, p) == doctest::Approx(0.0));
  p.mdot_fcu = 0.2;
  p.cp_w = 4186.0;
  p.t_fcu_return = 40.0;
  s.t(0) = 60.0;
  CHECK(fcu_power(s, true, p) == doctest::Approx(16744.0).epsilon(1e-12));
}

TEST_CASE("condenser draws from the bottom segment") {
  TessState s;
  s.t << 70.0, 60.0, 50.0;
  CHECK(condenser_outlet(s) == 50.0);
  CHECK(condenser_outlet(TessState::uniform(55.0)) == 55.0);

  // Across random trajectories the bottom never rises above the middle.
  TessParams p;
  Rng rng(5);
  TessState state;
  state.t << 80.0, 65.0, 52.0;
  for (int i = 0; i < 300; ++i) {
    const Real t_in = rng.uniform(50.0, 92.0);
    state = step_tess(state, t_in, rng.uniform() < 0.4, 12.0, p, 60.0);
    CHECK(condenser_outlet(state) <= state.middle() + 1e-12);
  }
}

TEST_CASE("constraint checker flags each violation kind") {
  TessParams p;
  TessState ok;
  ok.t << 90.0, 70.0, 50.0;
  CHECK(check_constraints(ok, 45.0, p).empty());

  TessState hot;
  hot.t << 96.0, 70.0, 50.0;
  auto v = check_constraints(hot, 45.0, p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == TessViolation::TopAboveMax);

  TessState inverted;
  inverted.t << 60.0, 70.0, 50.0;
  v = check_constraints(inverted, 45.0, p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == TessViolation::OrderInverted);

  TessState cold;
  cold.t << 60.0, 50.0, 40.0;
  v = check_constraints(cold, 45.0, p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == TessViolation::BottomBelowFlow);
}

TEST_CASE("stratification order is restored after aggressive steps") {
  TessParams p;
  Rng rng(9);
  TessState s;
  s.t << 70.0, 60.0, 50.0;
  for (int i = 0; i < 500; ++i) {
    const Real t_in = rng.uniform(40.0, 95.0);  // cold supply tries to invert
    s = step_tess(s, t_in, rng.uniform() < 0.5, rng.uniform(-5.0, 20.0), p, 120.0);
    CHECK(s.t(0) >= s.t(1) - 1e-12);
    CHECK(s.t(1) >= s.t(2) - 1e-12);
  }
}

TEST_CASE("an isolated tank relaxes towards ambient") {
  TessParams p;
  p.mdot_loop = 0.0;
  p.mdot_fcu = 0.0;
  const Real t_amb = 18.0;
  TessState s;
  s.t << 80.0, 70.0, 60.0;
  Real prev_gap = (s.t.array() - t_amb).abs().maxCoeff();
  for (int i = 0; i < 48; ++i) {
    s = step_tess(s, s.bottom(), false, t_amb, p, 1800.0);
    const Real gap = (s.t.array() - t_amb).abs().maxCoeff();
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;
  }
}

TEST_CASE("heating curve clamps to its band") {
  HeatingCurve hc;
  CHECK(hc.flow_temp(-30.0) == 50.0);
  CHECK(hc.flow_temp(-50.0) == 55.0);
  CHECK(hc.flow_temp(25.0) == 30.0);
  CHECK(hc.flow_temp(0.0) == doctest::Approx(38.0));
}
