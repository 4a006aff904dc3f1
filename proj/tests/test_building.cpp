#include <doctest.h>

#include <cmath>
#include <limits>

#include "bems/building.hpp"
#include "bems/rng.hpp"
#include "test_util.hpp"

using namespace bems;
using namespace bems::building;

namespace {
const Real kInf = std::numeric_limits<Real>::infinity();
}

TEST_CASE("decoupled nodes leave no off-diagonal couplings") {
  BuildingParams p;
  p.r_wall_ex = p.r_wall = p.r_wall_in = p.r_win = p.r_i = kInf;
  const ContinuousDynamics c = build_continuous_matrices(p);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(c.a(i, j) == 0.0);
    }
  }
}

TEST_CASE("input and disturbance entries follow the lumped capacities") {
  BuildingParams p;  // Table-style defaults, 50 m^2 floor
  const ContinuousDynamics c = build_continuous_matrices(p);
  CHECK(c.b(3) == doctest::Approx(1.0 / (3.69e3 * 50.0)).epsilon(1e-12));
  CHECK(c.b(3) == doctest::Approx(5.4200542005420054e-6).epsilon(1e-12));
  CHECK(c.e(0, 0) == doctest::Approx(p.alpha / p.c_wall_ex).epsilon(1e-12));
}

TEST_CASE("temperature-coupling row sums are non-positive") {
  BuildingParams p;
  const ContinuousDynamics c = build_continuous_matrices(p);
  // Couplings to ambient leak out of the a-matrix, so each row of a plus the
  // matching ambient column of e must cancel; a alone sums to <= 0.
  for (int i = 0; i < 4; ++i) {
    CHECK(c.a.row(i).sum() <= 1e-15);
    CHECK(std::abs(c.a.row(i).sum() + c.e(i, 1)) < 1e-15);
  }
}

TEST_CASE("invalid parameters are rejected") {
  BuildingParams p;
  p.r_wall = 0.0;
  CHECK_THROWS(build_continuous_matrices(p));
  p = BuildingParams{};
  p.c_in = -1.0;
  CHECK_THROWS(build_continuous_matrices(p));
}

TEST_CASE("discretize: zero dynamics give the identity") {
  ContinuousDynamics c;
  c.a.setZero();
  c.b.setZero();
  c.e.setZero();
  const LinearDynamics d = discretize(c, 123.0);
  CHECK((d.a_d - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(d.b_d.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("discretize: scalar RC decay matches the exponential series") {
  const Real rc = 600.0;
  const Real dt = 90.0;
  ContinuousDynamics c;
  c.a.setZero();
  c.b.setZero();
  c.e.setZero();
  c.a(0, 0) = -1.0 / rc;
  const LinearDynamics d = discretize(c, dt);
  // Independent oracle: truncated Taylor series of exp(-dt/rc).
  const Real z = -dt / rc;
  Real term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= z / k;
    sum += term;
  }
  CHECK(d.a_d(0, 0) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("discretize: two half steps compose to one full step") {
  BuildingParams p;
  const ContinuousDynamics c = build_continuous_matrices(p);
  const LinearDynamics full = discretize(c, 1800.0);
  const LinearDynamics half = discretize(c, 900.0);
  const Mat4 composed = half.a_d * half.a_d;
  CHECK((composed - full.a_d).cwiseAbs().maxCoeff() < 1e-12);
  // Input convolution composes as a_d(h) b_d(h) + b_d(h).
  const Vec4 b_comp = half.a_d * half.b_d + half.b_d;
  CHECK((b_comp - full.b_d).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solar gains split and conserve the window gain") {
  BuildingParams p;
  CHECK(solar_gains(0.0, p).p_wall == 0.0);
  CHECK(solar_gains(0.0, p).p_in == 0.0);
  CHECK(solar_gains(0.0, p).p_itm == 0.0);

  p.alpha = 0.6;
  p.a_wall = 60.0;
  CHECK(solar_gains(800.0, p).p_wall == doctest::Approx(28800.0).epsilon(1e-12));

  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Real g = rng.uniform(0.0, 1200.0);
    const SolarGains s = solar_gains(g, p);
    CHECK(s.p_in + s.p_itm == doctest::Approx(p.a_e_wind * g * p.shgc).epsilon(1e-12));
  }
  CHECK_THROWS(solar_gains(-1.0, p));
}

TEST_CASE("uniform state at ambient with no forcing is a fixed point") {
  BuildingParams p;
  const LinearDynamics d = discretize(build_continuous_matrices(p), 1800.0);
  const Real t_amb = 7.5;
  const BuildingState x = BuildingState::uniform(t_amb);
  const BuildingState next = step_state(d, x, 0.0, {0.0, t_amb, 0.0});
  CHECK((next.t - x.t).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("one ZOH step matches a fine RK4 rollout") {
  BuildingParams p;
  const ContinuousDynamics c = build_continuous_matrices(p);
  const LinearDynamics d = discretize(c, 1800.0);
  BuildingState x;
  x.t << 9.0, 13.0, 18.5, 19.5;
  const DisturbanceSample dist{450.0, 4.0, 350.0};
  const Real p_fcu = 6000.0;
  const BuildingState zoh = step_state(d, x, p_fcu, dist);
  const BuildingState rk4 = testutil::rk4_rollout(c, x, p_fcu, dist, 1800.0, 0.01);
  CHECK((zoh.t - rk4.t).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("step is linear in the state") {
  BuildingParams p;
  const LinearDynamics d = discretize(build_continuous_matrices(p), 60.0);
  const DisturbanceSample dist{200.0, 5.0, 100.0};
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    BuildingState x0, x1, x2, x12;
    for (int k = 0; k < 4; ++k) {
      x1.t(k) = rng.uniform(-5.0, 5.0);
      x2.t(k) = rng.uniform(-5.0, 5.0);
    }
    x0.t.setZero();
    x12.t = x1.t + x2.t;
    const Vec4 lhs = step_state(d, x12, 800.0, dist).t - step_state(d, x1, 800.0, dist).t -
                     step_state(d, x2, 800.0, dist).t + step_state(d, x0, 800.0, dist).t;
    CHECK(lhs.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("heating power never lowers the next indoor temperature") {
  BuildingParams p;
  for (const Real dt : {60.0, 1800.0}) {
    const LinearDynamics d = discretize(build_continuous_matrices(p), dt);
    CHECK(d.b_d(3) > 0.0);
    BuildingState x;
    x.t << 8.0, 14.0, 19.0, 19.2;
    const DisturbanceSample dist{100.0, 6.0, 200.0};
    const Real base = step_state(d, x, 1000.0, dist).t_in();
    const Real more = step_state(d, x, 2500.0, dist).t_in();
    CHECK(more >= base);
  }
}

TEST_CASE("discrete dynamics are stable for the default parameters") {
  BuildingParams p;
  for (const Real dt : {60.0, 1800.0}) {
    const LinearDynamics d = discretize(build_continuous_matrices(p), dt);
    const Eigen::EigenSolver<Mat4> eig(d.a_d);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(eig.eigenvalues()(i)) < 1.0);
  }
}

TEST_CASE("steady-state seed holds the requested indoor temperature") {
  BuildingParams p;
  const BuildingState s = steady_state_for_indoor(p, 19.7, 8.0);
  const LinearDynamics d = discretize(build_continuous_matrices(p), 60.0);
  // With the matching conduction flux injected through the fan-coil channel,
  // the profile should persist. Flux equals the wall-chain heat loss plus the
  // window loss.
  const LumpedRc rc = lump(p);
  const Real flux = (19.7 - 8.0) / (rc.r_wall_ex + rc.r_wall + rc.r_wall_in) +
                    (19.7 - 8.0) / rc.r_win;
  const BuildingState next = step_state(d, s, flux, {0.0, 8.0, 0.0});
  CHECK((next.t - s.t).cwiseAbs().maxCoeff() < 1e-6);
}
