#pragma once

#include "bems/building.hpp"
#include "bems/types.hpp"

namespace bems::testutil {

// Fine-step RK4 oracle for the continuous building ODE with held inputs.
inline building::BuildingState rk4_rollout(const building::ContinuousDynamics& c,
                                           const building::BuildingState& x0, Real p_fcu,
                                           const building::DisturbanceSample& d, Real duration,
                                           Real h) {
  Vec3 dist(d.irradiance, d.t_amb, d.p_internal);
  auto f = [&](const Vec4& s) { return (c.a * s + c.b * p_fcu + c.e * dist).eval(); };
  Vec4 x = x0.t;
  Real t = 0.0;
  while (t < duration - 1e-12) {
    const Real step = std::min(h, duration - t);
    const Vec4 k1 = f(x);
    const Vec4 k2 = f(x + 0.5 * step * k1);
    const Vec4 k3 = f(x + 0.5 * step * k2);
    const Vec4 k4 = f(x + step * k3);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
  }
  building::BuildingState out;
  out.t = x;
  return out;
}

}  // namespace bems::testutil
