#include "bems/tess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bems::tess {

void TessParams::validate() const {
  if (!(m_total > 0.0)) throw std::invalid_argument("tess: m_total must be > 0");
  if (!(height > 0.0 && a_cross > 0.0 && a_surface > 0.0))
    throw std::invalid_argument("tess: geometry must be positive");
  if (!(cp_w > 0.0)) throw std::invalid_argument("tess: cp_w must be > 0");
  if (mdot_fcu < 0.0 || mdot_loop < 0.0) throw std::invalid_argument("tess: flows must be >= 0");
  if (mdot_fcu > mdot_loop)
    throw std::invalid_argument("tess: mdot_fcu must not exceed mdot_loop");
  if (!(t_min < t_max)) throw std::invalid_argument("tess: t_min must be < t_max");
  if (!(substep_s > 0.0 && substep_s <= 10.0))
    throw std::invalid_argument("tess: substep_s must lie in (0,10]");
}

TankGeometry tank_geometry(Real volume_m3, Real height_over_diameter) {
  // V = pi/4 d^2 h with h = r*d gives d = (4V / (pi r))^(1/3).
  const Real pi = 3.14159265358979323846;
  const Real d = std::cbrt(4.0 * volume_m3 / (pi * height_over_diameter));
  TankGeometry g;
  g.height = height_over_diameter * d;
  g.a_cross = pi * d * d / 4.0;
  g.a_surface = pi * d * g.height + 2.0 * g.a_cross;
  return g;
}

namespace {

void repair_stratification(Vec3& t) {
  // Buoyant mixing: equal-mass neighbours collapse to their mean until the
  // profile is ordered top-down.
  for (int pass = 0; pass < 3; ++pass) {
    bool ordered = true;
    for (int j = 0; j < 2; ++j) {
      if (t(j) < t(j + 1)) {
        const Real mean = 0.5 * (t(j) + t(j + 1));
        t(j) = mean;
        t(j + 1) = mean;
        ordered = false;
      }
    }
    if (ordered) break;
  }
}

}  // namespace

TessState step_tess(const TessState& s, Real t_in_loop, bool fcu_on, Real t_amb,
                    const TessParams& p, Real dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("tess: dt must be > 0");

  const Real c_seg = (p.m_total / 3.0) * p.cp_w;          // J/K
  const Real mc_loop = p.mdot_loop * p.cp_w;              // W/K
  const Real mc_fcu = (fcu_on ? p.mdot_fcu : 0.0) * p.cp_w;
  const Real loss = p.k_loss * p.a_surface / 3.0;         // W/K per segment
  const Real cond = p.k_water * p.a_cross / (p.height / 3.0);

  Vec3 t = s.t;
  Real remaining = dt;
  while (remaining > 0.0) {
    const Real h = std::min(p.substep_s, remaining);
    remaining -= h;

    const Real q1 = mc_loop * (t_in_loop - t(0)) - loss * (t(0) - t_amb) - cond * (t(0) - t(1));
    const Real q2 = (mc_loop - mc_fcu) * (t(0) - t(1)) - loss * (t(1) - t_amb) +
                    cond * ((t(0) - t(1)) - (t(1) - t(2)));
    const Real q3 = mc_fcu * p.t_fcu_return - mc_loop * t(2) + (mc_loop - mc_fcu) * t(1) -
                    loss * (t(2) - t_amb) + cond * (t(1) - t(2));

    t(0) += h * q1 / c_seg;
    t(1) += h * q2 / c_seg;
    t(2) += h * q3 / c_seg;
    repair_stratification(t);
  }

  TessState out;
  out.t = t;
  return out;
}

Real fcu_power(const TessState& s, bool fcu_on, const TessParams& p) {
  if (!fcu_on) return 0.0;
  return p.mdot_fcu * p.cp_w * (s.top() - p.t_fcu_return);
}

Real condenser_outlet(const TessState& s) { return s.bottom(); }

Real HeatingCurve::flow_temp(Real t_amb) const {
  return std::clamp(t0 - slope * t_amb, lo, hi);
}

std::vector<TessViolationReport> check_constraints(const TessState& s, Real t_flow,
                                                   const TessParams& p) {
  std::vector<TessViolationReport> out;
  auto add = [&out](TessViolation kind, const std::string& detail) {
    out.push_back({kind, detail});
  };
  if (s.top() > p.t_max) {
    std::ostringstream os;
    os << "top segment " << s.top() << " above max " << p.t_max;
    add(TessViolation::TopAboveMax, os.str());
  }
  for (int j = 0; j < 2; ++j) {
    if (s.t(j) < s.t(j + 1)) {
      std::ostringstream os;
      os << "segment " << (j + 2) << " warmer than segment " << (j + 1);
      add(TessViolation::OrderInverted, os.str());
    }
  }
  if (s.bottom() < t_flow) {
    std::ostringstream os;
    os << "bottom segment " << s.bottom() << " below flow temperature " << t_flow;
    add(TessViolation::BottomBelowFlow, os.str());
  }
  return out;
}

}  // namespace bems::tess
