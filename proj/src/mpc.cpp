#include "bems/mpc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bems/solar.hpp"
#include "bems/thermostat.hpp"

namespace bems::mpc {

void MpcConfig::validate() const {
  if (n_scenarios < 1 || n_reduced < 1 || n_reduced > n_scenarios)
    throw std::invalid_argument("mpc: need 1 <= n_reduced <= n_scenarios");
  if (!(comfort_lo < comfort_hi)) throw std::invalid_argument("mpc: comfort bounds unordered");
  if (!(tes_lo < tes_hi)) throw std::invalid_argument("mpc: storage bounds unordered");
  if (comfort_margin < 0.0 || 2.0 * comfort_margin >= comfort_hi - comfort_lo)
    throw std::invalid_argument("mpc: comfort margin leaves no band");
  if (slack_penalty <= 0.0) throw std::invalid_argument("mpc: slack penalty must be positive");
  if (feed_in_factor < 0.0) throw std::invalid_argument("mpc: feed-in factor must be >= 0");
}

MpcConfig mpc_config_from_config(const KeyValueConfig& cfg) {
  MpcConfig m;
  m.n_scenarios = cfg.get_int("mpc.n_scenarios", m.n_scenarios);
  m.n_reduced = cfg.get_int("mpc.n_reduced", m.n_reduced);
  m.knn_k = cfg.get_int("mpc.knn_k", m.knn_k);
  m.comfort_lo = cfg.get_real("mpc.comfort_lo", m.comfort_lo);
  m.comfort_hi = cfg.get_real("mpc.comfort_hi", m.comfort_hi);
  m.comfort_margin = cfg.get_real("mpc.comfort_margin", m.comfort_margin);
  m.tes_lo = cfg.get_real("mpc.tes_lo", m.tes_lo);
  m.tes_hi = cfg.get_real("mpc.tes_hi", m.tes_hi);
  m.slack_penalty = cfg.get_real("mpc.slack_penalty", m.slack_penalty);
  m.feed_in_factor = cfg.get_real("mpc.feed_in_factor", m.feed_in_factor);
  m.solver.time_limit_s = cfg.get_real("mpc.solver.time_limit_s", m.solver.time_limit_s);
  m.solver.node_limit = cfg.get_int("mpc.solver.node_limit", static_cast<int>(m.solver.node_limit));
  m.solver.iteration_budget =
      cfg.get_int("mpc.solver.iteration_budget", static_cast<int>(m.solver.iteration_budget));
  m.solver.early_stop_gap = cfg.get_real("mpc.solver.early_stop_gap", m.solver.early_stop_gap);
  m.validate();
  return m;
}

forecast::ScenarioSet reduce_scenarios(const forecast::ScenarioSet& s, int n_red) {
  if (n_red < 1) throw std::invalid_argument("mpc: n_red must be positive");
  if (n_red >= s.count()) return s;

  forecast::ScenarioSet out;
  out.start_subslot = s.start_subslot;
  out.paths.resize(n_red, s.length());
  for (int q = 0; q < n_red; ++q) {
    const Real level = n_red == 1 ? 0.5 : 0.05 + 0.9 * q / (n_red - 1);
    const Vector target = forecast::scenario_quantile(s, level);
    int best = 0;
    Real best_d2 = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < s.count(); ++i) {
      const Real d2 = (s.paths.row(i).transpose() - target).squaredNorm();
      if (d2 < best_d2 - 1e-15) {
        best_d2 = d2;
        best = i;
      }
    }
    out.paths.row(q) = s.paths.row(best);
  }
  return out;
}

std::vector<Real> expand_slot_values(const std::vector<Real>& slots) {
  std::vector<Real> out;
  out.reserve(slots.size() * kSubslotsPerSlot);
  for (Real v : slots) {
    for (int i = 0; i < kSubslotsPerSlot; ++i) out.push_back(v);
  }
  return out;
}

namespace {

struct ScenarioRollout {
  Vector cop;         // per horizon slot
  Vector pvt_e_slot;  // W electrical, slot means
};

// Open-loop collector prediction along one irradiance path, extraction as if
// the heat pump ran continuously (the regime in which the COP estimate is
// consumed). The tank bottom is held at its measured value.
ScenarioRollout rollout_scenario(const Eigen::Ref<const Eigen::RowVectorXd>& path, int k_now,
                                 const Vector& t_amb_slots, Real t_out_pvt0, Real tes_bottom,
                                 const SystemParams& sys) {
  const int horizon = static_cast<int>(t_amb_slots.size());
  ScenarioRollout r;
  r.cop = Vector::Zero(horizon);
  r.pvt_e_slot = Vector::Zero(horizon);

  pvt::PvtState state;
  state.t_out = t_out_pvt0;
  Real t_in = t_out_pvt0;

  int cursor = 0;  // index into the path
  for (int j = 0; j < horizon; ++j) {
    const Real t_amb = t_amb_slots(j);
    r.cop(j) = heat_pump::predict_cop(t_amb, state.t_out, tes_bottom, sys.heat_pump, sys.tank);

    Real e_acc = 0.0;
    for (int m = 0; m < kSubslotsPerSlot; ++m, ++cursor) {
      const int minute = 30 * (k_now - 1 + j) + m;
      pvt::PvtWeather w;
      w.g = cursor < path.size() ? path(cursor) : 0.0;
      w.g_diff = sys.site.diffuse_fraction * w.g;
      w.g_beam = w.g - w.g_diff;
      w.theta = solar::incidence_angle(sys.site.latitude_deg, sys.site.tilt_deg,
                                       sys.site.day_of_year, minute);
      w.t_amb = t_amb;
      w.wind = 0.0;
      w.e_longwave = solar::sky_longwave(t_amb);

      const auto step = pvt::step_thermal(state, t_in, w, sys.pvt, kSubslotSeconds);
      state = step.state;

      const Real t_cell = pvt::cell_temperature(t_in, state.t_out, sys.pvt);
      const auto pr = pvt::performance_ratio(w, t_cell, sys.pvt);
      e_acc += pvt::electrical_power(w, pr.total, sys.pvt);

      // Evaporator extraction closes the collector loop.
      const Real t_evp = std::min(t_amb, state.t_out) - sys.heat_pump.evap_approach;
      const auto evp = heat_pump::evaporator_heat(state.t_out, t_amb, t_evp, sys.heat_pump);
      const Real mc = sys.pvt.mdot * sys.pvt.cp_w;
      t_in = mc > 0.0 ? state.t_out - evp.q_pvt / mc : state.t_out;
    }
    r.pvt_e_slot(j) = e_acc / kSubslotsPerSlot;
  }
  return r;
}

std::string tag(const char* base, int j, int s = -1) {
  std::string out = base;
  out += "_" + std::to_string(j);
  if (s >= 0) out += "_" + std::to_string(s);
  return out;
}

}  // namespace

BuiltProblem build_problem(const ProblemInputs& in, const MpcConfig& cfg,
                           const SystemParams& sys) {
  cfg.validate();
  sys.validate();
  if (in.k_now < 1 || in.k_now > kSlotsPerDay)
    throw std::invalid_argument("mpc: k_now out of range");
  const int horizon = kSlotsPerDay - in.k_now + 1;
  const int n_scen = in.scenarios.count();
  if (n_scen < 1) throw std::invalid_argument("mpc: empty scenario set");
  if (in.scenarios.start_subslot != kSubslotsPerSlot * (in.k_now - 1) + 1)
    throw std::invalid_argument("mpc: scenario start does not match k_now");
  if (static_cast<int>(in.t_amb_slots.size()) != horizon)
    throw std::invalid_argument("mpc: ambient forecast length mismatch");
  if (static_cast<int>(in.price_slots.size()) != kSlotsPerDay)
    throw std::invalid_argument("mpc: price series must cover 48 slots");
  if (static_cast<int>(in.p_e_building.size()) != kSubslotsPerDay ||
      static_cast<int>(in.p_internal.size()) != kSubslotsPerDay)
    throw std::invalid_argument("mpc: load series must cover 1440 sub-slots");

  BuiltProblem bp;
  bp.horizon = horizon;
  bp.n_scen = n_scen;
  bp.k_now = in.k_now;

  // Slot aggregates of the exogenous series.
  bp.g_slot.resize(horizon, n_scen);
  Vector load_e_kw = Vector::Zero(horizon);
  Vector p_int_slot = Vector::Zero(horizon);
  bp.price.resize(horizon);
  for (int j = 0; j < horizon; ++j) {
    const int base = (in.k_now - 1 + j) * kSubslotsPerSlot;
    Real le = 0.0, pi = 0.0;
    for (int m = 0; m < kSubslotsPerSlot; ++m) {
      le += in.p_e_building[base + m];
      pi += in.p_internal[base + m];
    }
    load_e_kw(j) = le / kSubslotsPerSlot / 1000.0;
    p_int_slot(j) = pi / kSubslotsPerSlot;
    bp.price[j] = in.price_slots[in.k_now - 1 + j];
    for (int s = 0; s < n_scen; ++s) {
      bp.g_slot(j, s) = in.scenarios.paths.row(s).segment(j * kSubslotsPerSlot, kSubslotsPerSlot).mean();
    }
  }

  // Per-scenario collector rollout for the COP estimate and electrical yield.
  bp.cop_hat.resize(horizon, n_scen);
  bp.pvt_e_slot.resize(horizon, n_scen);
  for (int s = 0; s < n_scen; ++s) {
    const ScenarioRollout r =
        rollout_scenario(in.scenarios.paths.row(s), in.k_now, in.t_amb_slots,
                         in.measurement.t_out_pvt, in.measurement.tank.bottom(), sys);
    bp.cop_hat.col(s) = r.cop;
    bp.pvt_e_slot.col(s) = r.pvt_e_slot;
  }

  const building::LinearDynamics dyn =
      building::discretize(building::build_continuous_matrices(sys.building), kSlotSeconds);

  const Real tes_hi_eff = std::min(cfg.tes_hi, sys.heat_pump.t_supply_max);
  const Real mc_loop = sys.tank.mdot_loop * sys.tank.cp_w;
  const Real mc_fcu = sys.tank.mdot_fcu * sys.tank.cp_w;
  const Real t_ret = sys.tank.t_fcu_return;
  const Real c_over_dt = (sys.tank.m_total / 3.0) * sys.tank.cp_w / kSlotSeconds;
  const Real loss = sys.tank.k_loss * sys.tank.a_surface / 3.0;
  const Real cond = sys.tank.k_water * sys.tank.a_cross / (sys.tank.height / 3.0);
  const Real p_max_kw = sys.heat_pump.p_e_max / 1000.0;
  const Real p_min_kw = sys.heat_pump.p_e_min_on / 1000.0;

  milp::Problem& p = bp.problem;

  // Shared decisions: one binary per slot per device, one modulation level.
  bp.col_u_hp.resize(horizon);
  bp.col_u_fcu.resize(horizon);
  bp.col_p_hp.resize(horizon);
  for (int j = 0; j < horizon; ++j) {
    const int k = in.k_now + j;
    bp.col_u_hp[j] = p.add_binary(tag("uhp", k));
    bp.col_u_fcu[j] = p.add_binary(tag("ufcu", k));
    bp.col_p_hp[j] = p.add_variable(tag("phe", k), 0.0, p_max_kw);
  }

  bp.col_p_grid.assign(horizon, std::vector<int>(n_scen, -1));
  bp.col_bld.assign(horizon, std::vector<std::array<int, 4>>(n_scen));
  bp.col_tes.assign(horizon, std::vector<std::array<int, 3>>(n_scen));
  bp.col_slack.assign(horizon, std::vector<std::array<int, 2>>(n_scen));
  bp.col_w.assign(horizon, std::vector<std::array<int, 2>>(n_scen));
  std::vector<std::vector<std::array<int, 2>>> col_impexp;
  const bool split_grid = cfg.feed_in_factor != 1.0;
  if (split_grid) col_impexp.assign(horizon, std::vector<std::array<int, 2>>(n_scen));

  for (int j = 0; j < horizon; ++j) {
    const int k = in.k_now + j;
    const Real t_flow = sys.heating_curve.flow_temp(in.t_amb_slots(j));
    const Real bot_lo = std::max(cfg.tes_lo, t_flow);
    for (int s = 0; s < n_scen; ++s) {
      auto& bld = bp.col_bld[j][s];
      for (int i = 0; i < 4; ++i) {
        bld[i] = p.add_variable(tag(i == 3 ? "tin" : (i == 0 ? "twe" : (i == 1 ? "twi" : "titm")), k, s),
                                -50.0, 150.0);
      }
      auto& tes = bp.col_tes[j][s];
      tes[0] = p.add_variable(tag("tes1", k, s), cfg.tes_lo, tes_hi_eff);
      tes[1] = p.add_variable(tag("tes2", k, s), cfg.tes_lo, tes_hi_eff);
      tes[2] = p.add_variable(tag("tes3", k, s), bot_lo, tes_hi_eff);
      bp.col_w[j][s][0] = p.add_variable(tag("w1", k, s), 0.0, tes_hi_eff);
      bp.col_w[j][s][1] = p.add_variable(tag("w2", k, s), 0.0, tes_hi_eff);
      bp.col_p_grid[j][s] = p.add_variable(tag("pgrid", k, s), -1e4, 1e4);
      bp.col_slack[j][s][0] = p.add_variable(tag("slo", k, s), 0.0, 60.0);
      bp.col_slack[j][s][1] = p.add_variable(tag("shi", k, s), 0.0, 60.0);
      if (split_grid) {
        col_impexp[j][s][0] = p.add_variable(tag("pimp", k, s), 0.0, 1e4);
        col_impexp[j][s][1] = p.add_variable(tag("pexp", k, s), 0.0, 1e4);
      }
    }
  }

  const Real w_scen = 1.0 / n_scen;
  for (int j = 0; j < horizon; ++j) {
    const int k = in.k_now + j;
    // Device linking: modulation only while on, and at least the minimum.
    p.add_constraint({{bp.col_p_hp[j], 1.0}, {bp.col_u_hp[j], -p_max_kw}}, milp::Relation::LessEqual,
                     0.0, tag("hp_on", k));
    p.add_constraint({{bp.col_p_hp[j], 1.0}, {bp.col_u_hp[j], -p_min_kw}},
                     milp::Relation::GreaterEqual, 0.0, tag("hp_min", k));

    for (int s = 0; s < n_scen; ++s) {
      const auto& bld = bp.col_bld[j][s];
      const auto& tes = bp.col_tes[j][s];
      const int w1 = bp.col_w[j][s][0];
      const int w2 = bp.col_w[j][s][1];
      const int u_fcu = bp.col_u_fcu[j];
      const int u_hp = bp.col_u_hp[j];
      const int p_hp = bp.col_p_hp[j];

      // Building dynamics, zero-order hold over the slot. The fan-coil input
      // is mc_fcu (w1 - t_ret u_fcu) in W.
      const Vec3 dist(bp.g_slot(j, s), in.t_amb_slots(j), p_int_slot(j));
      const Vec3 ed_rhs = dist;
      for (int i = 0; i < 4; ++i) {
        std::vector<std::pair<int, Real>> terms;
        terms.emplace_back(bld[i], 1.0);
        terms.emplace_back(w1, -dyn.b_d(i) * mc_fcu);
        terms.emplace_back(u_fcu, dyn.b_d(i) * mc_fcu * t_ret);
        Real rhs = dyn.e_d.row(i).dot(ed_rhs);
        if (j == 0) {
          rhs += dyn.a_d.row(i).dot(in.measurement.building.t);
        } else {
          const auto& prev = bp.col_bld[j - 1][s];
          for (int l = 0; l < 4; ++l) terms.emplace_back(prev[l], -dyn.a_d(i, l));
        }
        p.add_constraint(std::move(terms), milp::Relation::Equal, rhs, tag("bld", k, s) + "_" + std::to_string(i));
      }

      // Storage dynamics, backward Euler over the slot with fluxes at the
      // end-of-slot temperatures; u_fcu T products run through w1/w2.
      {
        std::vector<std::pair<int, Real>> r1{{tes[0], c_over_dt + mc_loop + loss + cond},
                                             {tes[2], -mc_loop},
                                             {tes[1], -cond}};
        Real rhs1 = loss * in.t_amb_slots(j);
        std::vector<std::pair<int, Real>> r2{{tes[1], c_over_dt + mc_loop + loss + 2.0 * cond},
                                             {tes[0], -(mc_loop + cond)},
                                             {tes[2], -cond},
                                             {w1, mc_fcu},
                                             {w2, -mc_fcu}};
        Real rhs2 = loss * in.t_amb_slots(j);
        std::vector<std::pair<int, Real>> r3{{tes[2], c_over_dt + mc_loop + loss + cond},
                                             {tes[1], -(mc_loop + cond)},
                                             {w2, mc_fcu},
                                             {u_fcu, -mc_fcu * t_ret}};
        Real rhs3 = loss * in.t_amb_slots(j);

        // Condenser delivery feeds the top segment.
        r1.emplace_back(p_hp, -1000.0 * bp.cop_hat(j, s));

        if (j == 0) {
          rhs1 += c_over_dt * in.measurement.tank.t(0);
          rhs2 += c_over_dt * in.measurement.tank.t(1);
          rhs3 += c_over_dt * in.measurement.tank.t(2);
        } else {
          const auto& prev = bp.col_tes[j - 1][s];
          r1.emplace_back(prev[0], -c_over_dt);
          r2.emplace_back(prev[1], -c_over_dt);
          r3.emplace_back(prev[2], -c_over_dt);
        }
        p.add_constraint(std::move(r1), milp::Relation::Equal, rhs1, tag("tes_a", k, s));
        p.add_constraint(std::move(r2), milp::Relation::Equal, rhs2, tag("tes_b", k, s));
        p.add_constraint(std::move(r3), milp::Relation::Equal, rhs3, tag("tes_c", k, s));
      }

      // McCormick envelopes for w = u_fcu * T over [tes_lo, tes_hi_eff].
      for (int piece = 0; piece < 2; ++piece) {
        const int w = bp.col_w[j][s][piece];
        const int tcol = tes[piece];
        p.add_constraint({{w, 1.0}, {u_fcu, -tes_hi_eff}}, milp::Relation::LessEqual, 0.0);
        p.add_constraint({{w, 1.0}, {u_fcu, -cfg.tes_lo}}, milp::Relation::GreaterEqual, 0.0);
        p.add_constraint({{w, 1.0}, {tcol, -1.0}, {u_fcu, cfg.tes_lo}}, milp::Relation::LessEqual,
                         cfg.tes_lo);
        p.add_constraint({{w, 1.0}, {tcol, -1.0}, {u_fcu, -tes_hi_eff}},
                         milp::Relation::GreaterEqual, -tes_hi_eff);
      }

      // Stratification order.
      p.add_constraint({{tes[1], 1.0}, {tes[0], -1.0}}, milp::Relation::LessEqual, 0.0);
      p.add_constraint({{tes[2], 1.0}, {tes[1], -1.0}}, milp::Relation::LessEqual, 0.0);

      // Condenser supply cap.
      p.add_constraint({{tes[2], mc_loop}, {p_hp, 1000.0 * bp.cop_hat(j, s)}},
                       milp::Relation::LessEqual, mc_loop * sys.heat_pump.t_supply_max,
                       tag("cap", k, s));

      // Electrical balance in kW: p_grid = load + p_hp - pvt.
      p.add_constraint({{bp.col_p_grid[j][s], 1.0}, {p_hp, -1.0}}, milp::Relation::Equal,
                       load_e_kw(j) - bp.pvt_e_slot(j, s) / 1000.0, tag("bal", k, s));

      // Comfort band with soft violations.
      p.add_constraint({{bld[3], 1.0}, {bp.col_slack[j][s][0], 1.0}}, milp::Relation::GreaterEqual,
                       cfg.comfort_lo + cfg.comfort_margin, tag("cmf_lo", k, s));
      p.add_constraint({{bld[3], 1.0}, {bp.col_slack[j][s][1], -1.0}}, milp::Relation::LessEqual,
                       cfg.comfort_hi - cfg.comfort_margin, tag("cmf_hi", k, s));

      // Objective: expected energy cost plus the comfort penalty.
      const Real cents_per_kw = bp.price[j] * 0.5 * w_scen;
      if (split_grid) {
        p.add_constraint({{bp.col_p_grid[j][s], 1.0},
                          {col_impexp[j][s][0], -1.0},
                          {col_impexp[j][s][1], 1.0}},
                         milp::Relation::Equal, 0.0);
        p.add_objective_term(col_impexp[j][s][0], cents_per_kw);
        p.add_objective_term(col_impexp[j][s][1], -cfg.feed_in_factor * cents_per_kw);
      } else {
        p.add_objective_term(bp.col_p_grid[j][s], cents_per_kw);
      }
      p.add_objective_term(bp.col_slack[j][s][0], cfg.slack_penalty * w_scen);
      p.add_objective_term(bp.col_slack[j][s][1], cfg.slack_penalty * w_scen);
    }
  }

  return bp;
}

MpcDecision decode_solution(const BuiltProblem& bp, const milp::Solution& sol) {
  MpcDecision d;
  d.k_now = bp.k_now;
  d.status = sol.status;
  d.stats = sol.stats;
  if (!sol.has_values) return d;

  const Vector& x = sol.values;
  d.schedule.resize(bp.horizon);
  d.prediction.p_grid.resize(bp.horizon, bp.n_scen);
  d.prediction.t_in.resize(bp.horizon, bp.n_scen);
  d.prediction.t_tes_top.resize(bp.horizon, bp.n_scen);
  d.prediction.t_tes_mid.resize(bp.horizon, bp.n_scen);
  d.prediction.t_tes_bot.resize(bp.horizon, bp.n_scen);

  Real cost = 0.0, slack = 0.0;
  const Real w_scen = 1.0 / bp.n_scen;
  for (int j = 0; j < bp.horizon; ++j) {
    SlotDecision& sd = d.schedule[j];
    sd.slot = bp.k_now + j;
    sd.hp_on = x(bp.col_u_hp[j]) > 0.5;
    sd.fcu_on = x(bp.col_u_fcu[j]) > 0.5;
    sd.p_e_hp = x(bp.col_p_hp[j]) * 1000.0;
    for (int s = 0; s < bp.n_scen; ++s) {
      const Real grid_kw = x(bp.col_p_grid[j][s]);
      d.prediction.p_grid(j, s) = grid_kw * 1000.0;
      d.prediction.t_in(j, s) = x(bp.col_bld[j][s][3]);
      d.prediction.t_tes_top(j, s) = x(bp.col_tes[j][s][0]);
      d.prediction.t_tes_mid(j, s) = x(bp.col_tes[j][s][1]);
      d.prediction.t_tes_bot(j, s) = x(bp.col_tes[j][s][2]);
      cost += bp.price[j] * 0.5 * w_scen * grid_kw;
      slack += w_scen * (x(bp.col_slack[j][s][0]) + x(bp.col_slack[j][s][1]));
    }
  }
  d.objective_cents = cost;
  d.comfort_slack = slack;
  return d;
}

namespace {

std::vector<Real> slot_means(const std::vector<Real>& minutes, int k_from) {
  std::vector<Real> out;
  for (int k = k_from; k <= kSlotsPerDay; ++k) {
    Real acc = 0.0;
    for (int m = 0; m < kSubslotsPerSlot; ++m) acc += minutes[(k - 1) * kSubslotsPerSlot + m];
    out.push_back(acc / kSubslotsPerSlot);
  }
  return out;
}

// Exact duplicate rows collapse to one copy; with uniform weights this only
// shrinks the problem when the whole ensemble degenerates (e.g. the perfect
// forecast), where expectations are unaffected.
forecast::ScenarioSet dedupe_identical(const forecast::ScenarioSet& s) {
  bool all_same = true;
  for (int i = 1; i < s.count() && all_same; ++i) {
    all_same = (s.paths.row(i) == s.paths.row(0));
  }
  if (!all_same) return s;
  forecast::ScenarioSet out;
  out.start_subslot = s.start_subslot;
  out.paths = s.paths.topRows(1);
  return out;
}

}  // namespace

MpcDecision step_controller(const ControllerInputs& in, const forecast::HistoryStore& history,
                            ForecastMode mode, const MpcConfig& cfg, const SystemParams& sys,
                            std::uint64_t seed) {
  cfg.validate();
  const int kappa0 = kSubslotsPerSlot * (in.k_now - 1) + 1;

  ProblemInputs pin;
  pin.k_now = in.k_now;
  pin.measurement = in.measurement;
  pin.price_slots = in.price_slots;
  pin.p_e_building = in.p_e_building;
  pin.p_internal = in.p_internal;

  if (mode == ForecastMode::Perfect) {
    if (!in.realized_g || !in.realized_t_amb)
      throw std::invalid_argument("mpc: perfect forecast requires realized traces");
    forecast::ScenarioSet set;
    set.start_subslot = kappa0;
    const int len = kSubslotsPerDay - kappa0 + 1;
    set.paths.resize(1, len);
    for (int t = 0; t < len; ++t) set.paths(0, t) = (*in.realized_g)[kappa0 - 1 + t];
    pin.scenarios = set;
    const std::vector<Real> means = slot_means(*in.realized_t_amb, in.k_now);
    pin.t_amb_slots = Vector::Map(means.data(), means.size());
  } else {
    forecast::KnnOptions ko;
    ko.k = cfg.knn_k;
    ko.n_scenarios = cfg.n_scenarios;
    // One deterministic stream per (seed, slot).
    const std::uint64_t slot_seed = seed * 1000003ull + static_cast<std::uint64_t>(in.k_now);
    const forecast::ScenarioSet full =
        forecast::knn_scenarios(history, in.observed_g, in.day_of_year, kappa0, ko, slot_seed);
    pin.scenarios = reduce_scenarios(full, std::min(cfg.n_reduced, full.count()));
    pin.t_amb_slots =
        forecast::forecast_ambient(history, in.observed_t_amb_quarters, in.day_of_year, in.k_now,
                                   cfg.knn_k);
  }
  pin.scenarios = dedupe_identical(pin.scenarios);

  const BuiltProblem bp = build_problem(pin, cfg, sys);
  milp::SolverOptions solver = cfg.solver;
  solver.seed = seed;
  const milp::Solution sol = milp::solve_milp(bp.problem, solver);

  if (sol.has_values) {
    MpcDecision d = decode_solution(bp, sol);
    return d;
  }

  // Optimizer produced nothing usable: hold the building with the hysteresis
  // rule for this slot and report the failure.
  MpcDecision d;
  d.k_now = in.k_now;
  d.status = sol.status;
  d.stats = sol.stats;
  d.used_fallback = true;
  thermostat::ThermostatOutput prev;
  prev.hp_on = in.prev_hp_on;
  prev.fcu_on = in.prev_fcu_on;
  const auto out =
      thermostat::thermostat_step(sys.thermostat, in.measurement.building.t_in(),
                                  in.measurement.tank.top(), prev);
  SlotDecision sd;
  sd.slot = in.k_now;
  sd.hp_on = out.hp_on;
  sd.fcu_on = out.fcu_on;
  sd.p_e_hp = out.hp_on ? sys.heat_pump.p_e_max : 0.0;
  d.schedule.push_back(sd);
  return d;
}

}  // namespace bems::mpc
