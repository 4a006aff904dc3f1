#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bems/config.hpp"
#include "bems/forecast.hpp"
#include "bems/milp.hpp"
#include "bems/params.hpp"
#include "bems/types.hpp"

namespace bems::mpc {

struct MpcConfig {
  int n_scenarios = 100;   // forecast ensemble size
  int n_reduced = 5;       // scenarios embedded in the optimization
  int knn_k = 20;
  Real comfort_lo = 19.0;  // deg C
  Real comfort_hi = 23.0;
  Real comfort_margin = 0.1;  // tightening applied inside the optimizer
  Real tes_lo = 45.0;
  Real tes_hi = 95.0;
  Real slack_penalty = 1e6;   // cents per K.slot of comfort violation
  Real feed_in_factor = 1.0;  // export price multiplier
  milp::SolverOptions solver{.time_limit_s = 20.0,
                             .node_limit = 200000,
                             .iteration_budget = 400000,
                             .early_stop_gap = 0.002};

  void validate() const;
};

MpcConfig mpc_config_from_config(const KeyValueConfig& cfg);

// Slot-boundary plant information handed to the controller. Wall and mass
// temperatures ride along with the indoor reading: the controller assumes
// full state knowledge rather than carrying an observer.
struct PlantMeasurement {
  building::BuildingState building;
  tess::TessState tank;
  Real t_out_pvt = 15.0;  // deg C
  Real t_amb = 10.0;      // deg C
  Real g = 0.0;           // W/m^2
};

struct SlotDecision {
  int slot = 1;  // 1-based day slot
  bool hp_on = false;
  bool fcu_on = false;
  Real p_e_hp = 0.0;  // W commanded draw
};

// Per-(slot, scenario) optimizer predictions, horizon rows by scenario cols.
struct ScenarioPrediction {
  Matrix p_grid;  // W, sign-free
  Matrix t_in;
  Matrix t_tes_top, t_tes_mid, t_tes_bot;
};

struct MpcDecision {
  int k_now = 1;
  std::vector<SlotDecision> schedule;  // slots k_now..48
  ScenarioPrediction prediction;
  Real objective_cents = 0.0;  // energy-cost part, recomputed on the solution
  Real comfort_slack = 0.0;    // scenario-averaged predicted violation, K.slot
  milp::SolveStatus status = milp::SolveStatus::Infeasible;
  milp::SolveStats stats;
  bool used_fallback = false;

  const SlotDecision& first() const { return schedule.front(); }
};

// Keeps the n_red member paths nearest (L2 over the remaining horizon) to the
// pointwise quantile trajectories spanning 5%..95%; identity when n_red
// covers the whole set.
forecast::ScenarioSet reduce_scenarios(const forecast::ScenarioSet& s, int n_red);

// Repeats each slot value over its 30 sub-slots.
std::vector<Real> expand_slot_values(const std::vector<Real>& slots);

// Everything the optimizer needs at the start of slot k_now.
struct ProblemInputs {
  int k_now = 1;
  PlantMeasurement measurement;
  forecast::ScenarioSet scenarios;  // start_subslot must equal 30(k_now-1)+1
  Vector t_amb_slots;               // slots k_now..48, deg C
  std::vector<Real> price_slots;    // full day, cents/kWh
  std::vector<Real> p_e_building;   // 1440 samples, W
  std::vector<Real> p_internal;     // 1440 samples, W
};

// Column bookkeeping for decoding a solved problem.
struct BuiltProblem {
  milp::Problem problem;
  int horizon = 0;
  int n_scen = 0;
  int k_now = 1;
  std::vector<int> col_u_hp, col_u_fcu, col_p_hp;       // per horizon slot
  std::vector<std::vector<int>> col_p_grid;             // [slot][scenario]
  std::vector<std::vector<std::array<int, 4>>> col_bld; // [slot][scenario] -> state columns
  std::vector<std::vector<std::array<int, 3>>> col_tes;
  std::vector<std::vector<std::array<int, 2>>> col_slack;
  std::vector<std::vector<std::array<int, 2>>> col_w;   // fcu-gated top/mid products
  Matrix cop_hat;      // [slot][scenario]
  Matrix pvt_e_slot;   // W, slot-mean electrical yield per scenario
  Matrix g_slot;       // W/m^2 scenario slot means
  std::vector<Real> price;  // per horizon slot, cents/kWh
};

BuiltProblem build_problem(const ProblemInputs& in, const MpcConfig& cfg,
                           const SystemParams& sys);

MpcDecision decode_solution(const BuiltProblem& bp, const milp::Solution& sol);

enum class ForecastMode { Knn, Perfect };

struct ControllerInputs {
  int k_now = 1;
  PlantMeasurement measurement;
  std::vector<Real> price_slots;    // 48
  std::vector<Real> p_e_building;   // 1440, W
  std::vector<Real> p_internal;     // 1440, W
  std::vector<Real> observed_g;     // sub-slots before k_now
  std::vector<Real> observed_t_amb_quarters;  // 15-minute means so far
  int day_of_year = 10;
  // Perfect-forecast support: realized traces for the whole day.
  const std::vector<Real>* realized_g = nullptr;       // 1440
  const std::vector<Real>* realized_t_amb = nullptr;   // 1440
  // Previous applied commands, used by the fallback rule.
  bool prev_hp_on = false;
  bool prev_fcu_on = false;
};

// One receding-horizon step: forecast, reduce, build, solve, decode. Only
// slot k_now of the returned schedule is meant to be actuated. A solver
// failure falls back to the hysteresis rule for one slot.
MpcDecision step_controller(const ControllerInputs& in, const forecast::HistoryStore& history,
                            ForecastMode mode, const MpcConfig& cfg, const SystemParams& sys,
                            std::uint64_t seed);

}  // namespace bems::mpc
