#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bems/forecast.hpp"
#include "bems/mpc.hpp"
#include "bems/params.hpp"
#include "bems/pvt.hpp"
#include "bems/types.hpp"

namespace bems::sim {

struct DayInputs {
  std::vector<pvt::PvtWeather> weather;  // 1440 realized samples
  std::vector<Real> price_slots;         // 48, cents/kWh
  std::vector<Real> p_e_building;        // 1440, W
  std::vector<Real> p_internal;          // 1440, W
  forecast::HistoryStore history;
  int day_of_year = 10;

  void validate() const;
};

// Reads weather.csv / price.csv / loads.csv and the history directory.
// Schemas (header row required):
//   weather.csv: minute,G,Gb,Gd,Tamb,wind,EL            (1440 rows)
//   price.csv:   slot,price_cents_per_kwh               (48 rows)
//   loads.csv:   minute,Pe_building_W,Pth_internal_W    (1440 rows)
//   history/<day>/weather.csv and history/<day>/temps.csv (quarter,Tamb_C)
DayInputs load_inputs(const std::string& day_dir, int day_of_year);

void write_inputs(const DayInputs& inputs, const std::string& day_dir);

enum class ControllerKind { Mpc, Thermostat };

struct SimOptions {
  ControllerKind controller = ControllerKind::Thermostat;
  mpc::ForecastMode forecast_mode = mpc::ForecastMode::Knn;
  std::uint64_t seed = 1;
  Real t_in_init = 19.7;
  Real tank_init = 65.0;
};

struct SubslotRecord {
  int minute = 0;  // 0-based sub-slot index
  int slot = 1;
  Real g = 0, g_beam = 0, g_diff = 0, t_amb = 0, wind = 0, e_longwave = 0;
  Real price = 0;  // cents/kWh for the enclosing slot
  int u_hp = 0, u_fcu = 0;
  Real p_e_hp = 0, p_th_hp = 0, p_th_evp = 0, cop = 0, t_supply = 0;
  Real p_e_pvt = 0, p_th_pvt = 0, t_pvt_out = 0, t_pvt_in = 0;
  Real t_tes1 = 0, t_tes2 = 0, t_tes3 = 0, p_th_fcu = 0;
  Real t_wall_ex = 0, t_wall_in = 0, t_itm = 0, t_in = 0;
  Real p_e_building = 0, p_internal = 0, p_e_grid = 0;
  int tess_violations = 0;
};

struct SlotSolveRecord {
  int slot = 1;
  int status = 0;  // milp::SolveStatus as int; -1 for the thermostat rule
  std::int64_t nodes = 0;
  std::int64_t iterations = 0;
  Real objective_cents = 0.0;
  Real comfort_slack = 0.0;
  int used_fallback = 0;
  double wall_seconds = 0.0;  // excluded from deterministic outputs
};

// Scenario fan kept from the first optimizer call, for plotting.
struct ScenarioFan {
  int start_subslot = 1;
  Vector lo, median, hi;
};

struct SimulationLog {
  std::vector<SubslotRecord> rows;
  std::vector<SlotSolveRecord> solves;
  std::vector<mpc::MpcDecision> decisions;
  std::optional<ScenarioFan> fan;
};

struct Kpis {
  Real net_energy_kwh = 0.0;        // signed grid exchange
  Real cost_cents = 0.0;
  int comfort_violation_minutes = 0;
  Real comfort_violation_k_min = 0.0;
  int hp_runtime_minutes = 0;
  Real peak_import_w = 0.0;
};

struct RunResult {
  SimulationLog log;
  Kpis kpis;
};

RunResult run_closed_loop(const DayInputs& inputs, const SimOptions& opts,
                          const SystemParams& sys, const mpc::MpcConfig& cfg);

// Reduces a log to its day totals; the simulation's own KPIs come from this
// same reducer applied once at the end of the run.
Kpis compute_kpis(const std::vector<SubslotRecord>& rows, Real comfort_lo, Real comfort_hi,
                  Real feed_in_factor);

struct CompareReport {
  Kpis a, b;
  Real energy_saving_percent = 0.0;   // of a relative to b
  Real cost_saving_percent = 0.0;
  Real price_import_correlation_a = 0.0;
  Real price_import_correlation_b = 0.0;
  std::string text;
};

CompareReport compare_logs(const std::vector<SubslotRecord>& a,
                           const std::vector<SubslotRecord>& b, Real comfort_lo, Real comfort_hi,
                           Real feed_in_factor);

// CSV I/O for the run artifacts. log.csv round-trips bit-exactly.
void write_log_csv(const std::string& path, const std::vector<SubslotRecord>& rows);
std::vector<SubslotRecord> read_log_csv(const std::string& path);
void write_kpis_csv(const std::string& path, const Kpis& k);
void write_decisions_csv(const std::string& path, const std::vector<mpc::MpcDecision>& decisions);
void write_solves_csv(const std::string& path, const std::vector<SlotSolveRecord>& solves);

// Figure families rendered from the log: per-family data CSV plus an SVG.
void emit_plots(const SimulationLog& log, const std::string& out_dir);

Real pearson_correlation(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace bems::sim
