#include "bems/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bems/building.hpp"
#include "bems/csv.hpp"
#include "bems/heat_pump.hpp"
#include "bems/tess.hpp"
#include "bems/thermostat.hpp"

namespace fs = std::filesystem;

namespace bems::sim {

void DayInputs::validate() const {
  if (static_cast<int>(weather.size()) != kSubslotsPerDay)
    throw std::runtime_error("day inputs: weather must have 1440 rows, got " +
                             std::to_string(weather.size()));
  if (static_cast<int>(price_slots.size()) != kSlotsPerDay)
    throw std::runtime_error("day inputs: price must have 48 rows, got " +
                             std::to_string(price_slots.size()));
  if (static_cast<int>(p_e_building.size()) != kSubslotsPerDay ||
      static_cast<int>(p_internal.size()) != kSubslotsPerDay)
    throw std::runtime_error("day inputs: loads must have 1440 rows");
  for (size_t i = 0; i < weather.size(); ++i) {
    if (weather[i].g < 0.0 || weather[i].g_beam < 0.0 || weather[i].g_diff < 0.0)
      throw std::runtime_error("day inputs: negative irradiance at minute " + std::to_string(i));
  }
  for (Real p : price_slots) {
    if (p < 0.0) throw std::runtime_error("day inputs: negative price");
  }
  for (size_t i = 0; i < p_e_building.size(); ++i) {
    if (p_e_building[i] < 0.0 || p_internal[i] < 0.0)
      throw std::runtime_error("day inputs: negative load at minute " + std::to_string(i));
  }
}

namespace {

Real cell(const CsvTable& t, size_t row, int col, const char* what) {
  if (col < 0)
    throw std::runtime_error(t.path + ": missing column '" + std::string(what) + "'");
  return t.rows[row][col];
}

std::vector<pvt::PvtWeather> read_weather_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (static_cast<int>(t.rows.size()) != kSubslotsPerDay)
    throw std::runtime_error(path + ": expected 1440 data rows, got " +
                             std::to_string(t.rows.size()));
  const int cg = t.column("G"), cgb = t.column("Gb"), cgd = t.column("Gd");
  const int cta = t.column("Tamb"), cw = t.column("wind"), cel = t.column("EL");
  std::vector<pvt::PvtWeather> out(kSubslotsPerDay);
  for (size_t i = 0; i < t.rows.size(); ++i) {
    pvt::PvtWeather w;
    w.g = cell(t, i, cg, "G");
    w.g_beam = cell(t, i, cgb, "Gb");
    w.g_diff = cell(t, i, cgd, "Gd");
    w.t_amb = cell(t, i, cta, "Tamb");
    w.wind = cell(t, i, cw, "wind");
    w.e_longwave = cell(t, i, cel, "EL");
    if (w.g < 0.0 || w.g_beam < 0.0 || w.g_diff < 0.0)
      throw std::runtime_error(path + ":" + std::to_string(t.line_numbers[i]) +
                               ": negative irradiance");
    // Incidence angle is not part of the schema; beam geometry is
    // reconstructed by consumers from the site configuration when needed.
    out[i] = w;
  }
  return out;
}

}  // namespace

DayInputs load_inputs(const std::string& day_dir, int day_of_year) {
  DayInputs in;
  in.day_of_year = day_of_year;
  in.weather = read_weather_csv(day_dir + "/weather.csv");

  const CsvTable price = read_csv(day_dir + "/price.csv");
  if (static_cast<int>(price.rows.size()) != kSlotsPerDay)
    throw std::runtime_error(day_dir + "/price.csv: expected " + std::to_string(kSlotsPerDay) +
                             " data rows, got " + std::to_string(price.rows.size()));
  const int cp = price.column("price_cents_per_kwh");
  for (size_t i = 0; i < price.rows.size(); ++i) {
    const Real v = cell(price, i, cp, "price_cents_per_kwh");
    if (v < 0.0)
      throw std::runtime_error(price.path + ":" + std::to_string(price.line_numbers[i]) +
                               ": negative price");
    in.price_slots.push_back(v);
  }

  const CsvTable loads = read_csv(day_dir + "/loads.csv");
  if (static_cast<int>(loads.rows.size()) != kSubslotsPerDay)
    throw std::runtime_error(day_dir + "/loads.csv: expected 1440 data rows, got " +
                             std::to_string(loads.rows.size()));
  const int ce = loads.column("Pe_building_W");
  const int ci = loads.column("Pth_internal_W");
  for (size_t i = 0; i < loads.rows.size(); ++i) {
    const Real pe = cell(loads, i, ce, "Pe_building_W");
    const Real pi = cell(loads, i, ci, "Pth_internal_W");
    if (pe < 0.0 || pi < 0.0)
      throw std::runtime_error(loads.path + ":" + std::to_string(loads.line_numbers[i]) +
                               ": negative load");
    in.p_e_building.push_back(pe);
    in.p_internal.push_back(pi);
  }

  const fs::path hist = fs::path(day_dir) / "history";
  if (fs::is_directory(hist)) {
    std::vector<fs::path> days;
    for (const auto& e : fs::directory_iterator(hist)) {
      if (e.is_directory()) days.push_back(e.path());
    }
    std::sort(days.begin(), days.end());
    for (const auto& d : days) {
      const auto weather = read_weather_csv((d / "weather.csv").string());
      forecast::IrradianceDay gday;
      gday.label = d.filename().string();
      gday.day_of_year = 1;
      // Directory names of the form YYYY-MM-DD carry the calendar metadata.
      int y, mo, dd;
      if (sscanf(gday.label.c_str(), "%d-%d-%d", &y, &mo, &dd) == 3) {
        gday.day_of_year = forecast::day_of_year(y, mo, dd);
      }
      gday.g.resize(kSubslotsPerDay);
      for (int m = 0; m < kSubslotsPerDay; ++m) gday.g[m] = weather[m].g;
      in.history.irradiance.push_back(std::move(gday));

      const CsvTable temps = read_csv((d / "temps.csv").string());
      if (temps.rows.size() != 96)
        throw std::runtime_error(temps.path + ": expected 96 data rows, got " +
                                 std::to_string(temps.rows.size()));
      const int ct = temps.column("Tamb_C");
      forecast::TemperatureDay tday;
      tday.label = in.history.irradiance.back().label;
      tday.day_of_year = in.history.irradiance.back().day_of_year;
      for (size_t q = 0; q < temps.rows.size(); ++q) tday.t_amb.push_back(cell(temps, q, ct, "Tamb_C"));
      in.history.temperature.push_back(std::move(tday));
    }
  }

  in.validate();
  return in;
}

void write_inputs(const DayInputs& inputs, const std::string& day_dir) {
  fs::create_directories(day_dir);
  {
    CsvWriter w(day_dir + "/weather.csv", {"minute", "G", "Gb", "Gd", "Tamb", "wind", "EL"});
    for (int m = 0; m < kSubslotsPerDay; ++m) {
      const auto& s = inputs.weather[m];
      w.write_row({static_cast<Real>(m), s.g, s.g_beam, s.g_diff, s.t_amb, s.wind, s.e_longwave});
    }
  }
  {
    CsvWriter w(day_dir + "/price.csv", {"slot", "price_cents_per_kwh"});
    for (int k = 0; k < kSlotsPerDay; ++k)
      w.write_row({static_cast<Real>(k + 1), inputs.price_slots[k]});
  }
  {
    CsvWriter w(day_dir + "/loads.csv", {"minute", "Pe_building_W", "Pth_internal_W"});
    for (int m = 0; m < kSubslotsPerDay; ++m)
      w.write_row({static_cast<Real>(m), inputs.p_e_building[m], inputs.p_internal[m]});
  }
  for (size_t d = 0; d < inputs.history.irradiance.size(); ++d) {
    const auto& g = inputs.history.irradiance[d];
    const fs::path dir = fs::path(day_dir) / "history" / g.label;
    fs::create_directories(dir);
    {
      CsvWriter w((dir / "weather.csv").string(),
                  {"minute", "G", "Gb", "Gd", "Tamb", "wind", "EL"});
      const auto& t = inputs.history.temperature[d];
      for (int m = 0; m < kSubslotsPerDay; ++m) {
        // The archive carries irradiance plus quarter-hour temperatures; the
        // remaining columns are zero placeholders.
        w.write_row({static_cast<Real>(m), g.g[m], 0.0, 0.0, t.t_amb[std::min(95, m / 15)], 0.0,
                     0.0});
      }
    }
    {
      CsvWriter w((dir / "temps.csv").string(), {"quarter", "Tamb_C"});
      const auto& t = inputs.history.temperature[d];
      for (int q = 0; q < 96; ++q) w.write_row({static_cast<Real>(q), t.t_amb[q]});
    }
  }
}

RunResult run_closed_loop(const DayInputs& inputs, const SimOptions& opts,
                          const SystemParams& sys, const mpc::MpcConfig& cfg) {
  inputs.validate();
  sys.validate();

  const building::LinearDynamics dyn60 =
      building::discretize(building::build_continuous_matrices(sys.building), kSubslotSeconds);

  building::BuildingState bld =
      building::steady_state_for_indoor(sys.building, opts.t_in_init, inputs.weather[0].t_amb);
  tess::TessState tank = tess::TessState::uniform(opts.tank_init);
  pvt::PvtState collector;
  collector.t_out = inputs.weather[0].t_amb;
  Real t_in_pvt = collector.t_out;

  thermostat::ThermostatOutput prev_cmd;
  // The heating system is assumed to have been running before midnight, so
  // held-inside-band hysteresis starts in the on state.
  prev_cmd.hp_on = true;
  prev_cmd.fcu_on = true;
  std::vector<Real> realized_g(kSubslotsPerDay), realized_t_amb(kSubslotsPerDay);
  for (int m = 0; m < kSubslotsPerDay; ++m) {
    realized_g[m] = inputs.weather[m].g;
    realized_t_amb[m] = inputs.weather[m].t_amb;
  }

  SimulationLog log;
  log.rows.reserve(kSubslotsPerDay);

  for (int k = 1; k <= kSlotsPerDay; ++k) {
    const int idx0 = (k - 1) * kSubslotsPerSlot;

    mpc::PlantMeasurement meas;
    meas.building = bld;
    meas.tank = tank;
    meas.t_out_pvt = collector.t_out;
    const auto& boundary = inputs.weather[idx0 > 0 ? idx0 - 1 : 0];
    meas.t_amb = boundary.t_amb;
    meas.g = boundary.g;

    bool u_hp = false, u_fcu = false;
    Real p_e_set = 0.0;
    SlotSolveRecord solve;
    solve.slot = k;

    if (opts.controller == ControllerKind::Thermostat) {
      const auto cmd = thermostat::thermostat_step(sys.thermostat, bld.t_in(), tank.top(), prev_cmd);
      u_hp = cmd.hp_on;
      u_fcu = cmd.fcu_on;
      p_e_set = u_hp ? sys.heat_pump.p_e_max : 0.0;
      solve.status = -1;
    } else {
      mpc::ControllerInputs cin;
      cin.k_now = k;
      cin.measurement = meas;
      cin.price_slots = inputs.price_slots;
      cin.p_e_building = inputs.p_e_building;
      cin.p_internal = inputs.p_internal;
      cin.day_of_year = inputs.day_of_year;
      cin.observed_g.assign(realized_g.begin(), realized_g.begin() + idx0);
      const int quarters = 2 * (k - 1);
      cin.observed_t_amb_quarters.resize(quarters);
      for (int q = 0; q < quarters; ++q) {
        Real acc = 0.0;
        for (int m = 0; m < 15; ++m) acc += realized_t_amb[q * 15 + m];
        cin.observed_t_amb_quarters[q] = acc / 15.0;
      }
      cin.realized_g = &realized_g;
      cin.realized_t_amb = &realized_t_amb;
      cin.prev_hp_on = prev_cmd.hp_on;
      cin.prev_fcu_on = prev_cmd.fcu_on;

      const auto t0 = std::chrono::steady_clock::now();
      const mpc::MpcDecision dec =
          mpc::step_controller(cin, inputs.history, opts.forecast_mode, cfg, sys, opts.seed);
      solve.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      u_hp = dec.first().hp_on;
      u_fcu = dec.first().fcu_on;
      p_e_set = dec.first().p_e_hp;
      solve.status = static_cast<int>(dec.status);
      solve.nodes = dec.stats.nodes;
      solve.iterations = dec.stats.lp_iterations;
      solve.objective_cents = dec.objective_cents;
      solve.comfort_slack = dec.comfort_slack;
      solve.used_fallback = dec.used_fallback ? 1 : 0;
      log.decisions.push_back(dec);

      if (k == 1 && !log.fan) {
        // Keep the first full forecast ensemble for the fan chart.
        if (opts.forecast_mode == mpc::ForecastMode::Knn) {
          forecast::KnnOptions ko;
          ko.k = cfg.knn_k;
          ko.n_scenarios = cfg.n_scenarios;
          const auto set = forecast::knn_scenarios(inputs.history, cin.observed_g,
                                                   inputs.day_of_year, 1, ko,
                                                   opts.seed * 1000003ull + 1ull);
          ScenarioFan fan;
          fan.start_subslot = 1;
          fan.lo = forecast::scenario_quantile(set, 0.0);
          fan.median = forecast::point_forecast(set);
          fan.hi = forecast::scenario_quantile(set, 1.0);
          log.fan = fan;
        } else {
          ScenarioFan fan;
          fan.start_subslot = 1;
          fan.lo = Vector::Map(realized_g.data(), kSubslotsPerDay);
          fan.median = fan.lo;
          fan.hi = fan.lo;
          log.fan = fan;
        }
      }
    }
    log.solves.push_back(solve);
    prev_cmd.hp_on = u_hp;
    prev_cmd.fcu_on = u_fcu;

    for (int m = 0; m < kSubslotsPerSlot; ++m) {
      const int idx = idx0 + m;
      const pvt::PvtWeather& w = inputs.weather[idx];

      const auto pvt_step = pvt::step_thermal(collector, t_in_pvt, w, sys.pvt, kSubslotSeconds);
      const Real t_pvt_in_used = t_in_pvt;
      collector = pvt_step.state;

      const auto op = heat_pump::operating_point(u_hp, u_hp ? p_e_set : 0.0, collector.t_out,
                                                 w.t_amb, tank.bottom(), sys.heat_pump, sys.tank);

      // The evaporator draw closes the collector loop.
      const Real mc_pvt = sys.pvt.mdot * sys.pvt.cp_w;
      Real q_from_pvt = 0.0;
      if (op.on && op.p_evaporator > 0.0) {
        const auto evp =
            heat_pump::evaporator_heat(collector.t_out, w.t_amb, op.t_evp, sys.heat_pump);
        const Real scale = evp.q_total > 0.0 ? op.p_evaporator / evp.q_total : 0.0;
        q_from_pvt = evp.q_pvt * scale;
      }
      t_in_pvt = mc_pvt > 0.0 ? collector.t_out - q_from_pvt / mc_pvt : collector.t_out;

      const Real p_fcu = tess::fcu_power(tank, u_fcu, sys.tank);
      tank = tess::step_tess(tank, op.t_supply, u_fcu, w.t_amb, sys.tank, kSubslotSeconds);

      building::DisturbanceSample dist;
      dist.irradiance = w.g;
      dist.t_amb = w.t_amb;
      dist.p_internal = inputs.p_internal[idx];
      bld = building::step_state(dyn60, bld, p_fcu, dist);

      const Real t_cell = pvt::cell_temperature(t_pvt_in_used, collector.t_out, sys.pvt);
      const auto pr = pvt::performance_ratio(w, t_cell, sys.pvt);
      const Real p_e_pvt = pvt::electrical_power(w, pr.total, sys.pvt);

      const Real p_grid = inputs.p_e_building[idx] + op.p_electric - p_e_pvt;

      SubslotRecord row;
      row.minute = idx;
      row.slot = k;
      row.g = w.g;
      row.g_beam = w.g_beam;
      row.g_diff = w.g_diff;
      row.t_amb = w.t_amb;
      row.wind = w.wind;
      row.e_longwave = w.e_longwave;
      row.price = inputs.price_slots[k - 1];
      row.u_hp = u_hp ? 1 : 0;
      row.u_fcu = u_fcu ? 1 : 0;
      row.p_e_hp = op.p_electric;
      row.p_th_hp = op.p_condenser;
      row.p_th_evp = op.p_evaporator;
      row.cop = op.cop;
      row.t_supply = op.t_supply;
      row.p_e_pvt = p_e_pvt;
      row.p_th_pvt = pvt_step.p_thermal;
      row.t_pvt_out = collector.t_out;
      row.t_pvt_in = t_in_pvt;
      row.t_tes1 = tank.top();
      row.t_tes2 = tank.middle();
      row.t_tes3 = tank.bottom();
      row.p_th_fcu = p_fcu;
      row.t_wall_ex = bld.t_wall_ex();
      row.t_wall_in = bld.t_wall_in();
      row.t_itm = bld.t_itm();
      row.t_in = bld.t_in();
      row.p_e_building = inputs.p_e_building[idx];
      row.p_internal = inputs.p_internal[idx];
      row.p_e_grid = p_grid;
      row.tess_violations = static_cast<int>(
          tess::check_constraints(tank, sys.heating_curve.flow_temp(w.t_amb), sys.tank).size());
      log.rows.push_back(row);
    }
  }

  RunResult result;
  result.kpis = compute_kpis(log.rows, cfg.comfort_lo, cfg.comfort_hi, cfg.feed_in_factor);
  result.log = std::move(log);
  return result;
}

Kpis compute_kpis(const std::vector<SubslotRecord>& rows, Real comfort_lo, Real comfort_hi,
                  Real feed_in_factor) {
  Kpis k;
  long double energy_ws = 0.0L;
  long double cost = 0.0L;
  for (const auto& r : rows) {
    energy_ws += static_cast<long double>(r.p_e_grid) * kSubslotSeconds;
    const Real import_w = std::max(r.p_e_grid, 0.0);
    const Real export_w = std::max(-r.p_e_grid, 0.0);
    const long double kwh_imp = static_cast<long double>(import_w) * kSubslotSeconds / 3.6e6L;
    const long double kwh_exp = static_cast<long double>(export_w) * kSubslotSeconds / 3.6e6L;
    cost += r.price * (kwh_imp - feed_in_factor * kwh_exp);
    if (r.t_in < comfort_lo - 1e-9 || r.t_in > comfort_hi + 1e-9) {
      ++k.comfort_violation_minutes;
      k.comfort_violation_k_min +=
          std::max(comfort_lo - r.t_in, r.t_in - comfort_hi);
    }
    k.hp_runtime_minutes += r.u_hp;
    k.peak_import_w = std::max(k.peak_import_w, import_w);
  }
  k.net_energy_kwh = static_cast<Real>(energy_ws / 3.6e6L);
  k.cost_cents = static_cast<Real>(cost);
  return k;
}

Real pearson_correlation(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("correlation: series must match and be nonempty");
  const size_t n = x.size();
  Real mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Real sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

CompareReport compare_logs(const std::vector<SubslotRecord>& a,
                           const std::vector<SubslotRecord>& b, Real comfort_lo, Real comfort_hi,
                           Real feed_in_factor) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("compare: logs must cover the same day");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].g != b[i].g || a[i].t_amb != b[i].t_amb || a[i].price != b[i].price ||
        a[i].p_e_building != b[i].p_e_building || a[i].p_internal != b[i].p_internal) {
      throw std::invalid_argument("compare: logs were produced from different inputs (minute " +
                                  std::to_string(i) + ")");
    }
  }
  CompareReport rep;
  rep.a = compute_kpis(a, comfort_lo, comfort_hi, feed_in_factor);
  rep.b = compute_kpis(b, comfort_lo, comfort_hi, feed_in_factor);
  auto percent = [](Real va, Real vb) { return vb != 0.0 ? 100.0 * (vb - va) / vb : 0.0; };
  rep.energy_saving_percent = percent(rep.a.net_energy_kwh, rep.b.net_energy_kwh);
  rep.cost_saving_percent = percent(rep.a.cost_cents, rep.b.cost_cents);

  std::vector<Real> price(a.size()), imp_a(a.size()), imp_b(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    price[i] = a[i].price;
    imp_a[i] = std::max(a[i].p_e_grid, 0.0);
    imp_b[i] = std::max(b[i].p_e_grid, 0.0);
  }
  rep.price_import_correlation_a = pearson_correlation(price, imp_a);
  rep.price_import_correlation_b = pearson_correlation(price, imp_b);

  std::ostringstream os;
  os << "metric,a,b,improvement_percent\n";
  os << "net_energy_kwh," << format_double(rep.a.net_energy_kwh) << ','
     << format_double(rep.b.net_energy_kwh) << ',' << format_double(rep.energy_saving_percent)
     << '\n';
  os << "cost_cents," << format_double(rep.a.cost_cents) << ',' << format_double(rep.b.cost_cents)
     << ',' << format_double(rep.cost_saving_percent) << '\n';
  os << "comfort_violation_minutes," << rep.a.comfort_violation_minutes << ','
     << rep.b.comfort_violation_minutes << ",\n";
  os << "hp_runtime_minutes," << rep.a.hp_runtime_minutes << ',' << rep.b.hp_runtime_minutes
     << ",\n";
  os << "peak_import_w," << format_double(rep.a.peak_import_w) << ','
     << format_double(rep.b.peak_import_w) << ",\n";
  os << "price_import_correlation," << format_double(rep.price_import_correlation_a) << ','
     << format_double(rep.price_import_correlation_b) << ",\n";
  rep.text = os.str();
  return rep;
}

namespace {

const std::vector<std::string> kLogHeader = {
    "minute", "slot", "G", "Gb", "Gd", "Tamb", "wind", "EL", "price", "u_hp", "u_fcu",
    "P_e_hp", "P_th_hp", "P_th_evp", "COP", "T_supply", "P_e_pvt", "P_th_pvt", "T_pvt_out",
    "T_pvt_in", "T_tes1", "T_tes2", "T_tes3", "P_th_fcu", "T_wall_ex", "T_wall_in", "T_itm",
    "T_in", "P_e_building", "P_th_internal", "P_e_grid", "tess_violations"};

std::vector<Real> row_values(const SubslotRecord& r) {
  return {static_cast<Real>(r.minute),
          static_cast<Real>(r.slot),
          r.g,
          r.g_beam,
          r.g_diff,
          r.t_amb,
          r.wind,
          r.e_longwave,
          r.price,
          static_cast<Real>(r.u_hp),
          static_cast<Real>(r.u_fcu),
          r.p_e_hp,
          r.p_th_hp,
          r.p_th_evp,
          r.cop,
          r.t_supply,
          r.p_e_pvt,
          r.p_th_pvt,
          r.t_pvt_out,
          r.t_pvt_in,
          r.t_tes1,
          r.t_tes2,
          r.t_tes3,
          r.p_th_fcu,
          r.t_wall_ex,
          r.t_wall_in,
          r.t_itm,
          r.t_in,
          r.p_e_building,
          r.p_internal,
          r.p_e_grid,
          static_cast<Real>(r.tess_violations)};
}

}  // namespace

void write_log_csv(const std::string& path, const std::vector<SubslotRecord>& rows) {
  CsvWriter w(path, kLogHeader);
  for (const auto& r : rows) w.write_row(row_values(r));
}

std::vector<SubslotRecord> read_log_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header != kLogHeader) throw std::runtime_error(path + ": unexpected log.csv header");
  std::vector<SubslotRecord> rows(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& v = t.rows[i];
    SubslotRecord r;
    int c = 0;
    r.minute = static_cast<int>(v[c++]);
    r.slot = static_cast<int>(v[c++]);
    r.g = v[c++];
    r.g_beam = v[c++];
    r.g_diff = v[c++];
    r.t_amb = v[c++];
    r.wind = v[c++];
    r.e_longwave = v[c++];
    r.price = v[c++];
    r.u_hp = static_cast<int>(v[c++]);
    r.u_fcu = static_cast<int>(v[c++]);
    r.p_e_hp = v[c++];
    r.p_th_hp = v[c++];
    r.p_th_evp = v[c++];
    r.cop = v[c++];
    r.t_supply = v[c++];
    r.p_e_pvt = v[c++];
    r.p_th_pvt = v[c++];
    r.t_pvt_out = v[c++];
    r.t_pvt_in = v[c++];
    r.t_tes1 = v[c++];
    r.t_tes2 = v[c++];
    r.t_tes3 = v[c++];
    r.p_th_fcu = v[c++];
    r.t_wall_ex = v[c++];
    r.t_wall_in = v[c++];
    r.t_itm = v[c++];
    r.t_in = v[c++];
    r.p_e_building = v[c++];
    r.p_internal = v[c++];
    r.p_e_grid = v[c++];
    r.tess_violations = static_cast<int>(v[c++]);
    rows[i] = r;
  }
  return rows;
}

void write_kpis_csv(const std::string& path, const Kpis& k) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "metric,value\n";
  out << "net_energy_kwh," << format_double(k.net_energy_kwh) << '\n';
  out << "cost_cents," << format_double(k.cost_cents) << '\n';
  out << "comfort_violation_minutes," << k.comfort_violation_minutes << '\n';
  out << "comfort_violation_k_min," << format_double(k.comfort_violation_k_min) << '\n';
  out << "hp_runtime_minutes," << k.hp_runtime_minutes << '\n';
  out << "peak_import_w," << format_double(k.peak_import_w) << '\n';
}

void write_decisions_csv(const std::string& path, const std::vector<mpc::MpcDecision>& decisions) {
  CsvWriter w(path, {"solve_slot", "slot", "scenario", "u_hp", "u_fcu", "P_e_hp_W", "P_grid_W",
                     "T_in_pred", "T_tes1_pred", "T_tes2_pred", "T_tes3_pred", "objective_cents",
                     "comfort_slack", "status", "used_fallback"});
  for (const auto& d : decisions) {
    for (size_t j = 0; j < d.schedule.size(); ++j) {
      const auto& sd = d.schedule[j];
      const int n_scen = d.prediction.p_grid.size() > 0 ? d.prediction.p_grid.cols() : 0;
      if (n_scen == 0) {
        w.write_row({static_cast<Real>(d.k_now), static_cast<Real>(sd.slot), 0.0,
                     static_cast<Real>(sd.hp_on), static_cast<Real>(sd.fcu_on), sd.p_e_hp, 0.0,
                     0.0, 0.0, 0.0, 0.0, d.objective_cents, d.comfort_slack,
                     static_cast<Real>(static_cast<int>(d.status)),
                     static_cast<Real>(d.used_fallback)});
        continue;
      }
      for (int s = 0; s < n_scen; ++s) {
        w.write_row({static_cast<Real>(d.k_now), static_cast<Real>(sd.slot),
                     static_cast<Real>(s), static_cast<Real>(sd.hp_on),
                     static_cast<Real>(sd.fcu_on), sd.p_e_hp, d.prediction.p_grid(j, s),
                     d.prediction.t_in(j, s), d.prediction.t_tes_top(j, s),
                     d.prediction.t_tes_mid(j, s), d.prediction.t_tes_bot(j, s),
                     d.objective_cents, d.comfort_slack,
                     static_cast<Real>(static_cast<int>(d.status)),
                     static_cast<Real>(d.used_fallback)});
      }
    }
  }
}

void write_solves_csv(const std::string& path, const std::vector<SlotSolveRecord>& solves) {
  CsvWriter w(path, {"slot", "status", "nodes", "iterations", "objective_cents", "comfort_slack",
                     "used_fallback", "wall_seconds"});
  for (const auto& s : solves) {
    w.write_row({static_cast<Real>(s.slot), static_cast<Real>(s.status),
                 static_cast<Real>(s.nodes), static_cast<Real>(s.iterations), s.objective_cents,
                 s.comfort_slack, static_cast<Real>(s.used_fallback), s.wall_seconds});
  }
}

namespace {

struct Series {
  std::string name;
  std::vector<Real> values;
};

void write_svg(const std::string& path, const std::string& title,
               const std::vector<Series>& series) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const int width = 960, height = 400, ml = 70, mr = 20, mt = 36, mb = 40;
  Real lo = 0.0, hi = 1.0;
  bool first = true;
  size_t n = 0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (Real v : s.values) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const Real pw = width - ml - mr, ph = height - mt - mb;
  auto xpix = [&](size_t i) { return ml + pw * (n > 1 ? static_cast<Real>(i) / (n - 1) : 0.5); };
  auto ypix = [&](Real v) { return mt + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\">" << title
      << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << (mt + ph)
      << "\" stroke=\"#444\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << (mt + ph) << "\" x2=\"" << (ml + pw) << "\" y2=\""
      << (mt + ph) << "\" stroke=\"#444\"/>\n";
  for (int g = 0; g <= 4; ++g) {
    const Real v = lo + (hi - lo) * g / 4.0;
    const Real y = ypix(v);
    out << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << (ml + pw) << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"4\" y=\"" << (y + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(std::round(v * 100.0) / 100.0) << "</text>\n";
  }
  for (int hrs = 0; hrs <= 24; hrs += 6) {
    const size_t i = std::min<size_t>(n > 0 ? n - 1 : 0, hrs * 60);
    out << "<text x=\"" << xpix(i) << "\" y=\"" << (height - 12)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << hrs << "h</text>\n";
  }
  int ci = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[ci % 6] << "\" stroke-width=\"1.2\" points=\"";
    for (size_t i = 0; i < s.values.size(); ++i) {
      out << xpix(i) << ',' << ypix(s.values[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << (ml + 8 + 150 * ci) << "\" y=\"" << (mt - 6)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colors[ci % 6] << "\">"
        << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

std::vector<Real> column(const std::vector<SubslotRecord>& rows, Real SubslotRecord::*field) {
  std::vector<Real> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].*field;
  return out;
}

}  // namespace

void emit_plots(const SimulationLog& log, const std::string& out_dir) {
  if (log.rows.empty()) throw std::invalid_argument("emit_plots: empty log");
  fs::create_directories(out_dir);
  const auto& rows = log.rows;

  // Irradiance and the forecast fan.
  {
    std::vector<Real> fan_lo(rows.size(), 0.0), fan_med(rows.size(), 0.0), fan_hi(rows.size(), 0.0);
    if (log.fan) {
      for (int i = 0; i < log.fan->lo.size(); ++i) {
        const size_t at = log.fan->start_subslot - 1 + i;
        if (at < rows.size()) {
          fan_lo[at] = log.fan->lo(i);
          fan_med[at] = log.fan->median(i);
          fan_hi[at] = log.fan->hi(i);
        }
      }
    }
    CsvWriter w(out_dir + "/irradiance.csv", {"minute", "G", "fan_lo", "fan_median", "fan_hi"});
    for (size_t i = 0; i < rows.size(); ++i) {
      w.write_row({static_cast<Real>(rows[i].minute), rows[i].g, fan_lo[i], fan_med[i], fan_hi[i]});
    }
    write_svg(out_dir + "/irradiance.svg", "Irradiance: realized vs forecast fan",
              {{"G", column(rows, &SubslotRecord::g)},
               {"fan_lo", fan_lo},
               {"fan_median", fan_med},
               {"fan_hi", fan_hi}});
  }

  // Device states and thermal powers.
  {
    CsvWriter w(out_dir + "/devices.csv",
                {"minute", "u_hp", "u_fcu", "P_e_hp", "P_th_hp", "P_th_fcu"});
    for (const auto& r : rows) {
      w.write_row({static_cast<Real>(r.minute), static_cast<Real>(r.u_hp),
                   static_cast<Real>(r.u_fcu), r.p_e_hp, r.p_th_hp, r.p_th_fcu});
    }
    std::vector<Real> uhp(rows.size()), ufcu(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      uhp[i] = rows[i].u_hp;
      ufcu[i] = rows[i].u_fcu;
    }
    write_svg(out_dir + "/devices.svg", "Device commands and delivered powers (W)",
              {{"P_e_hp", column(rows, &SubslotRecord::p_e_hp)},
               {"P_th_hp", column(rows, &SubslotRecord::p_th_hp)},
               {"P_th_fcu", column(rows, &SubslotRecord::p_th_fcu)}});
  }

  // Temperatures.
  {
    CsvWriter w(out_dir + "/temperatures.csv",
                {"minute", "T_in", "T_tes1", "T_tes2", "T_tes3", "Tamb"});
    for (const auto& r : rows) {
      w.write_row({static_cast<Real>(r.minute), r.t_in, r.t_tes1, r.t_tes2, r.t_tes3, r.t_amb});
    }
    write_svg(out_dir + "/temperatures.svg", "Indoor and storage temperatures (degC)",
              {{"T_in", column(rows, &SubslotRecord::t_in)},
               {"T_tes1", column(rows, &SubslotRecord::t_tes1)},
               {"T_tes2", column(rows, &SubslotRecord::t_tes2)},
               {"T_tes3", column(rows, &SubslotRecord::t_tes3)},
               {"Tamb", column(rows, &SubslotRecord::t_amb)}});
  }

  // Grid exchange against the tariff.
  {
    CsvWriter w(out_dir + "/grid.csv", {"minute", "P_e_grid", "P_e_pvt", "price"});
    for (const auto& r : rows) {
      w.write_row({static_cast<Real>(r.minute), r.p_e_grid, r.p_e_pvt, r.price});
    }
    write_svg(out_dir + "/grid.svg", "Net grid exchange (W) and price (c/kWh)",
              {{"P_e_grid", column(rows, &SubslotRecord::p_e_grid)},
               {"P_e_pvt", column(rows, &SubslotRecord::p_e_pvt)},
               {"price", column(rows, &SubslotRecord::price)}});
  }
}

}  // namespace bems::sim
