#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bems/csv.hpp"
#include "bems/fixtures.hpp"
#include "bems/mpc.hpp"
#include "bems/params.hpp"
#include "bems/simulation.hpp"
#include "bems/synthetic.hpp"

namespace fs = std::filesystem;
using namespace bems;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
};

KeyValueConfig assemble_config(const CommonOpts& c) {
  KeyValueConfig cfg = KeyValueConfig::from_string(default_config_text(), "built-in defaults");
  if (!c.config_path.empty()) cfg.merge_file(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int run_simulate(const CommonOpts& common, const std::string& controller,
                 const std::string& day_dir, bool synthetic, std::uint64_t seed, int scenarios,
                 const std::string& out_dir, const std::string& forecast, bool write_inputs_flag) {
  const KeyValueConfig cfg = assemble_config(common);
  const SystemParams sys = system_params_from_config(cfg);
  mpc::MpcConfig mc = mpc::mpc_config_from_config(cfg);
  if (scenarios > 0) mc.n_scenarios = scenarios;

  sim::DayInputs day;
  if (!day_dir.empty() && fs::exists(fs::path(day_dir) / "weather.csv")) {
    day = sim::load_inputs(day_dir, sys.site.day_of_year);
  } else if (synthetic) {
    day = synth::synthetic_day(synth::synthetic_config_from(sys), seed);
  } else {
    std::cerr << "no weather.csv under '" << day_dir << "' and --synthetic not given\n";
    return 2;
  }

  sim::SimOptions opts;
  opts.controller =
      controller == "mpc" ? sim::ControllerKind::Mpc : sim::ControllerKind::Thermostat;
  opts.forecast_mode =
      forecast == "perfect" ? mpc::ForecastMode::Perfect : mpc::ForecastMode::Knn;
  opts.seed = seed;

  const sim::RunResult result = sim::run_closed_loop(day, opts, sys, mc);

  fs::create_directories(out_dir);
  sim::write_log_csv(out_dir + "/log.csv", result.log.rows);
  sim::write_kpis_csv(out_dir + "/kpis.csv", result.kpis);
  sim::write_decisions_csv(out_dir + "/decisions.csv", result.log.decisions);
  sim::write_solves_csv(out_dir + "/solves.csv", result.log.solves);
  sim::emit_plots(result.log, out_dir + "/plots");
  if (write_inputs_flag) sim::write_inputs(day, out_dir + "/inputs");

  std::cout << "controller: " << controller << "\n"
            << "net energy: " << result.kpis.net_energy_kwh << " kWh\n"
            << "cost: " << result.kpis.cost_cents << " cents\n"
            << "comfort violations: " << result.kpis.comfort_violation_minutes << " min\n"
            << "hp runtime: " << result.kpis.hp_runtime_minutes << " min\n"
            << "peak import: " << result.kpis.peak_import_w << " W\n"
            << "outputs in " << out_dir << "\n";
  return 0;
}

int run_compare(const CommonOpts& common, const std::string& a_path, const std::string& b_path) {
  const KeyValueConfig cfg = assemble_config(common);
  const mpc::MpcConfig mc = mpc::mpc_config_from_config(cfg);
  const auto a = sim::read_log_csv(a_path);
  const auto b = sim::read_log_csv(b_path);
  const auto rep = sim::compare_logs(a, b, mc.comfort_lo, mc.comfort_hi, mc.feed_in_factor);
  std::cout << rep.text;
  return 0;
}

int run_forecast(const CommonOpts& common, const std::string& day_dir, int at_slot,
                 std::uint64_t seed, const std::string& out_dir) {
  const KeyValueConfig cfg = assemble_config(common);
  const SystemParams sys = system_params_from_config(cfg);
  const mpc::MpcConfig mc = mpc::mpc_config_from_config(cfg);
  const sim::DayInputs day = sim::load_inputs(day_dir, sys.site.day_of_year);

  const int kappa0 = kSubslotsPerSlot * (at_slot - 1) + 1;
  std::vector<Real> observed(kappa0 - 1);
  for (int i = 0; i < kappa0 - 1; ++i) observed[i] = day.weather[i].g;

  forecast::KnnOptions ko;
  ko.k = mc.knn_k;
  ko.n_scenarios = mc.n_scenarios;
  const auto set =
      forecast::knn_scenarios(day.history, observed, day.day_of_year, kappa0, ko, seed);
  const Vector median = forecast::point_forecast(set);

  std::vector<Real> tamb_obs(2 * (at_slot - 1));
  for (size_t q = 0; q < tamb_obs.size(); ++q) {
    Real acc = 0.0;
    for (int m = 0; m < 15; ++m) acc += day.weather[q * 15 + m].t_amb;
    tamb_obs[q] = acc / 15.0;
  }
  const Vector ambient =
      forecast::forecast_ambient(day.history, tamb_obs, day.day_of_year, at_slot, mc.knn_k);

  fs::create_directories(out_dir);
  {
    CsvWriter w(out_dir + "/scenarios.csv", {"path", "subslot", "G"});
    for (int s = 0; s < set.count(); ++s) {
      for (int t = 0; t < set.length(); ++t) {
        w.write_row({static_cast<Real>(s), static_cast<Real>(set.start_subslot + t),
                     set.paths(s, t)});
      }
    }
  }
  {
    CsvWriter w(out_dir + "/point_forecast.csv", {"subslot", "G_median"});
    for (int t = 0; t < set.length(); ++t) {
      w.write_row({static_cast<Real>(set.start_subslot + t), median(t)});
    }
  }
  {
    CsvWriter w(out_dir + "/ambient_forecast.csv", {"slot", "Tamb_C"});
    for (int s = 0; s < ambient.size(); ++s) {
      w.write_row({static_cast<Real>(at_slot + s), ambient(s)});
    }
  }
  std::cout << set.count() << " scenario paths of length " << set.length() << " written to "
            << out_dir << "\n";
  return 0;
}

int run_fixtures(bool do_render, const std::string& repo_root) {
  if (do_render) {
    fixtures::render_fixtures(repo_root);
    std::cout << "docs/parameters.md rendered\n";
    return 0;
  }
  const auto rep = fixtures::validate_fixtures(repo_root);
  if (rep.ok) {
    std::cout << "fixtures: clean\n";
    return 0;
  }
  for (const auto& issue : rep.issues) {
    std::cout << "fixtures: " << issue.entry << ": " << issue.detail << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Building energy management simulator: plant models, receding-horizon "
               "optimizer, thermostat baseline"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "key-value configuration file");
  app.add_option("--set", common.overrides, "override a config key, e.g. --set hp.p_e_max=9000");

  auto* sim_cmd = app.add_subcommand("simulate", "run one closed-loop day");
  std::string controller = "thermostat", day_dir, out_dir = "out", forecast_mode = "knn";
  bool synthetic = false, write_inputs_flag = false;
  std::uint64_t seed = 1;
  int scenarios = 0;
  sim_cmd->add_option("--controller", controller, "mpc | thermostat")
      ->check(CLI::IsMember({"mpc", "thermostat"}));
  sim_cmd->add_option("--day", day_dir, "directory with weather/price/loads CSVs");
  sim_cmd->add_flag("--synthetic", synthetic, "generate the day when CSVs are absent");
  sim_cmd->add_option("--seed", seed, "random seed");
  sim_cmd->add_option("--scenarios", scenarios, "forecast ensemble size override");
  sim_cmd->add_option("--out", out_dir, "output directory");
  sim_cmd->add_option("--forecast", forecast_mode, "knn | perfect")
      ->check(CLI::IsMember({"knn", "perfect"}));
  sim_cmd->add_flag("--write-inputs", write_inputs_flag, "also write the day inputs as CSVs");

  auto* cmp_cmd = app.add_subcommand("compare", "compare two run logs");
  std::string a_path, b_path;
  cmp_cmd->add_option("--a", a_path, "first log.csv")->required();
  cmp_cmd->add_option("--b", b_path, "second log.csv")->required();

  auto* fc_cmd = app.add_subcommand("forecast", "scenario generation at a slot boundary");
  std::string fc_day;
  int at_slot = 1;
  std::uint64_t fc_seed = 1;
  std::string fc_out = "forecast_out";
  fc_cmd->add_option("--day", fc_day, "day directory (history/ required)")->required();
  fc_cmd->add_option("--at-slot", at_slot, "slot index 1..48")->required()
      ->check(CLI::Range(1, 48));
  fc_cmd->add_option("--seed", fc_seed, "random seed");
  fc_cmd->add_option("--out", fc_out, "output directory");

  auto* fx_cmd = app.add_subcommand("fixtures", "validate or re-render bundled parameter tables");
  bool fx_render = false;
  std::string repo_root = ".";
  fx_cmd->add_flag("--render", fx_render, "re-render docs/parameters.md");
  fx_cmd->add_option("--repo-root", repo_root, "repository root");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      return run_simulate(common, controller, day_dir, synthetic, seed, scenarios, out_dir,
                          forecast_mode, write_inputs_flag);
    }
    if (cmp_cmd->parsed()) return run_compare(common, a_path, b_path);
    if (fc_cmd->parsed()) return run_forecast(common, fc_day, at_slot, fc_seed, fc_out);
    if (fx_cmd->parsed()) return run_fixtures(fx_render, repo_root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
