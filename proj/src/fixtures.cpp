#include "bems/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bems/params.hpp"
#include "bems/synthetic.hpp"

namespace bems::fixtures {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("fixtures: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct NamedValue {
  const char* key;
  double value;
};

// Compiled defaults keyed like the canonical files.
std::vector<NamedValue> building_defaults() {
  building::BuildingParams b;
  return {{"r_wall_ex", b.r_wall_ex}, {"r_wall", b.r_wall},     {"r_wall_in", b.r_wall_in},
          {"r_win", b.r_win},         {"r_i", b.r_i},           {"c_wall_ex", b.c_wall_ex},
          {"c_wall_in", b.c_wall_in}, {"c_in", b.c_in},         {"c_itm", b.c_itm}};
}

std::vector<NamedValue> pvt_defaults() {
  pvt::PvtParams p;
  return {{"area", p.area},
          {"eta0", p.eta0},
          {"k_d", p.k_d},
          {"b0_th", p.b0_th},
          {"c1", p.c1},
          {"c2", p.c2},
          {"c3", p.c3},
          {"c4", p.c4},
          {"c5", p.c_eff},
          {"c6", p.c6},
          {"r_pvt", p.r_pvt},
          {"b0_el", p.b0_el},
          {"eta_el_ref", p.eta_el_ref},
          {"a_g", p.a_g},
          {"b_g", p.b_g},
          {"c_g", p.c_g}};
}

void check_table(FixtureReport& rep, const std::string& entry, const KeyValueConfig& table,
                 const std::vector<NamedValue>& defaults) {
  for (const auto& nv : defaults) {
    if (!table.has(nv.key)) {
      rep.add(entry, std::string("missing key '") + nv.key + "'");
      continue;
    }
    const double file_value = table.get_real(nv.key, 0.0);
    if (file_value != nv.value) {
      char buf[160];
      snprintf(buf, sizeof(buf), "key '%s' drifted: file %.12g vs built-in %.12g", nv.key,
               file_value, nv.value);
      rep.add(entry, buf);
    }
  }
}

}  // namespace

std::string render_parameters_doc(const KeyValueConfig& building_table,
                                  const KeyValueConfig& pvt_table) {
  std::ostringstream os;
  os << "# Reference parameter tables\n\n";
  os << "Generated from `data/fixtures/`; regenerate with `bems fixtures --render`.\n";
  os << "Edit the canonical `.kv` files, never this page.\n\n";
  os << "## Building thermal network\n\n";
  os << "Area-specific values: resistances in m^2K/W, capacitances in J/m^2K.\n\n";
  os << "| key | value |\n|---|---|\n";
  for (const auto& [k, v] : building_table.entries()) os << "| " << k << " | " << v << " |\n";
  os << "\n## PVT collector coefficients\n\n";
  os << "| key | value |\n|---|---|\n";
  for (const auto& [k, v] : pvt_table.entries()) os << "| " << k << " | " << v << " |\n";
  os << "\nNotes: `c5` is carried as the collector's effective areal heat capacity;\n";
  os << "`beta_percent_per_k` is stored internally as a fraction per kelvin.\n";
  return os.str();
}

void render_fixtures(const std::string& repo_root) {
  const auto building = KeyValueConfig::from_file(repo_root + "/data/fixtures/building_rc.kv");
  const auto pvt = KeyValueConfig::from_file(repo_root + "/data/fixtures/pvt_coefficients.kv");
  std::ofstream out(repo_root + "/docs/parameters.md");
  if (!out) throw std::runtime_error("fixtures: cannot write docs/parameters.md");
  out << render_parameters_doc(building, pvt);
}

FixtureReport validate_fixtures(const std::string& repo_root) {
  FixtureReport rep;

  const auto manifest = KeyValueConfig::from_file(repo_root + "/data/fixtures/manifest.kv");
  const auto building =
      KeyValueConfig::from_file(repo_root + "/" + manifest.require_string("fixture.building_rc.path"));
  const auto pvt = KeyValueConfig::from_file(
      repo_root + "/" + manifest.require_string("fixture.pvt_coefficients.path"));

  // Canonical tables versus compiled defaults.
  check_table(rep, "building_rc", building, building_defaults());
  check_table(rep, "pvt_coefficients", pvt, pvt_defaults());

  // Default config versus canonical tables.
  const auto cfg = KeyValueConfig::from_string(default_config_text(), "default-config");
  for (const auto& nv : building_defaults()) {
    const std::string key = std::string("building.") + nv.key;
    if (cfg.get_real(key, std::nan("")) != building.get_real(nv.key, std::nan(""))) {
      rep.add("default-config", "key '" + key + "' disagrees with the canonical table");
    }
  }
  for (const char* key : {"area", "eta0", "k_d", "b0_th", "c1", "c2", "c3", "c4", "c6", "r_pvt",
                          "b0_el", "eta_el_ref", "a_g", "b_g", "c_g"}) {
    if (cfg.get_real(std::string("pvt.") + key, std::nan("")) !=
        pvt.get_real(key, std::nan(""))) {
      rep.add("default-config", std::string("key 'pvt.") + key +
                                     "' disagrees with the canonical table");
    }
  }
  if (cfg.get_real("pvt.c_eff", 0.0) != pvt.get_real("c5", -1.0)) {
    rep.add("default-config", "pvt.c_eff must equal the canonical c5");
  }
  {
    // Unit conversion tolerated to one part in 1e12 (decimal-to-binary
    // rounding differs between 0.37/100 and the stored fraction).
    const double want = pvt.get_real("beta_percent_per_k", -1.0) / 100.0;
    const double have_cfg = cfg.get_real("pvt.beta", 0.0);
    const double have_struct = pvt::PvtParams{}.beta;
    if (std::abs(have_cfg - want) > 1e-12 * std::max(1.0, std::abs(want)) ||
        std::abs(have_struct - want) > 1e-12 * std::max(1.0, std::abs(want))) {
      rep.add("pvt_coefficients", "beta disagrees with beta_percent_per_k / 100");
    }
  }

  // Rendered documentation must match the canonical render byte for byte.
  const std::string doc_path =
      repo_root + "/" + manifest.get_string("fixture.parameters_doc.path", "docs/parameters.md");
  try {
    const std::string on_disk = read_file(doc_path);
    const std::string fresh = render_parameters_doc(building, pvt);
    if (on_disk != fresh) rep.add("parameters_doc", "docs/parameters.md is stale; re-render");
  } catch (const std::exception& e) {
    rep.add("parameters_doc", e.what());
  }

  // The generated day must reproduce bit-identically from its seed.
  const std::uint64_t seed =
      static_cast<std::uint64_t>(manifest.get_int("fixture.synthetic_day.seed", 0));
  const std::string want = manifest.get_string("fixture.synthetic_day.digest", "");
  if (want.empty()) {
    rep.add("synthetic_day", "manifest lacks a digest");
  } else {
    SystemParams sys;
    const auto day = synth::synthetic_day(synth::synthetic_config_from(sys), seed);
    char buf[32];
    snprintf(buf, sizeof(buf), "%016llx",
             static_cast<unsigned long long>(synth::synthetic_day_digest(day)));
    if (want != buf) {
      rep.add("synthetic_day",
              std::string("regenerated digest ") + buf + " differs from manifest " + want);
    }
  }

  return rep;
}

}  // namespace bems::fixtures
