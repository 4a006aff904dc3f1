#include "bems/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "bems/csv.hpp"
#include "bems/rng.hpp"
#include "bems/solar.hpp"

namespace bems::synth {

SyntheticConfig synthetic_config_from(const SystemParams& sys) {
  SyntheticConfig cfg;
  cfg.day_of_year = sys.site.day_of_year;
  cfg.latitude_deg = sys.site.latitude_deg;
  cfg.tilt_deg = sys.site.tilt_deg;
  return cfg;
}

namespace {

struct CloudDip {
  Real center_min;
  Real width_min;
  Real depth;
};

std::vector<CloudDip> draw_clouds(Rng& rng) {
  const int n = 2 + static_cast<int>(rng.below(5));
  std::vector<CloudDip> dips(n);
  for (auto& d : dips) {
    d.center_min = rng.uniform(7.5 * 60.0, 16.5 * 60.0);
    d.width_min = rng.uniform(6.0, 45.0);
    d.depth = rng.uniform(0.25, 0.85);
  }
  return dips;
}

Real cloud_factor(const std::vector<CloudDip>& dips, int minute) {
  Real f = 1.0;
  for (const auto& d : dips) {
    const Real z = (minute - d.center_min) / d.width_min;
    f *= 1.0 - d.depth * std::exp(-0.5 * z * z);
  }
  return std::max(0.05, f);
}

Real ambient_at(const SyntheticConfig& cfg, int minute) {
  const Real hours = minute / 60.0;
  // Peak at 15:00, minimum at 03:00.
  return cfg.t_amb_mean + cfg.t_amb_amp * std::sin(2.0 * solar::kPi * (hours - 9.0) / 24.0);
}

// Smooth occupancy shape: low overnight, morning and evening activity.
Real occupancy_shape(int minute) {
  const Real h = minute / 60.0;
  auto bump = [h](Real center, Real width) {
    const Real z = (h - center) / width;
    return std::exp(-0.5 * z * z);
  };
  return 0.15 + 0.55 * bump(7.5, 1.3) + 0.85 * bump(19.5, 2.2) + 0.25 * bump(13.0, 2.5);
}

}  // namespace

std::vector<pvt::PvtWeather> synthetic_weather(const SyntheticConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const auto dips = draw_clouds(rng);
  const Real decl = solar::declination(cfg.day_of_year);
  const Real lat = solar::deg2rad(cfg.latitude_deg);

  std::vector<pvt::PvtWeather> out(kSubslotsPerDay);
  // Slow wind variation from a coarse seeded profile.
  std::array<Real, 25> wind_knots{};
  for (auto& w : wind_knots) w = rng.uniform(0.3, 4.5);

  for (int m = 0; m < kSubslotsPerDay; ++m) {
    pvt::PvtWeather w;
    w.t_amb = ambient_at(cfg, m);
    const Real cz = solar::cos_zenith(lat, decl, m);
    const Real theta = solar::incidence_angle(cfg.latitude_deg, cfg.tilt_deg, cfg.day_of_year, m);
    w.theta = theta;
    if (cz > 0.0) {
      const Real air_mass_term = std::exp(-0.14 / std::max(0.08, cz));
      const Real beam_normal = 980.0 * air_mass_term;
      const Real clouds = cloud_factor(dips, m);
      const Real beam_plane = beam_normal * std::max(0.0, std::cos(theta)) * clouds;
      const Real diffuse =
          (0.14 * beam_normal + 40.0) * std::pow(cz, 0.5) * (0.6 + 0.4 * clouds);
      w.g_beam = beam_plane;
      w.g_diff = diffuse;
      w.g = beam_plane + diffuse;
    }
    const Real frac = m / 60.0 - std::floor(m / 60.0);
    const int hour = m / 60;
    w.wind = wind_knots[hour] * (1.0 - frac) + wind_knots[hour + 1] * frac;
    w.e_longwave = solar::sky_longwave(w.t_amb);
    out[m] = w;
  }
  return out;
}

std::vector<Real> synthetic_prices(const SyntheticConfig& cfg) {
  std::vector<Real> price(kSlotsPerDay, cfg.price_day);
  for (int k = 0; k < kSlotsPerDay; ++k) {
    const Real h = k * 0.5;  // slot start hour
    if (h < 6.0 || h >= 22.5) price[k] = cfg.price_night;
    if (h >= 8.0 && h < 10.0) price[k] = cfg.price_peak_morning;
    if (h >= 14.0 && h < 16.0) price[k] = cfg.price_peak_afternoon;
    if (h >= 18.0 && h < 21.0) price[k] = 0.5 * (cfg.price_day + cfg.price_peak_morning);
  }
  return price;
}

std::vector<Real> synthetic_electric_load(std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Real> out(kSubslotsPerDay);
  for (int m = 0; m < kSubslotsPerDay; ++m) {
    const Real base = 230.0 + 2200.0 * occupancy_shape(m);
    out[m] = std::max(0.0, base + rng.normal(0.0, 35.0));
  }
  return out;
}

std::vector<Real> synthetic_internal_gain(std::uint64_t seed) {
  Rng rng(seed ^ 0xc2b2ae3d27d4eb4full);
  std::vector<Real> out(kSubslotsPerDay);
  for (int m = 0; m < kSubslotsPerDay; ++m) {
    const Real base = 90.0 + 480.0 * occupancy_shape(m);
    out[m] = std::max(0.0, base + rng.normal(0.0, 12.0));
  }
  return out;
}

forecast::HistoryStore synthetic_history(const SyntheticConfig& cfg, std::uint64_t seed,
                                         int n_days) {
  forecast::HistoryStore h;
  Rng meta(seed * 77ull + 5);
  for (int d = 0; d < n_days; ++d) {
    SyntheticConfig day_cfg = cfg;
    // Archive days scatter around the target date with mild climate drift.
    const int doy = cfg.day_of_year + static_cast<int>(meta.below(21)) - 10;
    day_cfg.day_of_year = std::max(1, doy);
    day_cfg.t_amb_mean = cfg.t_amb_mean + meta.normal(0.0, 1.2);
    day_cfg.t_amb_amp = cfg.t_amb_amp * meta.uniform(0.85, 1.15);

    const auto weather = synthetic_weather(day_cfg, seed * 10007ull + d + 1);

    forecast::IrradianceDay gday;
    gday.day_of_year = day_cfg.day_of_year;
    gday.label = "synthetic-" + std::to_string(d);
    gday.g.resize(kSubslotsPerDay);
    for (int m = 0; m < kSubslotsPerDay; ++m) gday.g[m] = weather[m].g;
    h.irradiance.push_back(std::move(gday));

    forecast::TemperatureDay tday;
    tday.day_of_year = day_cfg.day_of_year;
    tday.label = "synthetic-" + std::to_string(d);
    tday.t_amb.resize(96);
    for (int q = 0; q < 96; ++q) {
      Real acc = 0.0;
      for (int m = 0; m < 15; ++m) acc += weather[q * 15 + m].t_amb;
      tday.t_amb[q] = acc / 15.0;
    }
    h.temperature.push_back(std::move(tday));
  }
  return h;
}

sim::DayInputs synthetic_day(const SyntheticConfig& cfg, std::uint64_t seed) {
  sim::DayInputs day;
  day.day_of_year = cfg.day_of_year;
  day.weather = synthetic_weather(cfg, seed);
  day.price_slots = synthetic_prices(cfg);
  day.p_e_building = synthetic_electric_load(seed);
  day.p_internal = synthetic_internal_gain(seed);
  day.history = synthetic_history(cfg, seed + 1, cfg.history_days);
  day.validate();
  return day;
}

std::uint64_t synthetic_day_digest(const sim::DayInputs& day) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& w : day.weather) {
    mix(format_double(w.g));
    mix(format_double(w.g_beam));
    mix(format_double(w.g_diff));
    mix(format_double(w.t_amb));
    mix(format_double(w.wind));
    mix(format_double(w.e_longwave));
  }
  for (Real p : day.price_slots) mix(format_double(p));
  for (Real p : day.p_e_building) mix(format_double(p));
  for (Real p : day.p_internal) mix(format_double(p));
  for (const auto& d : day.history.irradiance) {
    for (Real g : d.g) mix(format_double(g));
  }
  for (const auto& d : day.history.temperature) {
    for (Real t : d.t_amb) mix(format_double(t));
  }
  return h;
}

}  // namespace bems::synth
