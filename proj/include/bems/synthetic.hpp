#pragma once

#include <cstdint>

#include "bems/simulation.hpp"

namespace bems::synth {

// Documented synthetic winter-day generator: clear-sky irradiance on the
// collector plane with seeded cloud dips, sinusoidal ambient temperature,
// two-peak time-of-use prices, and occupancy-shaped loads. The same machinery
// with per-day seed offsets produces the forecast archive.
struct SyntheticConfig {
  int day_of_year = 10;
  Real latitude_deg = 35.7;
  Real tilt_deg = 35.7;
  Real t_amb_mean = 14.0;   // deg C
  Real t_amb_amp = 1.5;     // K, peak mid-afternoon
  Real diffuse_fraction_clear = 0.25;
  Real price_night = 1.5;   // cents/kWh
  Real price_day = 5.0;
  Real price_peak_morning = 14.0;
  Real price_peak_afternoon = 18.0;
  int history_days = 30;
};

SyntheticConfig synthetic_config_from(const SystemParams& sys);

// Weather trace for one day; cloud structure varies with the seed.
std::vector<pvt::PvtWeather> synthetic_weather(const SyntheticConfig& cfg, std::uint64_t seed);

std::vector<Real> synthetic_prices(const SyntheticConfig& cfg);
std::vector<Real> synthetic_electric_load(std::uint64_t seed);
std::vector<Real> synthetic_internal_gain(std::uint64_t seed);

forecast::HistoryStore synthetic_history(const SyntheticConfig& cfg, std::uint64_t seed,
                                         int n_days);

sim::DayInputs synthetic_day(const SyntheticConfig& cfg, std::uint64_t seed);

// FNV-1a over the canonical CSV rendering of the generated day; anchors the
// regeneration check of the bundled fixture manifest.
std::uint64_t synthetic_day_digest(const sim::DayInputs& day);

}  // namespace bems::synth
