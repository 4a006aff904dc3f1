#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bems/types.hpp"

namespace bems::forecast {

// One archive day of 1-minute irradiance (1440 samples).
struct IrradianceDay {
  int day_of_year = 1;  // 1..366
  std::string label;    // e.g. the directory name it was loaded from
  std::vector<Real> g;  // W/m^2
};

// One archive day of 15-minute ambient temperature (96 samples).
struct TemperatureDay {
  int day_of_year = 1;
  std::string label;
  std::vector<Real> t_amb;  // deg C
};

struct HistoryStore {
  std::vector<IrradianceDay> irradiance;
  std::vector<TemperatureDay> temperature;

  void validate(int min_days) const;  // throws on malformed or short archives
};

// N_s equally weighted irradiance paths covering sub-slots kappa0..1440.
struct ScenarioSet {
  int start_subslot = 1;  // 1-based kappa0
  Matrix paths;           // one row per scenario, 1440 - kappa0 + 1 columns

  int count() const { return static_cast<int>(paths.rows()); }
  int length() const { return static_cast<int>(paths.cols()); }
};

struct KnnOptions {
  int k = 20;
  int n_scenarios = 100;
  int feature_window = 60;  // minutes of recent irradiance in the feature vector
};

// Analog-day scenario generation. `observed` holds today's irradiance for
// sub-slots 1..kappa0-1. Nearest days are found by Euclidean distance over
// standardized features (cyclic day-of-year encoding plus the last hour of
// observations); paths resample the analogs with replacement and add a
// per-path residual scaled by the analog spread. All values clamp at zero.
ScenarioSet knn_scenarios(const HistoryStore& h, const std::vector<Real>& observed,
                          int day_of_year, int kappa0, const KnnOptions& opts,
                          std::uint64_t seed);

// Per-sub-slot median across paths.
Vector point_forecast(const ScenarioSet& s);

// Per-sub-slot empirical quantile (linear interpolation), q in [0,1].
Vector scenario_quantile(const ScenarioSet& s, Real q);

// Point forecast of ambient temperature for slots k_now..48 as 30-minute
// means: k-NN analog mean over the 15-minute archive, pair-averaged per slot.
// `observed` holds today's 15-minute samples before slot k_now.
Vector forecast_ambient(const HistoryStore& h, const std::vector<Real>& observed,
                        int day_of_year, int k_now, int k);

int day_of_year(int year, int month, int day);

}  // namespace bems::forecast
