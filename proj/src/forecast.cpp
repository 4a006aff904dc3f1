#include "bems/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bems/rng.hpp"

namespace bems::forecast {

void HistoryStore::validate(int min_days) const {
  for (const auto& d : irradiance) {
    if (static_cast<int>(d.g.size()) != kSubslotsPerDay)
      throw std::runtime_error("history: irradiance day '" + d.label + "' must have 1440 samples");
    for (Real v : d.g) {
      if (v < 0.0 || !std::isfinite(v))
        throw std::runtime_error("history: negative irradiance in day '" + d.label + "'");
    }
  }
  for (const auto& d : temperature) {
    if (static_cast<int>(d.t_amb.size()) != 96)
      throw std::runtime_error("history: temperature day '" + d.label + "' must have 96 samples");
  }
  if (static_cast<int>(irradiance.size()) < min_days ||
      static_cast<int>(temperature.size()) < min_days) {
    throw std::runtime_error("history: insufficient archive days (need at least " +
                             std::to_string(min_days) + ")");
  }
}

namespace {

constexpr Real kTwoPi = 6.283185307179586477;

void append_doy_encoding(std::vector<Real>& features, int day_of_year) {
  features.push_back(std::sin(kTwoPi * day_of_year / 365.25));
  features.push_back(std::cos(kTwoPi * day_of_year / 365.25));
}

// Window of the `window` samples preceding 0-based index `end`, zero-padded
// on the left when the day has not progressed far enough.
void append_window(std::vector<Real>& features, const std::vector<Real>& series, int end,
                   int window) {
  for (int i = end - window; i < end; ++i) {
    features.push_back(i >= 0 && i < static_cast<int>(series.size()) ? series[i] : 0.0);
  }
}

// Standardizes columns in place using the archive rows' statistics, then
// returns indices of the k nearest archive rows to the query.
std::vector<int> nearest_rows(std::vector<std::vector<Real>>& rows, std::vector<Real>& query,
                              int k) {
  const size_t nf = query.size();
  for (size_t f = 0; f < nf; ++f) {
    Real mean = 0.0;
    for (const auto& r : rows) mean += r[f];
    mean /= static_cast<Real>(rows.size());
    Real var = 0.0;
    for (const auto& r : rows) var += (r[f] - mean) * (r[f] - mean);
    const Real sd = std::sqrt(var / static_cast<Real>(rows.size()));
    const Real div = sd > 1e-12 ? sd : 1.0;
    for (auto& r : rows) r[f] = (r[f] - mean) / div;
    query[f] = (query[f] - mean) / div;
  }
  std::vector<std::pair<Real, int>> scored(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    Real d2 = 0.0;
    for (size_t f = 0; f < nf; ++f) {
      const Real diff = rows[i][f] - query[f];
      d2 += diff * diff;
    }
    scored[i] = {d2, static_cast<int>(i)};
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

}  // namespace

ScenarioSet knn_scenarios(const HistoryStore& h, const std::vector<Real>& observed,
                          int day_of_year, int kappa0, const KnnOptions& opts,
                          std::uint64_t seed) {
  if (kappa0 < 1 || kappa0 > kSubslotsPerDay)
    throw std::invalid_argument("forecast: kappa0 out of range");
  if (static_cast<int>(observed.size()) < kappa0 - 1)
    throw std::invalid_argument("forecast: observation shorter than kappa0 - 1");
  if (opts.k < 1 || opts.n_scenarios < 1)
    throw std::invalid_argument("forecast: k and n_scenarios must be positive");
  h.validate(opts.k);

  const int length = kSubslotsPerDay - kappa0 + 1;
  const int n_days = static_cast<int>(h.irradiance.size());

  std::vector<std::vector<Real>> rows(n_days);
  for (int i = 0; i < n_days; ++i) {
    append_doy_encoding(rows[i], h.irradiance[i].day_of_year);
    append_window(rows[i], h.irradiance[i].g, kappa0 - 1, opts.feature_window);
  }
  std::vector<Real> query;
  append_doy_encoding(query, day_of_year);
  append_window(query, observed, kappa0 - 1, opts.feature_window);

  const std::vector<int> analogs = nearest_rows(rows, query, opts.k);

  // Per-sub-slot spread of the analog ensemble drives the residual scale.
  Vector sigma = Vector::Zero(length);
  if (opts.k > 1) {
    for (int t = 0; t < length; ++t) {
      Real mean = 0.0;
      for (int a : analogs) mean += h.irradiance[a].g[kappa0 - 1 + t];
      mean /= opts.k;
      Real var = 0.0;
      for (int a : analogs) {
        const Real d = h.irradiance[a].g[kappa0 - 1 + t] - mean;
        var += d * d;
      }
      sigma(t) = std::sqrt(var / opts.k);
    }
  }

  Rng rng(seed);
  ScenarioSet set;
  set.start_subslot = kappa0;
  set.paths.resize(opts.n_scenarios, length);
  for (int s = 0; s < opts.n_scenarios; ++s) {
    const int a = analogs[rng.below(static_cast<std::uint64_t>(opts.k))];
    const Real z = rng.normal();
    for (int t = 0; t < length; ++t) {
      const Real v = h.irradiance[a].g[kappa0 - 1 + t] + z * sigma(t);
      set.paths(s, t) = std::max(Real(0), v);
    }
  }
  return set;
}

Vector point_forecast(const ScenarioSet& s) { return scenario_quantile(s, 0.5); }

Vector scenario_quantile(const ScenarioSet& s, Real q) {
  if (s.count() < 1) throw std::invalid_argument("forecast: empty scenario set");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("forecast: quantile outside [0,1]");
  const int n = s.count();
  Vector out(s.length());
  std::vector<Real> col(n);
  for (int t = 0; t < s.length(); ++t) {
    for (int i = 0; i < n; ++i) col[i] = s.paths(i, t);
    std::sort(col.begin(), col.end());
    const Real pos = q * (n - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, n - 1);
    const Real frac = pos - lo;
    out(t) = col[lo] * (1.0 - frac) + col[hi] * frac;
  }
  return out;
}

Vector forecast_ambient(const HistoryStore& h, const std::vector<Real>& observed,
                        int day_of_year, int k_now, int k) {
  if (k_now < 1 || k_now > kSlotsPerDay)
    throw std::invalid_argument("forecast: slot index out of range");
  if (k < 1) throw std::invalid_argument("forecast: k must be positive");
  h.validate(k);
  const int obs_quarters = 2 * (k_now - 1);
  if (static_cast<int>(observed.size()) < obs_quarters)
    throw std::invalid_argument("forecast: ambient observation shorter than expected");

  const int n_days = static_cast<int>(h.temperature.size());
  std::vector<std::vector<Real>> rows(n_days);
  for (int i = 0; i < n_days; ++i) {
    append_doy_encoding(rows[i], h.temperature[i].day_of_year);
    append_window(rows[i], h.temperature[i].t_amb, obs_quarters, 4);
  }
  std::vector<Real> query;
  append_doy_encoding(query, day_of_year);
  append_window(query, observed, obs_quarters, 4);

  const std::vector<int> analogs = nearest_rows(rows, query, k);

  const int n_slots = kSlotsPerDay - k_now + 1;
  Vector out = Vector::Zero(n_slots);
  for (int s = 0; s < n_slots; ++s) {
    const int q0 = 2 * (k_now - 1 + s);
    Real acc = 0.0;
    for (int a : analogs) {
      acc += 0.5 * (h.temperature[a].t_amb[q0] + h.temperature[a].t_amb[q0 + 1]);
    }
    out(s) = acc / k;
  }
  return out;
}

int day_of_year(int year, int month, int day) {
  static const int days_in[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  int doy = day;
  for (int m = 0; m < month - 1; ++m) doy += days_in[m];
  if (leap && month > 2) ++doy;
  return doy;
}

}  // namespace bems::forecast
