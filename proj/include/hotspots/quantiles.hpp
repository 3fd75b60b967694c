#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace hotspots {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an unsorted sample.
inline double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = (double(sample.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - double(lo)) * (sample[hi] - sample[lo]);
}

/// Pointwise 10/50/90% quantiles over repeated runs of a curve.
struct QuantileBand {
  std::vector<double> q10;
  std::vector<double> q50;
  std::vector<double> q90;
  std::size_t n_runs = 0;
};

/// runs[i][j] is run i at grid position j; all runs share one length.
inline QuantileBand quantile_band(std::span<const std::vector<double>> runs) {
  QuantileBand band;
  band.n_runs = runs.size();
  if (runs.empty()) return band;
  const std::size_t m = runs.front().size();
  std::vector<double> column(runs.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < runs.size(); ++i) column[i] = runs[i].at(j);
    band.q10.push_back(quantile(column, 0.10));
    band.q50.push_back(quantile(column, 0.50));
    band.q90.push_back(quantile(column, 0.90));
  }
  return band;
}

}  // namespace hotspots
