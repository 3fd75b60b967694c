#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hotspots/random.hpp"

namespace hotspots {

/// Draws indices with probability proportional to nonnegative weights, with
/// O(log n) draws and removals (Fenwick tree of partial sums).
class WeightedSampler {
 public:
  explicit WeightedSampler(std::vector<double> weights) : weights_(std::move(weights)), tree_(weights_.size() + 1, 0.0) {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= 0.0)) throw std::invalid_argument("WeightedSampler: negative or NaN weight");
      if (weights_[i] > 0.0) ++positive_;
      tree_[i + 1] += weights_[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent <= weights_.size()) tree_[parent] += tree_[i + 1];
    }
    top_ = 1;
    while (top_ * 2 <= weights_.size()) top_ *= 2;
  }

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  /// Number of entries that can still be drawn.
  std::size_t positive_count() const { return positive_; }

  /// Removes entry i from future draws.
  void remove(std::size_t i) {
    if (weights_[i] == 0.0) return;
    const double w = weights_[i];
    weights_[i] = 0.0;
    --positive_;
    for (std::size_t k = i + 1; k <= weights_.size(); k += k & (~k + 1)) tree_[k] -= w;
  }

  /// Index drawn with probability weight / total. Requires positive_count() > 0.
  std::size_t sample(Rng& rng) const {
    if (positive_ == 0) throw std::logic_error("WeightedSampler: nothing to draw");
    double total = 0.0;
    for (std::size_t k = weights_.size(); k > 0; k -= k & (~k + 1)) total += tree_[k];
    double u = rng.uniform() * total;
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next <= weights_.size() && tree_[next] <= u) {
        pos = next;
        u -= tree_[next];
      }
    }
    std::size_t i = pos < weights_.size() ? pos : weights_.size() - 1;
    // rounding in the partial sums can land on a spent entry; move to a live one
    if (weights_[i] == 0.0) {
      std::size_t j = i;
      while (j < weights_.size() && weights_[j] == 0.0) ++j;
      if (j == weights_.size()) {
        j = i;
        while (weights_[j] == 0.0) --j;
      }
      i = j;
    }
    return i;
  }

 private:
  std::vector<double> weights_;
  std::vector<double> tree_;
  std::size_t top_ = 0;
  std::size_t positive_ = 0;
};

}  // namespace hotspots
