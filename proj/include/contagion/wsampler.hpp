#pragma once

#include <cstdint>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

// Append-only weighted categorical sampler over flat point indices.
// Binary-indexed prefix sums: append and sample are both O(log N).
// Zero-weight entries keep their index but are never drawn.
class PrefixWeightIndex {
 public:
  // Returns the flat index of the new entry. w must be >= 0.
  std::size_t append(double w);

  // Draws index i with probability w_i / total. Requires total > 0.
  std::size_t sample(Rng& rng);

  // Index owning the half-open interval of [0, total) that contains u.
  // A u exactly on a prefix boundary belongs to the next positive-weight
  // entry. Exposed so the interval partition can be checked directly.
  std::size_t index_for(double u) const;

  std::size_t count() const { return tree_.size(); }
  // Compensated running total of all appended weights.
  double total() const { return total_.value(); }

 private:
  double tree_prefix_total() const;

  std::vector<double> tree_;  // 1-based Fenwick layout, tree_[i-1] = node i
  KahanSum total_;
  std::size_t last_positive_ = 0;
  bool any_positive_ = false;
};

}  // namespace contagion
