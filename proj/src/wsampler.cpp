#include "contagion/wsampler.hpp"

#include <bit>
#include <stdexcept>

namespace contagion {

namespace {
inline std::size_t lowbit(std::size_t i) { return i & (~i + 1); }
}  // namespace

std::size_t PrefixWeightIndex::append(double w) {
  if (w < 0.0) throw std::invalid_argument("negative weight");
  const std::size_t index = tree_.size();
  const std::size_t node = index + 1;
  // node i covers (i - lowbit(i), i]; fold the already-stored subranges in
  double value = w;
  for (std::size_t j = node - 1; j > node - lowbit(node); j -= lowbit(j))
    value += tree_[j - 1];
  tree_.push_back(value);
  total_.add(w);
  if (w > 0.0) {
    last_positive_ = index;
    any_positive_ = true;
  }
  return index;
}

double PrefixWeightIndex::tree_prefix_total() const {
  double s = 0.0;
  for (std::size_t i = tree_.size(); i > 0; i -= lowbit(i)) s += tree_[i - 1];
  return s;
}

std::size_t PrefixWeightIndex::index_for(double u) const {
  const std::size_t n = tree_.size();
  std::size_t pos = 0;  // number of entries with prefix sum <= u
  std::size_t step = n == 0 ? 0 : std::bit_floor(n);
  for (; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= n && tree_[next - 1] <= u) {
      u -= tree_[next - 1];
      pos = next;
    }
  }
  if (pos >= n) pos = last_positive_;  // u landed at/after the top boundary
  return pos;
}

std::size_t PrefixWeightIndex::sample(Rng& rng) {
  if (!any_positive_ || total_.value() <= 0.0)
    throw std::runtime_error("no selectable point: total weight is zero");
  const double u = rng.uniform() * tree_prefix_total();
  return index_for(u);
}

}  // namespace contagion
