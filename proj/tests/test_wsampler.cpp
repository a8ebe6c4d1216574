#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "contagion/wsampler.hpp"

using namespace contagion;

namespace {

PrefixWeightIndex build(const std::vector<double>& ws) {
  PrefixWeightIndex idx;
  for (double w : ws) idx.append(w);
  return idx;
}

}  // namespace

TEST_CASE("append reports flat indices and exact totals") {
  PrefixWeightIndex idx;
  CHECK(idx.append(1.0) == 0);
  CHECK(idx.append(3.0) == 1);
  CHECK(idx.count() == 2);
  CHECK(idx.total() == 4.0);
}

TEST_CASE("compensated total survives a million unit appends") {
  PrefixWeightIndex idx;
  for (int i = 0; i < 1'000'000; ++i) idx.append(1.0);
  CHECK(idx.total() == 1'000'000.0);  // exact, not approximate
}

TEST_CASE("negative weights are rejected") {
  PrefixWeightIndex idx;
  CHECK_THROWS(idx.append(-0.5));
}

TEST_CASE("interval partition, including zero-weight gaps") {
  // weights [0, 1, 0, 2]: entry 1 owns [0,1), entry 3 owns [1,3);
  // boundaries belong to the next positive-weight entry.
  const auto idx = build({0.0, 1.0, 0.0, 2.0});
  CHECK(idx.index_for(0.0) == 1);
  CHECK(idx.index_for(0.5) == 1);
  CHECK(idx.index_for(1.0) == 3);
  CHECK(idx.index_for(2.9) == 3);
}

TEST_CASE("exhaustive partition check for short weight lists") {
  const std::vector<std::vector<double>> cases = {
      {5.0}, {1.0, 3.0}, {2.0, 0.0, 1.0}, {0.5, 0.5, 0.5, 0.5},
      {0.0, 0.0, 4.0}, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}};
  for (const auto& ws : cases) {
    const auto idx = build(ws);
    // walk a fine grid of u values and recompute the owner by scanning
    double total = 0.0;
    for (double w : ws) total += w;
    const int grid = 1000;
    for (int g = 0; g < grid; ++g) {
      const double u = total * g / grid;
      // reference owner by linear scan: first i with u < prefix_{i+1};
      // u landing exactly on a boundary thus falls to the next positive entry
      double acc = 0.0;
      std::size_t owner = ws.size();
      for (std::size_t i = 0; i < ws.size(); ++i) {
        acc += ws[i];
        if (u < acc) {
          owner = i;
          break;
        }
      }
      CHECK(idx.index_for(u) == owner);
    }
  }
}

TEST_CASE("zero-weight entries are never sampled") {
  auto idx = build({0.0, 2.0, 0.0, 1.0, 0.0});
  Rng rng(17);
  for (int i = 0; i < 10'000; ++i) {
    const std::size_t j = idx.sample(rng);
    CHECK((j == 1 || j == 3));
  }
}

TEST_CASE("single-entry sampler always returns it") {
  auto idx = build({5.0});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(idx.sample(rng) == 0);
}

TEST_CASE("sampling with zero total throws") {
  auto empty = build({});
  Rng rng(2);
  CHECK_THROWS(empty.sample(rng));
  auto zeros = build({0.0, 0.0});
  CHECK_THROWS(zeros.sample(rng));
}

TEST_CASE("two-entry frequencies match the weights") {
  auto idx = build({1.0, 3.0});
  Rng rng(23);
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += idx.sample(rng) == 1 ? 1 : 0;
  const double p = 0.75;
  CHECK(std::fabs(static_cast<double>(hits) / n - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("chi-square over ten categories") {
  const std::vector<double> ws = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  auto idx = build(ws);
  Rng rng(29);
  const int n = 1'000'000;
  std::vector<int> counts(ws.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[idx.sample(rng)];
  double chi2 = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double expect = n * ws[i] / 55.0;
    const double diff = counts[i] - expect;
    chi2 += diff * diff / expect;
  }
  CHECK(chi2 < 27.88);  // 99.9th percentile of chi^2 with 9 dof
}

TEST_CASE("appending mid-stream keeps earlier draws consistent") {
  auto idx = build({1.0, 1.0});
  Rng rng(31);
  idx.append(2.0);
  const int n = 400'000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[idx.sample(rng)];
  CHECK(std::fabs(counts[0] / static_cast<double>(n) - 0.25) <= 0.005);
  CHECK(std::fabs(counts[1] / static_cast<double>(n) - 0.25) <= 0.005);
  CHECK(std::fabs(counts[2] / static_cast<double>(n) - 0.50) <= 0.005);
}
