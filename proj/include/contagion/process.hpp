#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "contagion/env.hpp"
#include "contagion/wsampler.hpp"

namespace contagion {

struct MotherRef {
  std::int32_t generation;
  std::int32_t index;
};

struct PointRecord {
  std::int32_t generation;
  std::int32_t index;  // within-generation, 0-based
  Vec x;
  double w;
  double u;
  std::optional<MotherRef> mother;  // empty for roots
};

// Exact finite-support law on an integer lattice; coordinates are
// key / scale. Carrier of the enumeration oracle's output.
struct FiniteDiscreteDistribution {
  double scale = 1.0;
  std::map<std::vector<std::int64_t>, double> p;

  void add(const std::vector<std::int64_t>& key, double prob);
  double total() const;
  Complex fourier(const Vec& t) const;  // sum p(x) e^{i t.x}
  std::vector<std::int64_t> to_lattice(const Vec& x) const;
};

// The growing point cloud with weights, genealogy and running totals.
class ProcessState {
 public:
  static ProcessState init(const std::vector<InitPoint>& initial, Rng rng,
                           bool track_mother_counts = false);

  // One step of the dynamics: draws a mother by weight, appends k daughters
  // displaced from it. When k = 0 the mother draw still happens and the
  // generation counter advances, so the random stream depends only on the
  // step count.
  void step(const StepEnvironment& env);
  void run(std::span<const StepEnvironment> envs);

  int dim() const { return dim_; }
  std::int32_t generation() const { return generation_; }
  const std::vector<PointRecord>& points() const { return points_; }
  std::size_t flat_of(std::int32_t gen, std::int32_t idx) const {
    return gen_offsets_[static_cast<std::size_t>(gen)] + static_cast<std::size_t>(idx);
  }
  double total_weight() const { return sampler_.total(); }
  double total_resource() const { return total_u_.value(); }
  // Flat index of the mother drawn by the most recent step.
  std::size_t last_mother_flat() const { return last_mother_; }
  const PointRecord& point(std::size_t flat) const { return points_[flat]; }
  // Times each point has been drawn as mother (only when tracking enabled).
  const std::vector<std::uint32_t>& mother_counts() const { return mother_counts_; }

 private:
  std::vector<PointRecord> points_;
  PrefixWeightIndex sampler_;
  KahanSum total_u_;
  std::int32_t generation_ = 0;
  int dim_ = 0;
  Rng rng_{0};
  std::size_t last_mother_ = 0;
  bool track_counts_ = false;
  std::vector<std::uint32_t> mother_counts_;
  std::vector<std::size_t> gen_offsets_;  // flat index of first point per generation
};

// Precomputed backward representation for repeated mother draws at a fixed n.
class BackwardSampler {
 public:
  BackwardSampler(std::span<const StepEnvironment> envs, const std::vector<InitPoint>& initial,
                  std::int64_t n);
  Vec sample(Rng& rng) const;
  std::int64_t n() const { return n_; }

 private:
  std::int64_t n_;
  std::vector<double> pi_;
  std::vector<MixtureLaw> mixtures_;  // index 0 = initial-location mixture
};

// CSV dump: generation,index,x_0..x_{d-1},w,u,mother_generation,mother_index
// (mother fields empty for roots). Floats carry 17 significant digits.
void write_points_csv(std::ostream& os, const ProcessState& state);

// One draw from the law of the mother point X*_n (the point selected at step
// n+1), via the backward Bernoulli representation: X*_n = sum_r I_r Y_r with
// I_r ~ Bernoulli(pi_r) independent, I_0 = 1, Y_0 from the weight-mixture of
// initial locations and Y_r from the weight-mixture of generation r marginals.
Vec backward_sample_mother(std::span<const StepEnvironment> envs,
                           const std::vector<InitPoint>& initial, std::int64_t n, Rng& rng);

// Per-generation weight mixtures: index 0 is the initial-location mixture,
// index r >= 1 mixes the marginals of generation r (empty when k_r = 0).
std::vector<MixtureLaw> generation_mixtures(std::span<const StepEnvironment> envs,
                                            const std::vector<InitPoint>& initial,
                                            std::int64_t n);

// Exact law of the point X_{n,j} by exhaustive enumeration over genealogies
// and displacement outcomes. Requires discrete marginals and deterministic
// initial locations; throws if the branch count exceeds max_outcomes.
FiniteDiscreteDistribution exact_enumerate(std::span<const StepEnvironment> envs,
                                           const std::vector<InitPoint>& initial, std::int64_t n,
                                           int j, std::int64_t max_outcomes);

// Expected number of times point (r, j) with weight w_rj is drawn as mother
// during steps r+1..n: w_rj * sum_{m=r}^{n-1} 1 / W_m.
double mother_count_expectation(const ScalarSeries& series, double w_rj, std::int64_t r,
                                std::int64_t n);

// Mean number of generation-n points with a generation-r ancestor: k_n pi_r.
double ancestry_mean(const ScalarSeries& series, int k_n, std::int64_t r);

// True iff the genealogy walk from `flat` reaches the point (r, i).
bool has_ancestor(const ProcessState& state, std::size_t flat, std::int32_t r, std::int32_t i);

}  // namespace contagion
