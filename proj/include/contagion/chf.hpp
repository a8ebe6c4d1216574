#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "contagion/env.hpp"
#include "contagion/process.hpp"

namespace contagion {

// Evaluation grid for ch.f. comparisons.
struct ChfGrid {
  std::vector<Vec> t;
  std::vector<Complex> values;
  enum class Provenance { analytic, empirical } provenance = Provenance::analytic;
};

// Default comparison grid: `points` values per axis, equally spaced in
// [-span, span], crossed over axes for d > 1 only along the axes.
std::vector<Vec> default_t_grid(int d, int points = 25, double span = 3.0);

// Weighted empirical ch.f.: sum w_i e^{i t.x_i} / sum w_i.
Complex empirical_chf(std::span<const Vec> xs, std::span<const double> ws, const Vec& t);
Complex empirical_chf(std::span<const Vec> xs, const Vec& t);

// Semi-analytic ch.f. engine over a materialized environment sequence.
// Propagates the product recursion for the mother-location ch.f. and the
// per-point and mean-measure ch.f.s built from it.
class ChfEngine {
 public:
  // envs must outlive the engine.
  ChfEngine(std::span<const StepEnvironment> envs, const std::vector<InitPoint>& initial);

  const ScalarSeries& series() const { return series_; }
  std::int64_t horizon() const { return static_cast<std::int64_t>(envs_.size()); }

  // Generation-r weight-mixture ch.f. f_r(t); f_0 is the initial-location
  // mixture. Returns 1 for generations with k_r = 0 (pi_r = 0 there).
  Complex f_r(std::int64_t r, const Vec& t) const;

  // Mother-location ch.f. after step n: prod_{r=0}^{n} (1 + pi_r (f_r - 1)).
  Complex phi_product(std::int64_t n, const Vec& t) const;

  // Ch.f. of the point X_{n,j}: f_{n,j}(t) * phi_product(n-1, t). n >= 1.
  Complex phi_point(std::int64_t n, int j, const Vec& t) const;

  // Ch.f. of the resource measure M_n: u-weighted average of phi_point.
  Complex mean_measure_chf(std::int64_t n, const Vec& t) const;

  struct BigPi {
    Complex value;
    double error_bound;        // 2 * estimated tail of sum pi_r past truncation
    std::int64_t truncation;   // product taken over r <= truncation
  };
  // Infinite-product limit of phi_product. Throws when the pi tail fails to
  // fall below tail_tol within the horizon (W_infinity = infinity regime).
  BigPi big_pi(const Vec& t, double tail_tol) const;

  struct UAverage {
    Complex value;
    double rel_change;  // relative change over the last decade of steps
    bool stabilized;
  };
  // Running u-weighted average of the displacement ch.f.s (generation 0
  // enters with the initial-location mixture). With cyclic_tail the (u, uf)
  // data of the last materialized step is repeated out to `horizon`, which
  // may then exceed the materialized length.
  UAverage u_average(const Vec& t, std::int64_t horizon, double stab_tol,
                     bool cyclic_tail) const;

  // Limit ch.f. of M_n in the summable-weight regime: big_pi * u-average.
  // Throws if the average has not stabilized at the horizon.
  Complex thm1_limit_chf(const Vec& t, double tail_tol, std::int64_t averaging_horizon,
                         double stab_tol = 1e-6, bool cyclic_tail = false) const;

 private:
  Complex uf_r(std::int64_t r, const Vec& t) const;  // sum_j u_{r,j} f_{r,j}(t)

  std::span<const StepEnvironment> envs_;
  std::vector<InitPoint> initial_;
  ScalarSeries series_;
  std::vector<MixtureLaw> mixtures_;
};

}  // namespace contagion
