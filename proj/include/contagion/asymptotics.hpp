#pragma once

#include <cstdint>
#include <vector>

#include "contagion/displacement.hpp"
#include "contagion/env.hpp"

namespace contagion {

// Limit predictions for one experiment regime.
struct RegimePrediction {
  enum class Regime { thm1, thm2, thm3 };
  Regime regime;
  Vec drift;        // lambda
  Mat covariance;   // CLT covariance (thm2 / thm3)
  std::vector<double> g_grid_v;   // segment measure cdf (thm3 only)
  std::vector<double> g_values;
};

// Plain Cesaro mean of a_1..a_n (seq[i] = a_{i+1}).
double cesaro_mean(const std::vector<double>& seq, std::int64_t n);

// Weighted-average partial quotient sum(b a) / sum(b) over the first n terms.
double b_summable_estimate(const std::vector<double>& a_seq, const std::vector<double>& b_seq,
                           std::int64_t n);

// Drift of the power-law regime: (alpha+1) * cesaro(xi mu) / cesaro(xi).
Vec thm2_drift(double alpha, const std::vector<double>& xi_seq, const std::vector<Vec>& mu_seq,
               std::int64_t horizon);

// CLT covariance of the power-law regime: (alpha+1) * cesaro(xi m) / cesaro(xi).
Mat thm2_cov(double alpha, const std::vector<double>& xi_seq, const std::vector<Mat>& m_seq,
             std::int64_t horizon);

// Finite-n centering of the power-law regime. mu_seq[r] is the generation-r
// mixture mean (index 0 unused). value = unnormalized / ln n.
struct NuResult {
  Vec value;
  Vec unnormalized;  // sum_{r=1}^{n-1} pi_r mu_r
};
NuResult nu_n(const ScalarSeries& series, const std::vector<Vec>& mu_seq, std::int64_t n);
// Same with a generation-independent mixture mean.
NuResult nu_n(const ScalarSeries& series, const Vec& mu_const, std::int64_t n);

// Finite-n centering of the exponential regime: sum_{r=1}^n pi_r mu_r.
Vec kappa_n(const ScalarSeries& series, const std::vector<Vec>& mu_seq, std::int64_t n);
Vec kappa_n(const ScalarSeries& series, const Vec& mu_const, std::int64_t n);

// Truncated stationary weight functional zeta_n = sum_{m<=M} xi_{n-m} e^{-S_{n,m}}
// with a geometric tail bound from the empirical tau mean. Throws when the
// empirical tau mean is nonpositive or the bound exceeds tol.
struct ZetaResult {
  double value;
  double tail_bound;
};
ZetaResult zeta_tilde(const std::vector<double>& xi_vals, const std::vector<double>& tau_vals,
                      std::int64_t n, std::int64_t M, double tol);

// Smallest truncation whose geometric tail bound drops below `target`
// (capped at 1e4).
std::int64_t default_zeta_truncation(double tau_mean, double xi_max, double target = 1e-12);

// Ergodic-average limit constants of the exponential regime. The stationary
// generators are ergodic, so the invariant-sigma-algebra conditional
// expectations reduce to plain expectations estimated over K chain samples.
struct ErgodicVecEstimate {
  Vec value;
  Vec stderr_;
  std::int64_t samples;
};
struct ErgodicMatEstimate {
  Mat value;
  Mat stderr_;
  std::int64_t samples;
};
ErgodicVecEstimate thm3_drift(const ScalarGenerator& xi, const ScalarGenerator& tau,
                              const Vec& mu, std::int64_t K, std::uint64_t seed);
ErgodicMatEstimate thm3_cov(const ScalarGenerator& xi, const ScalarGenerator& tau, const Vec& mu,
                            const Mat& m, std::int64_t K, std::uint64_t seed);

// Resource cdf along the drift segment: G(v) ~ U_{floor(n v)} / U_n.
// u_steps[r] = u_r for r = 0..>=n; v values must lie in [0,1].
std::vector<double> g_estimate(const std::vector<double>& u_steps, std::int64_t n,
                               const std::vector<double>& v_grid);

RegimePrediction segment_measure(const Vec& lambda, std::vector<double> v_grid,
                                 std::vector<double> g_values);

// Exact finite-n moments of the backward representation X*_n:
//   mean = sum_r pi_r mu_r,  cov = sum_r (pi_r m_r - pi_r^2 mu_r mu_r^T),
// with the r = 0 terms taken from the initial-location mixture.
struct MomentPair {
  Vec mean;
  Mat cov;
};
MomentPair backward_moments(const ScalarSeries& series, const std::vector<MixtureLaw>& mixtures,
                            std::int64_t n);

}  // namespace contagion
