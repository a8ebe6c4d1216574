#pragma once

#include <functional>
#include <span>
#include <vector>

#include "contagion/linalg.hpp"
#include "contagion/process.hpp"

namespace contagion {

// Weighted point sample (empirical counterpart of the resource measure).
struct WeightedSample {
  std::vector<Vec> x;
  std::vector<double> w;
};

struct SampleMoments {
  Vec mean;
  Mat cov;
};

// Weighted mean and covariance, normalized by total weight. Needs at least
// two positively weighted points for the covariance.
SampleMoments sample_moments(const WeightedSample& ws);

// One-sample KS distance of sorted-internally `sample` against a cdf.
double ks_1d(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample KS distance (exact sup over jump points).
double two_sample_ks(std::vector<double> a, std::vector<double> b);

// Weighted one-sample KS distance: empirical cdf uses the normalized weights.
double weighted_ks_1d(std::vector<std::pair<double, double>> value_weight,
                      const std::function<double(double)>& cdf);

// Total variation distance between finite lattice laws (same scale required).
double tv_distance(const FiniteDiscreteDistribution& p, const FiniteDiscreteDistribution& q);

double normal_cdf(double x);  // standard normal

struct NormalityThresholds {
  double ks_factor = 1.5;        // multiplies the 95% asymptotic KS band 1.36/sqrt(N)
  double cov_rel_error = 0.15;   // relative Frobenius error of the covariance
};

struct NormalityReport {
  std::vector<double> ks_per_coordinate;
  double ks_threshold;
  double cov_rel_error;
  double cov_tolerance;
  bool ks_pass;
  bool cov_pass;
  bool pass;
};

// Checks centered samples against a zero-mean normal with the target
// covariance: per-coordinate KS against the normal cdf with the target
// marginal variance, plus relative Frobenius error of the sample covariance.
NormalityReport normality_check(const std::vector<Vec>& samples, const Mat& target_cov,
                                const NormalityThresholds& thresholds = {});

// Mean / stderr of a scalar Monte Carlo sample.
struct MeanStderr {
  double mean;
  double stderr_;
};
MeanStderr mean_stderr(std::span<const double> xs);

}  // namespace contagion
