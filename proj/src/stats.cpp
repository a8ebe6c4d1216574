#include "contagion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contagion {

SampleMoments sample_moments(const WeightedSample& ws) {
  if (ws.x.size() != ws.w.size()) throw std::invalid_argument("sample/weight size mismatch");
  double total = 0.0;
  std::size_t positive = 0;
  for (double w : ws.w) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("bad weight");
    if (w > 0.0) ++positive;
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("zero total weight");
  if (positive < 2) throw std::invalid_argument("covariance needs >= 2 weighted points");
  const int d = static_cast<int>(ws.x.front().size());
  Vec mean(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < ws.x.size(); ++i)
    for (int a = 0; a < d; ++a) mean[static_cast<std::size_t>(a)] += ws.w[i] * ws.x[i][static_cast<std::size_t>(a)];
  for (double& v : mean) v /= total;
  Mat cov(d);
  for (std::size_t i = 0; i < ws.x.size(); ++i) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov(a, b) += ws.w[i] * (ws.x[i][static_cast<std::size_t>(a)] - mean[static_cast<std::size_t>(a)]) *
                     (ws.x[i][static_cast<std::size_t>(b)] - mean[static_cast<std::size_t>(b)]);
  }
  for (double& v : cov.a) v /= total;
  return SampleMoments{std::move(mean), std::move(cov)};
}

double ks_1d(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

double weighted_ks_1d(std::vector<std::pair<double, double>> vw,
                      const std::function<double(double)>& cdf) {
  if (vw.empty()) throw std::invalid_argument("empty sample");
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& [v, w] : vw) {
    if (w < 0.0) throw std::invalid_argument("negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("zero total weight");
  double d = 0.0, acc = 0.0;
  for (const auto& [v, w] : vw) {
    const double f = cdf(v);
    d = std::max(d, f - acc / total);
    acc += w;
    d = std::max(d, acc / total - f);
  }
  return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double tv_distance(const FiniteDiscreteDistribution& p, const FiniteDiscreteDistribution& q) {
  if (p.scale != q.scale) throw std::invalid_argument("lattice scale mismatch");
  double s = 0.0;
  auto it = p.p.begin();
  auto jt = q.p.begin();
  while (it != p.p.end() || jt != q.p.end()) {
    if (jt == q.p.end() || (it != p.p.end() && it->first < jt->first)) {
      s += std::fabs(it->second);
      ++it;
    } else if (it == p.p.end() || jt->first < it->first) {
      s += std::fabs(jt->second);
      ++jt;
    } else {
      s += std::fabs(it->second - jt->second);
      ++it;
      ++jt;
    }
  }
  return 0.5 * s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

NormalityReport normality_check(const std::vector<Vec>& samples, const Mat& target_cov,
                                const NormalityThresholds& thresholds) {
  if (samples.size() < 100) throw std::invalid_argument("need at least 100 samples");
  const int d = target_cov.d;
  for (double ev : sym_eigenvalues(target_cov))
    if (ev < -1e-10) throw std::invalid_argument("target covariance not PSD");

  NormalityReport rep;
  rep.ks_threshold =
      thresholds.ks_factor * 1.36 / std::sqrt(static_cast<double>(samples.size()));
  rep.cov_tolerance = thresholds.cov_rel_error;
  rep.ks_pass = true;
  for (int a = 0; a < d; ++a) {
    const double var = target_cov(a, a);
    if (var <= 0.0) {
      bool degenerate_ok = true;
      for (const Vec& x : samples)
        if (std::fabs(x[static_cast<std::size_t>(a)]) > 1e-9) degenerate_ok = false;
      if (!degenerate_ok)
        throw std::invalid_argument("singular target with nondegenerate data");
      rep.ks_per_coordinate.push_back(0.0);
      continue;
    }
    const double sd = std::sqrt(var);
    std::vector<double> coord;
    coord.reserve(samples.size());
    for (const Vec& x : samples) coord.push_back(x[static_cast<std::size_t>(a)]);
    const double ks = ks_1d(std::move(coord), [sd](double v) { return normal_cdf(v / sd); });
    rep.ks_per_coordinate.push_back(ks);
    if (ks > rep.ks_threshold) rep.ks_pass = false;
  }

  WeightedSample ws;
  ws.x = samples;
  ws.w.assign(samples.size(), 1.0);
  const SampleMoments m = sample_moments(ws);
  const double denom = frobenius(target_cov);
  rep.cov_rel_error = denom > 0.0 ? frobenius(m.cov - target_cov) / denom : frobenius(m.cov);
  rep.cov_pass = rep.cov_rel_error <= rep.cov_tolerance;
  rep.pass = rep.ks_pass && rep.cov_pass;
  return rep;
}

MeanStderr mean_stderr(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("need >= 2 values");
  KahanSum s, s2;
  for (double x : xs) {
    s.add(x);
    s2.add(x * x);
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s.value() / n;
  const double var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
  return MeanStderr{mean, std::sqrt(var / n)};
}

}  // namespace contagion
