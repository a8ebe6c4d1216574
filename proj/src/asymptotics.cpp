#include "contagion/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace contagion {

double cesaro_mean(const std::vector<double>& seq, std::int64_t n) {
  if (n < 1 || n > static_cast<std::int64_t>(seq.size()))
    throw std::invalid_argument("n out of range");
  KahanSum s;
  for (std::int64_t i = 0; i < n; ++i) s.add(seq[static_cast<std::size_t>(i)]);
  return s.value() / static_cast<double>(n);
}

double b_summable_estimate(const std::vector<double>& a_seq, const std::vector<double>& b_seq,
                           std::int64_t n) {
  if (n < 1 || n > static_cast<std::int64_t>(a_seq.size()) ||
      n > static_cast<std::int64_t>(b_seq.size()))
    throw std::invalid_argument("n out of range");
  KahanSum num, den;
  for (std::int64_t i = 0; i < n; ++i) {
    num.add(a_seq[static_cast<std::size_t>(i)] * b_seq[static_cast<std::size_t>(i)]);
    den.add(b_seq[static_cast<std::size_t>(i)]);
  }
  if (den.value() <= 0.0) throw std::invalid_argument("zero b-mass");
  return num.value() / den.value();
}

Vec thm2_drift(double alpha, const std::vector<double>& xi_seq, const std::vector<Vec>& mu_seq,
               std::int64_t horizon) {
  if (horizon < 1 || horizon > static_cast<std::int64_t>(xi_seq.size()) ||
      horizon > static_cast<std::int64_t>(mu_seq.size()))
    throw std::invalid_argument("horizon out of range");
  const double s_xi = cesaro_mean(xi_seq, horizon);
  if (s_xi <= 0.0) throw std::invalid_argument("vanishing cesaro mean of xi");
  const std::size_t d = mu_seq.front().size();
  std::vector<KahanSum> num(d);
  for (std::int64_t i = 0; i < horizon; ++i)
    for (std::size_t a = 0; a < d; ++a)
      num[a].add(xi_seq[static_cast<std::size_t>(i)] * mu_seq[static_cast<std::size_t>(i)][a]);
  Vec out(d);
  for (std::size_t a = 0; a < d; ++a)
    out[a] = (alpha + 1.0) * (num[a].value() / static_cast<double>(horizon)) / s_xi;
  return out;
}

Mat thm2_cov(double alpha, const std::vector<double>& xi_seq, const std::vector<Mat>& m_seq,
             std::int64_t horizon) {
  if (horizon < 1 || horizon > static_cast<std::int64_t>(xi_seq.size()) ||
      horizon > static_cast<std::int64_t>(m_seq.size()))
    throw std::invalid_argument("horizon out of range");
  const double s_xi = cesaro_mean(xi_seq, horizon);
  if (s_xi <= 0.0) throw std::invalid_argument("vanishing cesaro mean of xi");
  const int d = m_seq.front().d;
  Mat acc(d);
  for (std::int64_t i = 0; i < horizon; ++i)
    for (std::size_t e = 0; e < acc.a.size(); ++e)
      acc.a[e] += xi_seq[static_cast<std::size_t>(i)] * m_seq[static_cast<std::size_t>(i)].a[e];
  for (double& v : acc.a) v = (alpha + 1.0) * (v / static_cast<double>(horizon)) / s_xi;
  return acc;
}

NuResult nu_n(const ScalarSeries& series, const std::vector<Vec>& mu_seq, std::int64_t n) {
  if (n < 2 || n > series.n() + 1) throw std::invalid_argument("n out of range");
  const std::size_t d = mu_seq.at(1).size();
  std::vector<KahanSum> acc(d);
  for (std::int64_t r = 1; r < n; ++r)
    for (std::size_t a = 0; a < d; ++a)
      acc[a].add(series.pi[static_cast<std::size_t>(r)] * mu_seq[static_cast<std::size_t>(r)][a]);
  NuResult out;
  out.unnormalized.resize(d);
  out.value.resize(d);
  const double ln_n = std::log(static_cast<double>(n));
  for (std::size_t a = 0; a < d; ++a) {
    out.unnormalized[a] = acc[a].value();
    out.value[a] = acc[a].value() / ln_n;
  }
  return out;
}

NuResult nu_n(const ScalarSeries& series, const Vec& mu_const, std::int64_t n) {
  if (n < 2 || n > series.n() + 1) throw std::invalid_argument("n out of range");
  KahanSum pi_sum;
  for (std::int64_t r = 1; r < n; ++r) pi_sum.add(series.pi[static_cast<std::size_t>(r)]);
  NuResult out;
  out.unnormalized.resize(mu_const.size());
  out.value.resize(mu_const.size());
  const double ln_n = std::log(static_cast<double>(n));
  for (std::size_t a = 0; a < mu_const.size(); ++a) {
    out.unnormalized[a] = pi_sum.value() * mu_const[a];
    out.value[a] = out.unnormalized[a] / ln_n;
  }
  return out;
}

Vec kappa_n(const ScalarSeries& series, const std::vector<Vec>& mu_seq, std::int64_t n) {
  if (n < 1 || n > series.n()) throw std::invalid_argument("n out of range");
  const std::size_t d = mu_seq.at(1).size();
  std::vector<KahanSum> acc(d);
  for (std::int64_t r = 1; r <= n; ++r)
    for (std::size_t a = 0; a < d; ++a)
      acc[a].add(series.pi[static_cast<std::size_t>(r)] * mu_seq[static_cast<std::size_t>(r)][a]);
  Vec out(d);
  for (std::size_t a = 0; a < d; ++a) out[a] = acc[a].value();
  return out;
}

Vec kappa_n(const ScalarSeries& series, const Vec& mu_const, std::int64_t n) {
  if (n < 1 || n > series.n()) throw std::invalid_argument("n out of range");
  KahanSum pi_sum;
  for (std::int64_t r = 1; r <= n; ++r) pi_sum.add(series.pi[static_cast<std::size_t>(r)]);
  Vec out(mu_const.size());
  for (std::size_t a = 0; a < mu_const.size(); ++a) out[a] = pi_sum.value() * mu_const[a];
  return out;
}

namespace {

double tau_window_mean(const std::vector<double>& tau_vals) {
  if (tau_vals.empty()) throw std::invalid_argument("empty tau window");
  double s = 0.0;
  for (double t : tau_vals) s += t;
  return s / static_cast<double>(tau_vals.size());
}

double geometric_tail_bound(double tau_mean, double xi_max, std::int64_t M) {
  // sum_{m > M} xi_max e^{-tau_mean m} <= xi_max e^{-tau_mean (M+1)} / (1 - e^{-tau_mean})
  const double q = std::exp(-tau_mean);
  return xi_max * std::pow(q, static_cast<double>(M + 1)) / (1.0 - q);
}

}  // namespace

std::int64_t default_zeta_truncation(double tau_mean, double xi_max, double target) {
  if (tau_mean <= 0.0) throw std::invalid_argument("tau mean must be positive");
  for (std::int64_t M = 1; M <= 10000; ++M)
    if (geometric_tail_bound(tau_mean, xi_max, M) < target) return M;
  return 10000;
}

ZetaResult zeta_tilde(const std::vector<double>& xi_vals, const std::vector<double>& tau_vals,
                      std::int64_t n, std::int64_t M, double tol) {
  if (n < 0 || n >= static_cast<std::int64_t>(xi_vals.size()) ||
      n >= static_cast<std::int64_t>(tau_vals.size()))
    throw std::invalid_argument("n out of range");
  const double a = tau_window_mean(tau_vals);
  if (a <= 0.0) throw std::runtime_error("regime violation: empirical tau mean is nonpositive");
  const std::int64_t m_max = std::min(M, n);
  double xi_max = 0.0;
  for (double x : xi_vals) xi_max = std::max(xi_max, x);
  const double bound = geometric_tail_bound(a, xi_max, m_max);
  if (bound > tol) throw std::runtime_error("zeta truncation tail bound exceeds tolerance");
  KahanSum s;
  double s_nm = 0.0;  // S_{n,m} accumulated as m grows
  for (std::int64_t m = 0; m <= m_max; ++m) {
    if (m > 0) s_nm += tau_vals[static_cast<std::size_t>(n - m + 1)];
    s.add(xi_vals[static_cast<std::size_t>(n - m)] * std::exp(-s_nm));
  }
  return ZetaResult{s.value(), bound};
}

namespace {

// Shared chain walk for the exponential-regime ergodic averages: runs the
// stationary (xi, tau) chain, maintains the backward recursion
// zeta_n = xi_n + e^{-tau_n} zeta_{n-1} (burn-in makes the truncation error
// geometrically small), and hands (xi_k, zeta_k) samples to the consumer.
template <typename Consumer>
std::int64_t ergodic_chain(const ScalarGenerator& xi, const ScalarGenerator& tau, std::int64_t K,
                           std::uint64_t seed, Consumer&& consume) {
  auto xi_stream = xi.stream(Rng::derive(seed, 0));
  auto tau_stream = tau.stream(Rng::derive(seed, 1));
  const double tau_mean = tau.stationary_mean();
  if (tau_mean <= 0.0)
    throw std::runtime_error("regime violation: stationary tau mean is nonpositive");
  const std::int64_t burn_in = default_zeta_truncation(tau_mean, std::max(xi.max_value(), 1.0));
  double zeta = 0.0;
  for (std::int64_t i = 0; i < burn_in + K; ++i) {
    const double x = xi_stream.next();
    const double t = tau_stream.next();
    zeta = x + std::exp(-t) * zeta;
    if (i >= burn_in) consume(x, zeta);
  }
  return K;
}

}  // namespace

ErgodicVecEstimate thm3_drift(const ScalarGenerator& xi, const ScalarGenerator& tau,
                              const Vec& mu, std::int64_t K, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  KahanSum s, s2;
  ergodic_chain(xi, tau, K, seed, [&](double x, double zeta) {
    const double v = x / zeta;
    s.add(v);
    s2.add(v * v);
  });
  const double mean = s.value() / static_cast<double>(K);
  const double var =
      std::max(0.0, s2.value() / static_cast<double>(K) - mean * mean) / static_cast<double>(K - 1) *
      static_cast<double>(K);
  const double se = std::sqrt(var / static_cast<double>(K));
  ErgodicVecEstimate out;
  out.samples = K;
  out.value.resize(mu.size());
  out.stderr_.resize(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a) {
    out.value[a] = mean * mu[a];
    out.stderr_[a] = se * std::fabs(mu[a]);
  }
  return out;
}

ErgodicMatEstimate thm3_cov(const ScalarGenerator& xi, const ScalarGenerator& tau, const Vec& mu,
                            const Mat& m, std::int64_t K, std::uint64_t seed) {
  if (K < 2) throw std::invalid_argument("K must be >= 2");
  // covariance = < (xi/zeta) m - (xi/zeta)^2 mu mu^T >
  KahanSum s1, s1sq, s2, s2sq;
  ergodic_chain(xi, tau, K, seed, [&](double x, double zeta) {
    const double v = x / zeta;
    s1.add(v);
    s1sq.add(v * v);
    s2.add(v * v);
    s2sq.add(v * v * v * v);
  });
  const double kk = static_cast<double>(K);
  const double mean1 = s1.value() / kk;
  const double mean2 = s2.value() / kk;
  const double se1 = std::sqrt(std::max(0.0, s1sq.value() / kk - mean1 * mean1) / (kk - 1.0));
  const double se2 = std::sqrt(std::max(0.0, s2sq.value() / kk - mean2 * mean2) / (kk - 1.0));
  const Mat mumu = outer(mu, mu);
  ErgodicMatEstimate out;
  out.samples = K;
  out.value = Mat(m.d);
  out.stderr_ = Mat(m.d);
  for (std::size_t e = 0; e < out.value.a.size(); ++e) {
    out.value.a[e] = mean1 * m.a[e] - mean2 * mumu.a[e];
    out.stderr_.a[e] = se1 * std::fabs(m.a[e]) + se2 * std::fabs(mumu.a[e]);
  }
  return out;
}

std::vector<double> g_estimate(const std::vector<double>& u_steps, std::int64_t n,
                               const std::vector<double>& v_grid) {
  if (n < 1 || static_cast<std::int64_t>(u_steps.size()) <= n)
    throw std::invalid_argument("u series shorter than n");
  for (double v : v_grid)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("v must lie in [0,1]");
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1);
  KahanSum acc;
  for (std::int64_t r = 0; r <= n; ++r) {
    acc.add(u_steps[static_cast<std::size_t>(r)]);
    prefix[static_cast<std::size_t>(r)] = acc.value();
  }
  if (prefix.back() <= 0.0) throw std::invalid_argument("U_n must be positive");
  std::vector<double> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    const auto idx = static_cast<std::int64_t>(std::floor(v * static_cast<double>(n)));
    out.push_back(prefix[static_cast<std::size_t>(std::min(idx, n))] / prefix.back());
  }
  return out;
}

RegimePrediction segment_measure(const Vec& lambda, std::vector<double> v_grid,
                                 std::vector<double> g_values) {
  RegimePrediction p;
  p.regime = RegimePrediction::Regime::thm3;
  p.drift = lambda;
  p.covariance = Mat::zero(static_cast<int>(lambda.size()));
  p.g_grid_v = std::move(v_grid);
  p.g_values = std::move(g_values);
  return p;
}

MomentPair backward_moments(const ScalarSeries& series, const std::vector<MixtureLaw>& mixtures,
                            std::int64_t n) {
  if (n < 0 || n > series.n() || n >= static_cast<std::int64_t>(mixtures.size()) + 0)
    throw std::invalid_argument("n out of range");
  const int d = mixtures.front().dim();
  MomentPair out;
  out.mean.assign(static_cast<std::size_t>(d), 0.0);
  out.cov = Mat(d);
  for (std::int64_t r = 0; r <= n; ++r) {
    const double pi = series.pi[static_cast<std::size_t>(r)];
    if (pi == 0.0) continue;
    const MixtureLaw& mix = mixtures[static_cast<std::size_t>(r)];
    if (mix.empty()) continue;
    const Moments mo = mix.moments();
    for (int a = 0; a < d; ++a) {
      out.mean[static_cast<std::size_t>(a)] += pi * mo.mean[static_cast<std::size_t>(a)];
      for (int b = 0; b < d; ++b)
        out.cov(a, b) += pi * mo.second(a, b) -
                         pi * pi * mo.mean[static_cast<std::size_t>(a)] *
                             mo.mean[static_cast<std::size_t>(b)];
    }
  }
  return out;
}

}  // namespace contagion
