#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contagion/stats.hpp"

using namespace contagion;

namespace {

Mat mat1(double v) {
  Mat m(1);
  m(0, 0) = v;
  return m;
}

std::vector<double> uniforms(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs.push_back(rng.uniform());
  return xs;
}

}  // namespace

TEST_CASE("weighted sample moments") {
  SUBCASE("symmetric two-point sample") {
    const WeightedSample ws{{{1.0}, {-1.0}}, {1.0, 1.0}};
    const auto m = sample_moments(ws);
    CHECK(m.mean[0] == 0.0);
    CHECK(m.cov(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("weights tilt the mean") {
    const WeightedSample ws{{{1.0}, {-1.0}}, {3.0, 1.0}};
    const auto m = sample_moments(ws);
    CHECK(m.mean[0] == doctest::Approx(0.5).epsilon(1e-14));
    // E X^2 - mean^2 = 1 - 0.25
    CHECK(m.cov(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("weight rescaling changes nothing") {
    const WeightedSample a{{{2.0}, {0.0}, {1.0}}, {1.0, 2.0, 3.0}};
    const WeightedSample b{{{2.0}, {0.0}, {1.0}}, {10.0, 20.0, 30.0}};
    const auto ma = sample_moments(a), mb = sample_moments(b);
    CHECK(ma.mean[0] == doctest::Approx(mb.mean[0]).epsilon(1e-14));
    CHECK(ma.cov(0, 0) == doctest::Approx(mb.cov(0, 0)).epsilon(1e-14));
  }
  SUBCASE("a single positive weight cannot carry a covariance") {
    CHECK_THROWS(sample_moments({{{1.0}, {2.0}}, {1.0, 0.0}}));
  }
  SUBCASE("monte carlo normal sample") {
    Rng rng(3);
    const auto law = DisplacementLaw::gaussian1(1.0, 2.0);
    WeightedSample ws;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) {
      ws.x.push_back(law.sample(rng));
      ws.w.push_back(1.0);
    }
    const auto m = sample_moments(ws);
    CHECK(std::fabs(m.mean[0] - 1.0) <= 4.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(m.cov(0, 0) - 2.0) <= 4.0 * 2.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("one-sample ks") {
  const auto unif = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  SUBCASE("uniform sample against the uniform cdf") {
    const int n = 10'000;
    CHECK(ks_1d(uniforms(n, 7), unif) <= 1.36 / std::sqrt(n) * 1.5);
  }
  SUBCASE("shifted sample is far from the uniform cdf") {
    auto xs = uniforms(1000, 7);
    for (double& x : xs) x += 0.4;
    CHECK(ks_1d(xs, unif) >= 0.3);
  }
  SUBCASE("exact distance for a single point") {
    // empirical cdf jumps 0 -> 1 at 0.5: sup gap vs uniform is 0.5
    CHECK(ks_1d({0.5}, unif) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("two-sample ks") {
  SUBCASE("identical samples") {
    const auto xs = uniforms(500, 9);
    CHECK(two_sample_ks(xs, xs) == 0.0);
  }
  SUBCASE("symmetric in its arguments") {
    const auto a = uniforms(400, 1);
    const auto b = uniforms(300, 2);
    CHECK(two_sample_ks(a, b) == doctest::Approx(two_sample_ks(b, a)).epsilon(1e-15));
  }
  SUBCASE("disjoint supports have distance one") {
    auto a = uniforms(100, 3);
    auto b = uniforms(100, 4);
    for (double& x : b) x += 5.0;
    CHECK(two_sample_ks(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("same law stays under the asymptotic band") {
    const int n = 20'000;
    const auto a = uniforms(n, 5);
    const auto b = uniforms(n, 6);
    CHECK(two_sample_ks(a, b) <= 1.95 * std::sqrt(2.0 / n) * 1.5);
  }
}

TEST_CASE("weighted ks reduces to the plain one under flat weights") {
  const auto unif = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  const auto xs = uniforms(2000, 11);
  std::vector<std::pair<double, double>> vw;
  for (double x : xs) vw.emplace_back(x, 1.0);
  CHECK(weighted_ks_1d(vw, unif) == doctest::Approx(ks_1d(xs, unif)).epsilon(1e-12));
}

TEST_CASE("weighted ks concentrates on the heavy points") {
  // all mass on the point 0.5: cdf gap against uniform is 0.5
  std::vector<std::pair<double, double>> vw{{0.1, 0.0}, {0.5, 7.0}, {0.9, 0.0}};
  const auto unif = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  CHECK(weighted_ks_1d(vw, unif) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("total variation distance") {
  FiniteDiscreteDistribution p, q;
  p.scale = 1.0;
  q.scale = 1.0;
  p.add({0}, 0.5);
  p.add({1}, 0.5);
  SUBCASE("distance to itself is zero") { CHECK(tv_distance(p, p) == 0.0); }
  SUBCASE("disjoint laws are at distance one") {
    q.add({2}, 1.0);
    CHECK(tv_distance(p, q) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("symmetry and the half-l1 value") {
    q.add({0}, 0.25);
    q.add({1}, 0.75);
    CHECK(tv_distance(p, q) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(tv_distance(q, p) == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("mismatched lattice scales are rejected") {
    q.scale = 10.0;
    q.add({0}, 1.0);
    CHECK_THROWS(tv_distance(p, q));
  }
}

TEST_CASE("standard normal cdf") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));
  CHECK(normal_cdf(-1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(normal_cdf(8.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normality check") {
  const auto law = DisplacementLaw::gaussian1(0.0, 1.0);
  SUBCASE("true normal sample passes") {
    Rng rng(13);
    std::vector<Vec> xs;
    for (int i = 0; i < 10'000; ++i) xs.push_back(law.sample(rng));
    const auto rep = normality_check(xs, mat1(1.0));
    CHECK(rep.pass);
    CHECK(rep.ks_pass);
    CHECK(rep.cov_pass);
    CHECK(rep.ks_per_coordinate[0] <= rep.ks_threshold);
  }
  SUBCASE("wrong target covariance fails the covariance gate") {
    Rng rng(13);
    std::vector<Vec> xs;
    for (int i = 0; i < 10'000; ++i) xs.push_back(law.sample(rng));
    const auto rep = normality_check(xs, mat1(4.0));
    CHECK_FALSE(rep.pass);
    // sample cov ~ 1 against target 4: relative error ~ 3/4
    CHECK(rep.cov_rel_error == doctest::Approx(0.75).epsilon(0.05));
  }
  SUBCASE("constant sample fails the ks gate") {
    const std::vector<Vec> xs(5000, Vec{0.3});
    CHECK_FALSE(normality_check(xs, mat1(1.0)).pass);
  }
  SUBCASE("degenerate target with nondegenerate data is rejected") {
    Rng rng(17);
    std::vector<Vec> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(law.sample(rng));
    CHECK_THROWS(normality_check(xs, mat1(0.0)));
  }
  SUBCASE("tiny samples are rejected") {
    const std::vector<Vec> xs(10, Vec{0.0});
    CHECK_THROWS(normality_check(xs, mat1(1.0)));
  }
}

TEST_CASE("mean and standard error") {
  const std::vector<double> xs = {1.0, 3.0};
  const auto ms = mean_stderr(xs);
  CHECK(ms.mean == doctest::Approx(2.0).epsilon(1e-15));
  // sample sd = sqrt(2), stderr = 1
  CHECK(ms.stderr_ == doctest::Approx(1.0).epsilon(1e-12));
  const auto u = uniforms(100'000, 23);
  const auto mu = mean_stderr(u);
  CHECK(std::fabs(mu.mean - 0.5) <= 4.0 * mu.stderr_);
  CHECK(mu.stderr_ == doctest::Approx(std::sqrt(1.0 / 12.0 / 100'000)).epsilon(0.05));
}
