#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "contagion/displacement.hpp"

using namespace contagion;

namespace {

// Uniform t with coordinates in [-3, 3], decorrelated across calls.
Vec random_t(Rng& rng, int d) {
  Vec t(static_cast<std::size_t>(d));
  for (auto& c : t) c = 6.0 * rng.uniform() - 3.0;
  return t;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

Mat mat1(double a) {
  Mat m(1);
  m(0, 0) = a;
  return m;
}

bool psd(const Mat& m) {
  for (double ev : sym_eigenvalues(m))
    if (ev < -1e-9) return false;
  return true;
}

}  // namespace

TEST_CASE("closed-form transforms") {
  SUBCASE("standard gaussian") {
    const auto law = DisplacementLaw::gaussian({0.0, 0.0}, Mat::identity(2));
    const Complex v = law.chf({1.0, 0.0});
    CHECK(v.real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
  SUBCASE("point mass is a pure phase") {
    const auto law = DisplacementLaw::point_mass1(1.5);
    const Complex v = law.chf({2.0});
    CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.real() == doctest::Approx(std::cos(3.0)).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(std::sin(3.0)).epsilon(1e-12));
  }
  SUBCASE("rademacher vanishes at pi/2") {
    const Complex v = DisplacementLaw::rademacher().chf({std::numbers::pi / 2.0});
    CHECK(std::abs(v) <= 1e-12);
  }
}

TEST_CASE("transform invariants at random arguments") {
  Rng rng(42);
  const DisplacementLaw laws[] = {
      DisplacementLaw::rademacher(),
      DisplacementLaw::gaussian1(0.3, 2.0),
      DisplacementLaw::uniform_box({-1.0}, {2.0}),
      DisplacementLaw::point_mass1(-0.7),
      DisplacementLaw::finite_discrete({{0.0}, {1.0}, {3.0}}, {0.2, 0.5, 0.3}),
  };
  for (const auto& law : laws) {
    CHECK(std::abs(law.chf(Vec{0.0}) - Complex{1.0, 0.0}) <= 1e-15);
    for (int i = 0; i < 20; ++i) {
      const Vec t = random_t(rng, 1);
      const Vec mt{-t[0]};
      CHECK(std::abs(law.chf(t)) <= 1.0 + 1e-12);
      CHECK(std::abs(law.chf(mt) - std::conj(law.chf(t))) <= 1e-12);
    }
  }
}

TEST_CASE("moments") {
  SUBCASE("rademacher") {
    const auto m = DisplacementLaw::rademacher().moments();
    CHECK(m.mean[0] == 0.0);
    CHECK(m.second(0, 0) == 1.0);
  }
  SUBCASE("uniform box on [0, 1]") {
    const auto m = DisplacementLaw::uniform_box({0.0}, {1.0}).moments();
    CHECK(m.mean[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.second(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("two-point mixture") {
    const MixtureLaw mix({DisplacementLaw::point_mass1(2.0), DisplacementLaw::point_mass1(0.0)},
                         {0.5, 0.5});
    const auto m = mix.moments();
    CHECK(m.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.second(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("centered second moment is psd") {
    const auto law =
        DisplacementLaw::gaussian({1.0, -1.0}, mat2(2.0, 0.5, 0.5, 1.0));
    const auto m = law.moments();
    const Mat c = m.second - outer(m.mean, m.mean);
    CHECK(psd(c));
  }
}

TEST_CASE("sampling agrees with the law") {
  Rng rng(7);
  const int n = 100'000;
  SUBCASE("empirical mean and empirical transform, gaussian") {
    const auto law = DisplacementLaw::gaussian1(0.5, 1.5);
    double s = 0.0;
    Complex e{0.0, 0.0};
    const Vec t{1.0};
    for (int i = 0; i < n; ++i) {
      const Vec x = law.sample(rng);
      s += x[0];
      e += Complex{std::cos(x[0]), std::sin(x[0])};
    }
    CHECK(std::fabs(s / n - 0.5) <= 4.0 * std::sqrt(1.5 / n));
    CHECK(std::abs(e / static_cast<double>(n) - law.chf(t)) <= 4.0 / std::sqrt(n));
  }
  SUBCASE("finite discrete frequencies") {
    const auto law = DisplacementLaw::finite_discrete({{0.0}, {1.0}}, {0.25, 0.75});
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += law.sample(rng)[0] > 0.5 ? 1 : 0;
    CHECK(std::fabs(static_cast<double>(ones) / n - 0.75) <=
          4.0 * std::sqrt(0.75 * 0.25 / n));
  }
  SUBCASE("uniform box stays in the box") {
    const auto law = DisplacementLaw::uniform_box({-1.0, 2.0}, {1.0, 3.0});
    for (int i = 0; i < 1000; ++i) {
      const Vec x = law.sample(rng);
      CHECK(x[0] >= -1.0);
      CHECK(x[0] <= 1.0);
      CHECK(x[1] >= 2.0);
      CHECK(x[1] <= 3.0);
    }
  }
}

TEST_CASE("joint displacement couplings") {
  Rng rng(11);
  SUBCASE("common copy repeats one draw") {
    const auto joint = JointDisplacement::common_copy(DisplacementLaw::gaussian1(0.0, 1.0), 3);
    REQUIRE(joint.k() == 3);
    for (int i = 0; i < 100; ++i) {
      const auto ys = joint.sample_joint(rng);
      REQUIRE(ys.size() == 3);
      CHECK(ys[0][0] == ys[1][0]);
      CHECK(ys[1][0] == ys[2][0]);
    }
  }
  SUBCASE("independent coordinates are uncorrelated") {
    const auto joint = JointDisplacement::iid(DisplacementLaw::gaussian1(0.0, 1.0), 2);
    const int n = 100'000;
    double sxy = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto ys = joint.sample_joint(rng);
      sx += ys[0][0];
      sy += ys[1][0];
      sxy += ys[0][0] * ys[1][0];
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    CHECK(std::fabs(cov) <= 3.0 / std::sqrt(n));
  }
  SUBCASE("heterogeneous marginals") {
    const auto joint = JointDisplacement::independent(
        {DisplacementLaw::point_mass1(1.0), DisplacementLaw::point_mass1(-1.0)});
    const auto ys = joint.sample_joint(rng);
    CHECK(ys[0][0] == 1.0);
    CHECK(ys[1][0] == -1.0);
  }
}

TEST_CASE("mixture transform is the weighted component sum") {
  Rng rng(13);
  const MixtureLaw mix({DisplacementLaw::gaussian1(0.0, 1.0), DisplacementLaw::point_mass1(2.0),
                        DisplacementLaw::rademacher()},
                       {1.0, 2.0, 1.0});
  for (int i = 0; i < 20; ++i) {
    const Vec t = random_t(rng, 1);
    const Complex direct = 0.25 * DisplacementLaw::gaussian1(0.0, 1.0).chf(t) +
                           0.50 * DisplacementLaw::point_mass1(2.0).chf(t) +
                           0.25 * DisplacementLaw::rademacher().chf(t);
    CHECK(std::abs(mix.chf(t) - direct) <= 1e-12);
  }
}

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(DisplacementLaw::gaussian({0.0, 0.0}, mat2(1.0, 0.9, 0.2, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(DisplacementLaw::gaussian({0.0}, mat1(-1.0)), std::invalid_argument);
  CHECK_THROWS_AS(DisplacementLaw::finite_discrete({{0.0}, {1.0}}, {0.5, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DisplacementLaw::uniform_box({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS(DisplacementLaw::gaussian1(0.0, 1.0).outcomes());
  CHECK(DisplacementLaw::rademacher().is_discrete());
  CHECK_FALSE(DisplacementLaw::uniform_box({0.0}, {1.0}).is_discrete());
}
