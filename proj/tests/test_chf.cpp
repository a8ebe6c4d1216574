#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contagion/chf.hpp"

using namespace contagion;

namespace {

std::vector<InitPoint> origin() { return {InitPoint{Vec{0.0}, 1.0, 1.0}}; }

DisplacementSpec spec(DisplacementLaw law) {
  return DisplacementSpec{std::move(law), JointDisplacement::Coupling::independent};
}

std::vector<StepEnvironment> unit_envs(std::int64_t n, const DisplacementLaw& law,
                                       std::uint64_t seed = 1) {
  const auto reg = WeightRegime::power_law(ScalarGenerator::constant(1.0), 0.0);
  return materialize(reg, n, seed, law.dim(), spec(law));
}

std::vector<StepEnvironment> geometric_envs(std::int64_t n, const DisplacementLaw& law,
                                            std::uint64_t seed = 1) {
  const auto reg = WeightRegime::exponential(ScalarGenerator::constant(1.0),
                                             ScalarGenerator::constant(-std::log(2.0)));
  return materialize(reg, n, seed, law.dim(), spec(law));
}

}  // namespace

TEST_CASE("product recursion basics") {
  const auto envs = unit_envs(6, DisplacementLaw::rademacher());
  const ChfEngine eng(envs, origin());
  SUBCASE("n = 0 with one root at the origin") {
    CHECK(std::abs(eng.phi_product(0, {1.3}) - Complex{1.0, 0.0}) <= 1e-15);
  }
  SUBCASE("value one at t = 0") {
    for (int n = 0; n <= 6; ++n)
      CHECK(std::abs(eng.phi_product(n, {0.0}) - Complex{1.0, 0.0}) <= 1e-14);
  }
  SUBCASE("one-step unfolding") {
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
      const Vec t{6.0 * rng.uniform() - 3.0};
      for (int n = 1; n <= 6; ++n) {
        const Complex lhs = eng.phi_product(n, t);
        const double pi = eng.series().pi[n];
        const Complex rhs =
            eng.phi_product(n - 1, t) * (1.0 + pi * (eng.f_r(n, t) - 1.0));
        CHECK(std::abs(lhs - rhs) <= 1e-12);
      }
    }
  }
  SUBCASE("modulus never exceeds one") {
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
      const Vec t{20.0 * rng.uniform() - 10.0};
      CHECK(std::abs(eng.phi_product(6, t)) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("degenerate steps have a closed-form product") {
  // Y = c surely: phi_point(n, 0) = e^{itc} prod_{r=1}^{n-1} (1 + pi_r (e^{itc} - 1))
  const double c = 0.7;
  const auto envs = unit_envs(5, DisplacementLaw::point_mass1(c));
  const ChfEngine eng(envs, origin());
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    const Vec t{6.0 * rng.uniform() - 3.0};
    const Complex phase{std::cos(t[0] * c), std::sin(t[0] * c)};
    Complex expect = phase;
    for (int r = 1; r <= 4; ++r) expect *= 1.0 + eng.series().pi[r] * (phase - 1.0);
    CHECK(std::abs(eng.phi_point(5, 0, t) - expect) <= 1e-13);
  }
}

TEST_CASE("point transform matches exact enumeration") {
  const auto envs = unit_envs(6, DisplacementLaw::rademacher(), 42);
  const ChfEngine eng(envs, origin());
  for (int n = 1; n <= 6; ++n) {
    const auto law = exact_enumerate(envs, origin(), n, 0, 1'000'000);
    for (const Vec& t : default_t_grid(1)) {
      CHECK(std::abs(eng.phi_point(n, 0, t) - law.fourier(t)) <= 1e-10);
    }
  }
}

TEST_CASE("mean-measure transform") {
  SUBCASE("n = 0 reduces to the initial mixture") {
    const auto envs = unit_envs(1, DisplacementLaw::rademacher());
    const ChfEngine eng(envs, {{Vec{2.0}, 1.0, 1.0}});
    const Vec t{0.9};
    CHECK(std::abs(eng.mean_measure_chf(0, t) -
                   Complex{std::cos(1.8), std::sin(1.8)}) <= 1e-14);
  }
  SUBCASE("matches the u-weighted mixture of enumerated point laws") {
    const auto envs = unit_envs(5, DisplacementLaw::rademacher(), 7);
    const ChfEngine eng(envs, origin());
    const auto& s = eng.series();
    for (const Vec& t : default_t_grid(1)) {
      // direct mixture: (1/U_n) [u_0 e^{it.0} + sum_r u_r law_r.fourier]
      Complex acc{1.0, 0.0};  // root at the origin, u_0 = 1
      for (int r = 1; r <= 5; ++r) {
        const auto law = exact_enumerate(envs, origin(), r, 0, 1'000'000);
        acc += (s.u[r]) * law.fourier(t);
      }
      acc /= s.U[5];
      CHECK(std::abs(eng.mean_measure_chf(5, t) - acc) <= 1e-10);
    }
  }
}

TEST_CASE("infinite product in the summable regime") {
  const auto envs = geometric_envs(200, DisplacementLaw::rademacher(), 3);
  const ChfEngine eng(envs, origin());
  SUBCASE("value one at t = 0") {
    const auto r = eng.big_pi({0.0}, 1e-10);
    CHECK(std::abs(r.value - Complex{1.0, 0.0}) <= 1e-12);
  }
  SUBCASE("degenerate displacement at zero gives one") {
    const auto zenvs = geometric_envs(200, DisplacementLaw::point_mass1(0.0), 3);
    const ChfEngine zeng(zenvs, origin());
    const auto r = zeng.big_pi({1.7}, 1e-10);
    CHECK(std::abs(r.value - Complex{1.0, 0.0}) <= 1e-12);
  }
  SUBCASE("agrees with a long partial product") {
    // independent oracle: multiply the factors directly to depth 200
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
      const Vec t{6.0 * rng.uniform() - 3.0};
      Complex direct{1.0, 0.0};
      for (int r = 0; r <= 200; ++r)
        direct *= 1.0 + eng.series().pi[r] * (eng.f_r(r, t) - 1.0);
      const auto got = eng.big_pi(t, 1e-10);
      CHECK(std::abs(got.value - direct) <= got.error_bound + 1e-10);
    }
  }
  SUBCASE("error bound is honest under deeper truncation") {
    const Vec t{1.0};
    const auto coarse = eng.big_pi(t, 1e-4);
    const auto fine = eng.big_pi(t, 1e-12);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.error_bound);
    CHECK(fine.truncation >= coarse.truncation);
  }
  SUBCASE("non-summable weights are refused") {
    const auto flat = unit_envs(500, DisplacementLaw::rademacher());
    const ChfEngine feng(flat, origin());
    CHECK_THROWS(feng.big_pi({1.0}, 1e-10));
  }
}

TEST_CASE("u-weighted average and the limit transform") {
  const auto envs = geometric_envs(200, DisplacementLaw::rademacher(), 3);
  const ChfEngine eng(envs, origin());
  SUBCASE("stabilizes under the cyclic tail") {
    const auto avg = eng.u_average({0.8}, 10'000'000'000LL, 1e-6, true);
    CHECK(avg.stabilized);
    CHECK(avg.rel_change <= 1e-6);
  }
  SUBCASE("flat resources average the f's with equal weight") {
    // all u_r equal and f_r identical across r >= 1, so for large horizons
    // the average tends to the common f value
    const auto flat = unit_envs(50, DisplacementLaw::rademacher());
    const ChfEngine feng(flat, origin());
    const Vec t{1.1};
    const auto avg = feng.u_average(t, 10'000'000'000LL, 1e-6, true);
    CHECK(avg.stabilized);
    CHECK(std::abs(avg.value - feng.f_r(1, t)) <= 1e-5);
  }
  SUBCASE("limit transform composes product and average") {
    const Vec t{0.8};
    const Complex lim = eng.thm1_limit_chf(t, 1e-12, 10'000'000'000LL, 1e-6, true);
    const auto prod = eng.big_pi(t, 1e-12);
    const auto avg = eng.u_average(t, 10'000'000'000LL, 1e-6, true);
    CHECK(std::abs(lim - prod.value * avg.value) <= 1e-12);
  }
  SUBCASE("unstabilized horizons are refused") {
    CHECK_THROWS(eng.thm1_limit_chf({0.8}, 1e-12, 100, 1e-12, false));
  }
}

TEST_CASE("empirical transform") {
  SUBCASE("single point at the origin") {
    const std::vector<Vec> xs = {{0.0}};
    CHECK(std::abs(empirical_chf(xs, {2.0}) - Complex{1.0, 0.0}) <= 1e-15);
  }
  SUBCASE("symmetric two-point sample gives cos") {
    const std::vector<Vec> xs = {{1.0}, {-1.0}};
    const Vec t{0.7};
    CHECK(std::abs(empirical_chf(xs, t) - Complex{std::cos(0.7), 0.0}) <= 1e-15);
  }
  SUBCASE("weights shift the mixture") {
    const std::vector<Vec> xs = {{1.0}, {-1.0}};
    const std::vector<double> ws = {3.0, 1.0};
    const Vec t{0.7};
    const Complex expect = 0.75 * Complex{std::cos(0.7), std::sin(0.7)} +
                           0.25 * Complex{std::cos(0.7), -std::sin(0.7)};
    CHECK(std::abs(empirical_chf(xs, ws, t) - expect) <= 1e-15);
  }
  SUBCASE("monte carlo gaussian matches the closed form") {
    Rng rng(19);
    const auto law = DisplacementLaw::gaussian1(0.0, 1.0);
    std::vector<Vec> xs;
    const int n = 100'000;
    xs.reserve(n);
    for (int i = 0; i < n; ++i) xs.push_back(law.sample(rng));
    const Vec t{1.0};
    CHECK(std::abs(empirical_chf(xs, t) - law.chf(t)) <= 4.0 / std::sqrt(n));
  }
  SUBCASE("zero total weight is rejected") {
    const std::vector<Vec> xs = {{1.0}};
    const std::vector<double> ws = {0.0};
    CHECK_THROWS(empirical_chf(xs, ws, {1.0}));
  }
}

TEST_CASE("default grid") {
  const auto grid = default_t_grid(1);
  CHECK(grid.size() == 25);
  CHECK(grid.front()[0] == doctest::Approx(-3.0));
  CHECK(grid.back()[0] == doctest::Approx(3.0));
  const auto grid2 = default_t_grid(2, 5, 1.0);
  for (const Vec& t : grid2) CHECK(t.size() == 2);
}
