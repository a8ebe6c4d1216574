#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "contagion/process.hpp"
#include "contagion/verify.hpp"

using namespace contagion;

namespace {

// Per-replicate simulation digest used to compare scheduling modes bitwise.
std::vector<double> replicate_digest(std::int64_t R, int threads) {
  const auto reg = WeightRegime::power_law(ScalarGenerator::iid({1.0, 2.0}, {0.5, 0.5}), 0.5);
  const auto envs = materialize(
      reg, 500, 77, 2,
      DisplacementSpec{DisplacementLaw::gaussian({0.1, -0.2}, Mat::identity(2)),
                       JointDisplacement::Coupling::independent});
  std::vector<double> out(static_cast<std::size_t>(R));
  for_each_replicate(R, threads, [&](std::int64_t i) {
    ProcessState st = ProcessState::init({InitPoint{Vec{0.0, 0.0}, 1.0, 1.0}},
                                         Rng::derive(77, replicate_stream(i)));
    st.run(envs);
    const auto& last = st.points().back();
    out[static_cast<std::size_t>(i)] = last.x[0] + 3.0 * last.x[1] + st.total_weight();
  });
  return out;
}

}  // namespace

TEST_CASE("parallel replicate fan-out is bitwise equal to the serial loop") {
  const auto serial = replicate_digest(64, 1);
  for (int threads : {2, 4, 8}) {
    const auto par = replicate_digest(64, threads);
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(par[i] == serial[i]);
  }
}

TEST_CASE("every replicate index is visited exactly once") {
  for (int threads : {1, 4}) {
    std::vector<int> hits(257, 0);
    for_each_replicate(257, threads, [&](std::int64_t i) { ++hits[static_cast<std::size_t>(i)]; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("exceptions escape the parallel loop") {
  const auto boom = [](std::int64_t i) {
    if (i == 13) throw std::runtime_error("replicate 13 failed");
  };
  CHECK_THROWS_WITH_AS(for_each_replicate(64, 4, boom), "replicate 13 failed",
                       std::runtime_error);
  CHECK_THROWS_AS(for_each_replicate(64, 1, boom), std::runtime_error);
}

TEST_CASE("zero replicates is a no-op") {
  int calls = 0;
  for_each_replicate(0, 4, [&](std::int64_t) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("replicate streams avoid the environment streams") {
  // materialization uses the low stream indices; replicates must start higher
  std::set<std::uint64_t> seen;
  for (std::int64_t i = 0; i < 100; ++i) {
    const std::uint64_t s = replicate_stream(i);
    CHECK(s >= 16);
    CHECK(seen.insert(s).second);  // all distinct
  }
}

TEST_CASE("derived streams differ and look uniform") {
  SUBCASE("distinct streams from one base seed") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 1000; ++s) firsts.insert(Rng::derive(5, s).next_u64());
    CHECK(firsts.size() == 1000);
  }
  SUBCASE("same (seed, stream) is identical") {
    Rng a = Rng::derive(9, 4), b = Rng::derive(9, 4);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  }
  SUBCASE("uniform marginals") {
    Rng rng(31);
    const int n = 200'000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      acc += u;
    }
    CHECK(std::fabs(acc / n - 0.5) <= 4.0 / std::sqrt(12.0 * n));
  }
  SUBCASE("gaussian moments") {
    Rng rng(33);
    const int n = 200'000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gaussian();
      s1 += g;
      s2 += g * g;
    }
    CHECK(std::fabs(s1 / n) <= 4.0 / std::sqrt(n));
    CHECK(std::fabs(s2 / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("compensated summation beats naive accumulation") {
  KahanSum k;
  double naive = 0.0;
  const double tiny = 1e-16;
  k.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 10'000'000; ++i) {
    k.add(tiny);
    naive += tiny;
  }
  const double expect = 1.0 + 1e-9;
  CHECK(std::fabs(k.value() - expect) <= 1e-15);
  CHECK(std::fabs(k.value() - expect) <= std::fabs(naive - expect));
}

TEST_CASE("verification reports are independent of the thread count") {
  ExperimentConfig cfg = ac6_config();
  const auto a = verify_genealogy(cfg, 1);
  const auto b = verify_genealogy(cfg, 4);
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].name == b.checks[i].name);
    CHECK(a.checks[i].value == b.checks[i].value);  // bitwise, not approximate
    CHECK(a.checks[i].pass == b.checks[i].pass);
  }
  CHECK(a.pass());
}
