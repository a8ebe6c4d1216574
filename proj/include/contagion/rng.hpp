#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace contagion {

// splitmix64 finalizer, used to mix (base_seed, stream_index) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One deterministic random stream: std::mt19937_64 (sequence fixed by the
// standard) seeded through splitmix64. Gaussian variates come from Box-Muller
// on 53-bit uniforms, so a (seed, stream) pair reproduces exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream per replicate: hash of base seed and stream index.
  static Rng derive(std::uint64_t base_seed, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(base_seed) + 0x632be59bd9b4e019ULL * (stream + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Kahan compensated accumulator; keeps running totals (W_n, U_n) accurate for
// n up to 1e7.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace contagion
