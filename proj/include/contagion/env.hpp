#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "contagion/displacement.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// A root point of the process: location, reproduction weight, resource mass.
struct InitPoint {
  Vec x;
  double w = 1.0;
  double u = 1.0;
};

// One generation of the environment sequence: offspring count, per-point
// (w, u) attributes, and the joint displacement law of the k daughters.
struct StepEnvironment {
  int k = 0;
  std::vector<std::pair<double, double>> attrs;        // (w, u), length k
  std::shared_ptr<const JointDisplacement> joint;      // null iff k == 0

  double w_total() const {
    double s = 0.0;
    for (const auto& a : attrs) s += a.first;
    return s;
  }
  double u_total() const {
    double s = 0.0;
    for (const auto& a : attrs) s += a.second;
    return s;
  }
};

// Scalar sequence generator (the xi_n and tau_n drivers). Constant and
// Periodic are deterministic; IidFiniteSupport and TwoStateMarkov are
// stationary random sequences, reproducible from the stream seed.
class ScalarGenerator {
 public:
  struct Constant {
    double c;
  };
  struct IidFiniteSupport {
    std::vector<double> values;
    std::vector<double> probs;
  };
  struct Periodic {
    std::vector<double> cycle;
  };
  struct TwoStateMarkov {
    double p01, p10;       // transition probabilities out of state 0 / state 1
    double emit0, emit1;   // emitted values
  };

  static ScalarGenerator constant(double c);
  static ScalarGenerator iid(std::vector<double> values, std::vector<double> probs);
  static ScalarGenerator periodic(std::vector<double> cycle);
  static ScalarGenerator two_state_markov(double p01, double p10, double emit0, double emit1);

  bool is_random() const;
  double min_value() const;
  double max_value() const;
  double stationary_mean() const;
  void require_nonnegative(const char* what) const;

  // Stateful realization of the sequence; TwoStateMarkov starts from its
  // stationary distribution.
  class Stream {
   public:
    Stream(const ScalarGenerator& g, Rng rng);
    double next();

   private:
    const ScalarGenerator* g_;
    Rng rng_;
    std::size_t i_ = 0;
    int state_ = 0;
  };
  Stream stream(Rng rng) const { return Stream(*this, std::move(rng)); }

 private:
  using Repr = std::variant<Constant, IidFiniteSupport, Periodic, TwoStateMarkov>;
  Repr v_;
  explicit ScalarGenerator(Repr v) : v_(std::move(v)) {}
  friend class Stream;
};

// Slowly varying modulation of the power-law regime: L = 1 or (ln(n+e))^beta.
struct SlowlyVarying {
  double beta = 0.0;  // beta == 0 gives L == 1
  double operator()(std::int64_t n) const;
  static SlowlyVarying one() { return SlowlyVarying{0.0}; }
  static SlowlyVarying log_pow(double beta) { return SlowlyVarying{beta}; }
};

// Offspring counts per step, cycled. Default: one daughter per step.
struct OffspringSpec {
  std::vector<int> cycle{1};
  int at(std::int64_t step) const;  // step >= 1
};

// Per-point resource values.
struct ResourceSpec {
  enum class Kind { constant, match_weight };
  Kind kind = Kind::constant;
  double value = 1.0;
  static ResourceSpec constant(double v) { return ResourceSpec{Kind::constant, v}; }
  static ResourceSpec match_weight() { return ResourceSpec{Kind::match_weight, 0.0}; }
};

// How the k daughter displacements of one step are built: one marginal law
// applied i.i.d. or as a common copy across the daughters.
struct DisplacementSpec {
  DisplacementLaw law;
  JointDisplacement::Coupling coupling = JointDisplacement::Coupling::independent;
};

struct ExplicitStepSpec {
  int k = 0;
  std::vector<double> w;  // per point; length k
  std::vector<double> u;  // per point; length k
};

// Generator for the total-weight sequence {w_n}.
class WeightRegime {
 public:
  struct Explicit {
    std::vector<ExplicitStepSpec> steps;
  };
  struct PowerLaw {
    ScalarGenerator xi;
    double alpha;
    SlowlyVarying L;
  };
  struct Exponential {
    ScalarGenerator xi;
    ScalarGenerator tau;
  };

  static WeightRegime explicit_steps(std::vector<ExplicitStepSpec> steps);
  static WeightRegime power_law(ScalarGenerator xi, double alpha,
                                SlowlyVarying L = SlowlyVarying::one(),
                                OffspringSpec offspring = {}, ResourceSpec u = {});
  static WeightRegime exponential(ScalarGenerator xi, ScalarGenerator tau,
                                  OffspringSpec offspring = {}, ResourceSpec u = {});

  enum class Kind { explicit_steps, power_law, exponential };
  Kind kind() const;
  const PowerLaw* as_power_law() const { return std::get_if<PowerLaw>(&v_); }
  const Exponential* as_exponential() const { return std::get_if<Exponential>(&v_); }
  const OffspringSpec& offspring() const { return offspring_; }
  const ResourceSpec& resource() const { return resource_; }

 private:
  std::variant<Explicit, PowerLaw, Exponential> v_;
  OffspringSpec offspring_;
  ResourceSpec resource_;
  WeightRegime(std::variant<Explicit, PowerLaw, Exponential> v, OffspringSpec o, ResourceSpec r)
      : v_(std::move(v)), offspring_(std::move(o)), resource_(r) {}
  friend std::vector<StepEnvironment> materialize(const WeightRegime&, std::int64_t,
                                                  std::uint64_t, int, const DisplacementSpec&);
  friend std::vector<double> weight_series(const WeightRegime&, std::int64_t, std::uint64_t);
};

// Realizes the environment sequence for steps 1..n_steps. Deterministic
// function of (regime, seed).
std::vector<StepEnvironment> materialize(const WeightRegime& regime, std::int64_t n_steps,
                                         std::uint64_t seed, int d,
                                         const DisplacementSpec& displacement);

// Just the totals w_n, n = 1..n_steps, for large-n scalar diagnostics where
// materializing attribute vectors would waste memory.
std::vector<double> weight_series(const WeightRegime& regime, std::int64_t n_steps,
                                  std::uint64_t seed);

// Derived scalar sequences, index 0..n (0 is the initial generation).
struct ScalarSeries {
  std::vector<double> w, W, pi, u, U;
  std::int64_t n() const { return static_cast<std::int64_t>(w.size()) - 1; }
};

ScalarSeries scalar_series(std::span<const StepEnvironment> envs,
                           const std::vector<InitPoint>& initial);

// Variant taking per-step totals (w_r, u_r) for r >= 1 directly.
ScalarSeries scalar_series_from_totals(const std::vector<double>& w_steps,
                                       const std::vector<double>& u_steps, double w0, double u0);

// Diagnostic table of U_{floor(eps*n)} / U_n for the mass-escape condition
// of the power-law mean-measure results. u_steps[r] is u_r, r = 0..>=n.
std::vector<double> check_uep(const std::vector<double>& u_steps, std::int64_t n,
                              const std::vector<double>& eps_grid);

}  // namespace contagion
