#include "contagion/env.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace contagion {

ScalarGenerator ScalarGenerator::constant(double c) { return ScalarGenerator(Constant{c}); }

ScalarGenerator ScalarGenerator::iid(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("values/probs size mismatch");
  double s = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("negative probability");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("probabilities do not sum to 1");
  return ScalarGenerator(IidFiniteSupport{std::move(values), std::move(probs)});
}

ScalarGenerator ScalarGenerator::periodic(std::vector<double> cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty cycle");
  return ScalarGenerator(Periodic{std::move(cycle)});
}

ScalarGenerator ScalarGenerator::two_state_markov(double p01, double p10, double emit0,
                                                  double emit1) {
  if (p01 <= 0.0 || p01 > 1.0 || p10 <= 0.0 || p10 > 1.0)
    throw std::invalid_argument("transition probabilities must lie in (0,1]");
  return ScalarGenerator(TwoStateMarkov{p01, p10, emit0, emit1});
}

bool ScalarGenerator::is_random() const {
  return std::holds_alternative<IidFiniteSupport>(v_) || std::holds_alternative<TwoStateMarkov>(v_);
}

double ScalarGenerator::min_value() const {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Constant>) return g.c;
        if constexpr (std::is_same_v<T, IidFiniteSupport>) {
          double m = g.values.front();
          for (double v : g.values) m = std::min(m, v);
          return m;
        }
        if constexpr (std::is_same_v<T, Periodic>) {
          double m = g.cycle.front();
          for (double v : g.cycle) m = std::min(m, v);
          return m;
        }
        if constexpr (std::is_same_v<T, TwoStateMarkov>) return std::min(g.emit0, g.emit1);
      },
      v_);
}

double ScalarGenerator::max_value() const {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Constant>) return g.c;
        if constexpr (std::is_same_v<T, IidFiniteSupport>) {
          double m = g.values.front();
          for (double v : g.values) m = std::max(m, v);
          return m;
        }
        if constexpr (std::is_same_v<T, Periodic>) {
          double m = g.cycle.front();
          for (double v : g.cycle) m = std::max(m, v);
          return m;
        }
        if constexpr (std::is_same_v<T, TwoStateMarkov>) return std::max(g.emit0, g.emit1);
      },
      v_);
}

double ScalarGenerator::stationary_mean() const {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Constant>) return g.c;
        if constexpr (std::is_same_v<T, IidFiniteSupport>) {
          double m = 0.0;
          for (std::size_t i = 0; i < g.values.size(); ++i) m += g.values[i] * g.probs[i];
          return m;
        }
        if constexpr (std::is_same_v<T, Periodic>) {
          double m = 0.0;
          for (double v : g.cycle) m += v;
          return m / static_cast<double>(g.cycle.size());
        }
        if constexpr (std::is_same_v<T, TwoStateMarkov>) {
          const double pi0 = g.p10 / (g.p01 + g.p10);
          return pi0 * g.emit0 + (1.0 - pi0) * g.emit1;
        }
      },
      v_);
}

void ScalarGenerator::require_nonnegative(const char* what) const {
  if (min_value() < 0.0)
    throw std::invalid_argument(std::string(what) + " generator emits negative values");
}

ScalarGenerator::Stream::Stream(const ScalarGenerator& g, Rng rng) : g_(&g), rng_(std::move(rng)) {
  if (const auto* m = std::get_if<TwoStateMarkov>(&g.v_)) {
    // stationary start
    const double pi0 = m->p10 / (m->p01 + m->p10);
    state_ = rng_.uniform() < pi0 ? 0 : 1;
  }
}

double ScalarGenerator::Stream::next() {
  return std::visit(
      [&](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return g.c;
        } else if constexpr (std::is_same_v<T, IidFiniteSupport>) {
          double u = rng_.uniform();
          for (std::size_t i = 0; i + 1 < g.values.size(); ++i) {
            if (u < g.probs[i]) return g.values[i];
            u -= g.probs[i];
          }
          return g.values.back();
        } else if constexpr (std::is_same_v<T, Periodic>) {
          return g.cycle[i_++ % g.cycle.size()];
        } else {  // TwoStateMarkov
          const double v = state_ == 0 ? g.emit0 : g.emit1;
          const double p = state_ == 0 ? g.p01 : g.p10;
          if (rng_.uniform() < p) state_ ^= 1;
          return v;
        }
      },
      g_->v_);
}

double SlowlyVarying::operator()(std::int64_t n) const {
  if (beta == 0.0) return 1.0;
  return std::pow(std::log(static_cast<double>(n) + 2.718281828459045235), beta);
}

int OffspringSpec::at(std::int64_t step) const {
  return cycle[static_cast<std::size_t>((step - 1) % static_cast<std::int64_t>(cycle.size()))];
}

WeightRegime WeightRegime::explicit_steps(std::vector<ExplicitStepSpec> steps) {
  for (const auto& s : steps) {
    if (s.k < 0) throw std::invalid_argument("negative offspring count");
    if (static_cast<int>(s.w.size()) != s.k || static_cast<int>(s.u.size()) != s.k)
      throw std::invalid_argument("attribute list length != k");
    for (double w : s.w)
      if (w < 0.0) throw std::invalid_argument("negative weight in explicit spec");
    for (double u : s.u)
      if (u < 0.0) throw std::invalid_argument("negative resource in explicit spec");
  }
  return WeightRegime(Explicit{std::move(steps)}, OffspringSpec{}, ResourceSpec{});
}

WeightRegime WeightRegime::power_law(ScalarGenerator xi, double alpha, SlowlyVarying L,
                                     OffspringSpec offspring, ResourceSpec u) {
  if (!(alpha > -1.0)) throw std::invalid_argument("power-law regime requires alpha > -1");
  xi.require_nonnegative("xi");
  for (int k : offspring.cycle)
    if (k < 0) throw std::invalid_argument("negative offspring count");
  if (offspring.cycle.empty()) throw std::invalid_argument("empty offspring cycle");
  return WeightRegime(PowerLaw{std::move(xi), alpha, L}, std::move(offspring), u);
}

WeightRegime WeightRegime::exponential(ScalarGenerator xi, ScalarGenerator tau,
                                       OffspringSpec offspring, ResourceSpec u) {
  xi.require_nonnegative("xi");
  for (int k : offspring.cycle)
    if (k < 0) throw std::invalid_argument("negative offspring count");
  if (offspring.cycle.empty()) throw std::invalid_argument("empty offspring cycle");
  return WeightRegime(Exponential{std::move(xi), std::move(tau)}, std::move(offspring), u);
}

WeightRegime::Kind WeightRegime::kind() const {
  if (std::holds_alternative<Explicit>(v_)) return Kind::explicit_steps;
  if (std::holds_alternative<PowerLaw>(v_)) return Kind::power_law;
  return Kind::exponential;
}

namespace {

// Shared joint-law cache keyed by offspring count.
class JointCache {
 public:
  explicit JointCache(const DisplacementSpec& spec) : spec_(&spec) {}
  std::shared_ptr<const JointDisplacement> get(int k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    auto joint = std::make_shared<const JointDisplacement>(
        spec_->coupling == JointDisplacement::Coupling::common_copy
            ? JointDisplacement::common_copy(spec_->law, k)
            : JointDisplacement::iid(spec_->law, k));
    cache_.emplace(k, joint);
    return joint;
  }

 private:
  const DisplacementSpec* spec_;
  std::map<int, std::shared_ptr<const JointDisplacement>> cache_;
};

}  // namespace

std::vector<double> weight_series(const WeightRegime& regime, std::int64_t n_steps,
                                  std::uint64_t seed) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(n_steps));
  if (const auto* ex = std::get_if<WeightRegime::Explicit>(&regime.v_)) {
    if (static_cast<std::int64_t>(ex->steps.size()) < n_steps)
      throw std::invalid_argument("explicit regime shorter than n_steps");
    for (std::int64_t n = 1; n <= n_steps; ++n) {
      double s = 0.0;
      for (double wi : ex->steps[static_cast<std::size_t>(n - 1)].w) s += wi;
      w.push_back(s);
    }
  } else if (const auto* pl = regime.as_power_law()) {
    auto xi = pl->xi.stream(Rng::derive(seed, 0));
    for (std::int64_t n = 1; n <= n_steps; ++n)
      w.push_back(xi.next() * std::pow(static_cast<double>(n), pl->alpha) * pl->L(n));
  } else {
    const auto* ex = regime.as_exponential();
    auto xi = ex->xi.stream(Rng::derive(seed, 0));
    auto tau = ex->tau.stream(Rng::derive(seed, 1));
    double s_n = 0.0;
    for (std::int64_t n = 1; n <= n_steps; ++n) {
      s_n += tau.next();
      w.push_back(xi.next() * std::exp(s_n));
    }
  }
  return w;
}

std::vector<StepEnvironment> materialize(const WeightRegime& regime, std::int64_t n_steps,
                                         std::uint64_t seed, int d,
                                         const DisplacementSpec& displacement) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (displacement.law.dim() != d)
    throw std::invalid_argument("displacement law dimension != d");
  JointCache joints(displacement);

  std::vector<StepEnvironment> envs;
  envs.reserve(static_cast<std::size_t>(n_steps));

  if (const auto* ex = std::get_if<WeightRegime::Explicit>(&regime.v_)) {
    if (static_cast<std::int64_t>(ex->steps.size()) < n_steps)
      throw std::invalid_argument("explicit regime shorter than n_steps");
    for (std::int64_t n = 1; n <= n_steps; ++n) {
      const ExplicitStepSpec& s = ex->steps[static_cast<std::size_t>(n - 1)];
      StepEnvironment env;
      env.k = s.k;
      for (int j = 0; j < s.k; ++j)
        env.attrs.emplace_back(s.w[static_cast<std::size_t>(j)], s.u[static_cast<std::size_t>(j)]);
      if (s.k > 0) env.joint = joints.get(s.k);
      envs.push_back(std::move(env));
    }
    return envs;
  }

  const std::vector<double> w_totals = weight_series(regime, n_steps, seed);
  const OffspringSpec& off = regime.offspring();
  const ResourceSpec& res = regime.resource();
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    StepEnvironment env;
    env.k = off.at(n);
    const double wn = w_totals[static_cast<std::size_t>(n - 1)];
    if (env.k > 0) {
      // equal split of w_n across the k daughters
      const double wj = wn / env.k;
      const double uj = res.kind == ResourceSpec::Kind::match_weight ? wj : res.value;
      env.attrs.assign(static_cast<std::size_t>(env.k), {wj, uj});
      env.joint = joints.get(env.k);
    }
    envs.push_back(std::move(env));
  }
  return envs;
}

ScalarSeries scalar_series_from_totals(const std::vector<double>& w_steps,
                                       const std::vector<double>& u_steps, double w0, double u0) {
  if (w0 <= 0.0) throw std::invalid_argument("initial weight must be positive");
  if (w_steps.size() != u_steps.size()) throw std::invalid_argument("w/u length mismatch");
  ScalarSeries s;
  const std::size_t n = w_steps.size();
  s.w.reserve(n + 1);
  s.W.reserve(n + 1);
  s.pi.reserve(n + 1);
  s.u.reserve(n + 1);
  s.U.reserve(n + 1);
  KahanSum W, U;
  W.add(w0);
  U.add(u0);
  s.w.push_back(w0);
  s.W.push_back(W.value());
  s.pi.push_back(1.0);  // pi_0 = 1 exactly
  s.u.push_back(u0);
  s.U.push_back(U.value());
  for (std::size_t r = 0; r < n; ++r) {
    if (w_steps[r] < 0.0 || u_steps[r] < 0.0)
      throw std::invalid_argument("negative step total");
    W.add(w_steps[r]);
    U.add(u_steps[r]);
    if (W.value() <= 0.0) throw std::invalid_argument("W_n vanished: no selectable point");
    s.w.push_back(w_steps[r]);
    s.W.push_back(W.value());
    s.pi.push_back(w_steps[r] / W.value());
    s.u.push_back(u_steps[r]);
    s.U.push_back(U.value());
  }
  return s;
}

ScalarSeries scalar_series(std::span<const StepEnvironment> envs,
                           const std::vector<InitPoint>& initial) {
  if (initial.empty()) throw std::invalid_argument("empty initial configuration");
  double w0 = 0.0, u0 = 0.0;
  for (const InitPoint& p : initial) {
    if (p.w < 0.0 || p.u < 0.0) throw std::invalid_argument("negative initial attribute");
    w0 += p.w;
    u0 += p.u;
  }
  std::vector<double> w_steps, u_steps;
  w_steps.reserve(envs.size());
  u_steps.reserve(envs.size());
  for (const StepEnvironment& e : envs) {
    w_steps.push_back(e.w_total());
    u_steps.push_back(e.u_total());
  }
  return scalar_series_from_totals(w_steps, u_steps, w0, u0);
}

std::vector<double> check_uep(const std::vector<double>& u_steps, std::int64_t n,
                              const std::vector<double>& eps_grid) {
  if (n < 10) throw std::invalid_argument("n must be >= 10");
  if (static_cast<std::int64_t>(u_steps.size()) <= n)
    throw std::invalid_argument("u series shorter than n");
  for (double e : eps_grid)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1);
  KahanSum acc;
  for (std::int64_t r = 0; r <= n; ++r) {
    acc.add(u_steps[static_cast<std::size_t>(r)]);
    prefix[static_cast<std::size_t>(r)] = acc.value();
  }
  std::vector<double> out;
  out.reserve(eps_grid.size());
  for (double e : eps_grid) {
    const auto m = static_cast<std::int64_t>(std::floor(e * static_cast<double>(n)));
    out.push_back(prefix[static_cast<std::size_t>(m)] / prefix[static_cast<std::size_t>(n)]);
  }
  return out;
}

}  // namespace contagion
