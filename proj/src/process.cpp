#include "contagion/process.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace contagion {

void FiniteDiscreteDistribution::add(const std::vector<std::int64_t>& key, double prob) {
  p[key] += prob;
}

double FiniteDiscreteDistribution::total() const {
  double s = 0.0;
  for (const auto& [k, v] : p) s += v;
  return s;
}

Complex FiniteDiscreteDistribution::fourier(const Vec& t) const {
  Complex s{0.0, 0.0};
  for (const auto& [key, prob] : p) {
    double phase = 0.0;
    for (std::size_t i = 0; i < key.size(); ++i)
      phase += t[i] * (static_cast<double>(key[i]) / scale);
    s += prob * std::polar(1.0, phase);
  }
  return s;
}

std::vector<std::int64_t> FiniteDiscreteDistribution::to_lattice(const Vec& x) const {
  std::vector<std::int64_t> key(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double scaled = x[i] * scale;
    const double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) > 1e-6)
      throw std::invalid_argument("coordinate off the lattice");
    key[i] = static_cast<std::int64_t>(rounded);
  }
  return key;
}

ProcessState ProcessState::init(const std::vector<InitPoint>& initial, Rng rng,
                                bool track_mother_counts) {
  if (initial.empty()) throw std::invalid_argument("empty initial configuration");
  ProcessState s;
  s.rng_ = std::move(rng);
  s.dim_ = static_cast<int>(initial.front().x.size());
  s.track_counts_ = track_mother_counts;
  s.gen_offsets_.push_back(0);
  double w0 = 0.0;
  for (std::size_t j = 0; j < initial.size(); ++j) {
    const InitPoint& p = initial[j];
    if (static_cast<int>(p.x.size()) != s.dim_)
      throw std::invalid_argument("initial point dimension mismatch");
    if (p.w < 0.0 || p.u < 0.0) throw std::invalid_argument("negative initial attribute");
    w0 += p.w;
    s.points_.push_back(PointRecord{0, static_cast<std::int32_t>(j), p.x, p.w, p.u, std::nullopt});
    s.sampler_.append(p.w);
    s.total_u_.add(p.u);
    if (track_mother_counts) s.mother_counts_.push_back(0);
  }
  if (w0 <= 0.0) throw std::invalid_argument("initial configuration has zero total weight");
  return s;
}

void ProcessState::step(const StepEnvironment& env) {
  // the mother is drawn even when k = 0
  last_mother_ = sampler_.sample(rng_);
  if (track_counts_) ++mother_counts_[last_mother_];
  // copy, not reference: the daughter push_backs below may reallocate points_
  const Vec mother_x = points_[last_mother_].x;
  const MotherRef ref{points_[last_mother_].generation, points_[last_mother_].index};
  ++generation_;
  gen_offsets_.push_back(points_.size());
  if (env.k == 0) return;
  if (env.joint == nullptr || env.joint->k() != env.k ||
      static_cast<int>(env.attrs.size()) != env.k)
    throw std::invalid_argument("malformed step environment");
  if (env.joint->dim() != dim_) throw std::invalid_argument("environment dimension mismatch");
  const std::vector<Vec> draws = env.joint->sample_joint(rng_);
  for (int l = 0; l < env.k; ++l) {
    Vec x = mother_x;
    for (int i = 0; i < dim_; ++i) x[static_cast<std::size_t>(i)] += draws[l][i];
    const auto [w, u] = env.attrs[static_cast<std::size_t>(l)];
    points_.push_back(PointRecord{generation_, static_cast<std::int32_t>(l), std::move(x), w, u, ref});
    sampler_.append(w);
    total_u_.add(u);
    if (track_counts_) mother_counts_.push_back(0);
  }
}

void ProcessState::run(std::span<const StepEnvironment> envs) {
  for (const StepEnvironment& env : envs) step(env);
}

void write_points_csv(std::ostream& os, const ProcessState& state) {
  const int d = state.dim();
  os << "generation,index";
  for (int i = 0; i < d; ++i) os << ",x_" << i;
  os << ",w,u,mother_generation,mother_index\n";
  char buf[40];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const PointRecord& p : state.points()) {
    os << p.generation << ',' << p.index;
    for (int i = 0; i < d; ++i) {
      os << ',';
      put(p.x[static_cast<std::size_t>(i)]);
    }
    os << ',';
    put(p.w);
    os << ',';
    put(p.u);
    if (p.mother)
      os << ',' << p.mother->generation << ',' << p.mother->index << '\n';
    else
      os << ",,\n";
  }
}

std::vector<MixtureLaw> generation_mixtures(std::span<const StepEnvironment> envs,
                                            const std::vector<InitPoint>& initial,
                                            std::int64_t n) {
  if (n > static_cast<std::int64_t>(envs.size()))
    throw std::out_of_range("n exceeds available environments");
  std::vector<MixtureLaw> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  {
    std::vector<DisplacementLaw> comps;
    std::vector<double> weights;
    for (const InitPoint& p : initial) {
      comps.push_back(DisplacementLaw::point_mass(p.x));
      weights.push_back(p.w);
    }
    out.emplace_back(std::move(comps), std::move(weights));
  }
  for (std::int64_t r = 1; r <= n; ++r) {
    const StepEnvironment& env = envs[static_cast<std::size_t>(r - 1)];
    if (env.k == 0 || env.w_total() <= 0.0) {
      out.emplace_back();  // undefined mixture; pi_r = 0 makes it unused
      continue;
    }
    std::vector<DisplacementLaw> comps;
    std::vector<double> weights;
    for (int j = 0; j < env.k; ++j) {
      comps.push_back(env.joint->marginal(j));
      weights.push_back(env.attrs[static_cast<std::size_t>(j)].first);
    }
    out.emplace_back(std::move(comps), std::move(weights));
  }
  return out;
}

BackwardSampler::BackwardSampler(std::span<const StepEnvironment> envs,
                                 const std::vector<InitPoint>& initial, std::int64_t n)
    : n_(n) {
  if (n < 0 || n > static_cast<std::int64_t>(envs.size()))
    throw std::out_of_range("n exceeds available environments");
  const ScalarSeries series = scalar_series(envs.first(static_cast<std::size_t>(n)), initial);
  pi_ = series.pi;
  mixtures_ = generation_mixtures(envs, initial, n);
}

Vec BackwardSampler::sample(Rng& rng) const {
  Vec x = mixtures_.front().sample(rng);  // I_0 = 1
  for (std::int64_t r = 1; r <= n_; ++r) {
    const double p = pi_[static_cast<std::size_t>(r)];
    if (p <= 0.0) continue;
    if (rng.uniform() < p) {
      const Vec y = mixtures_[static_cast<std::size_t>(r)].sample(rng);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    }
  }
  return x;
}

Vec backward_sample_mother(std::span<const StepEnvironment> envs,
                           const std::vector<InitPoint>& initial, std::int64_t n, Rng& rng) {
  return BackwardSampler(envs, initial, n).sample(rng);
}

namespace {

// Lattice scale making every coordinate integer (powers of ten up to 1e9).
double detect_scale(const std::vector<Vec>& coords) {
  for (double scale = 1.0; scale <= 1e9; scale *= 10.0) {
    bool ok = true;
    for (const Vec& x : coords) {
      for (double v : x) {
        const double s = v * scale;
        if (std::fabs(s - std::round(s)) > 1e-9 * std::max(1.0, std::fabs(s))) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return scale;
  }
  throw std::invalid_argument("supports do not fit an integer lattice");
}

struct LatticePoint {
  std::vector<std::int64_t> x;
  double w;
};

// Joint displacement outcomes of one step: list of (k lattice vectors, prob).
std::vector<std::pair<std::vector<std::vector<std::int64_t>>, double>> joint_outcomes(
    const StepEnvironment& env, double scale) {
  const auto to_lat = [&](const Vec& v) {
    std::vector<std::int64_t> key(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      key[i] = static_cast<std::int64_t>(std::llround(v[i] * scale));
    return key;
  };
  std::vector<std::pair<std::vector<std::vector<std::int64_t>>, double>> out;
  if (env.joint->coupling() == JointDisplacement::Coupling::common_copy) {
    for (const auto& [v, q] : env.joint->marginal(0).outcomes()) {
      std::vector<std::vector<std::int64_t>> tuple(static_cast<std::size_t>(env.k), to_lat(v));
      out.emplace_back(std::move(tuple), q);
    }
    return out;
  }
  // cartesian product over independent marginals
  out.emplace_back(std::vector<std::vector<std::int64_t>>{}, 1.0);
  for (int j = 0; j < env.k; ++j) {
    const auto marg = env.joint->marginal(j).outcomes();
    std::vector<std::pair<std::vector<std::vector<std::int64_t>>, double>> next;
    next.reserve(out.size() * marg.size());
    for (const auto& [tuple, q] : out) {
      for (const auto& [v, qm] : marg) {
        auto t = tuple;
        t.push_back(to_lat(v));
        next.emplace_back(std::move(t), q * qm);
      }
    }
    out = std::move(next);
  }
  return out;
}

struct EnumContext {
  std::span<const StepEnvironment> envs;
  double scale;
  std::int64_t target_n;
  int target_j;
  std::int64_t max_outcomes;
  std::int64_t leaves = 0;
  FiniteDiscreteDistribution* dist;
  std::vector<std::size_t> gen_offsets;
};

void enumerate_rec(EnumContext& ctx, std::vector<LatticePoint>& points, double total_w,
                   std::int64_t step, double prob) {
  if (step > ctx.target_n) {
    if (++ctx.leaves > ctx.max_outcomes)
      throw std::overflow_error("enumeration outcome count exceeds max_outcomes");
    const std::size_t flat =
        ctx.gen_offsets[static_cast<std::size_t>(ctx.target_n)] + static_cast<std::size_t>(ctx.target_j);
    if (flat >= points.size()) throw std::out_of_range("point index out of range for generation");
    ctx.dist->add(points[flat].x, prob);
    return;
  }
  const StepEnvironment& env = ctx.envs[static_cast<std::size_t>(step - 1)];
  if (ctx.gen_offsets.size() == static_cast<std::size_t>(step))
    ctx.gen_offsets.push_back(points.size());
  else
    ctx.gen_offsets[static_cast<std::size_t>(step)] = points.size();
  if (env.k == 0) {
    // mother draw is distributionally irrelevant here; marginalize it out
    enumerate_rec(ctx, points, total_w, step + 1, prob);
    return;
  }
  const auto outcomes = joint_outcomes(env, ctx.scale);
  const std::size_t n_before = points.size();
  for (std::size_t m = 0; m < n_before; ++m) {
    if (points[m].w <= 0.0) continue;
    const double p_mother = points[m].w / total_w;
    for (const auto& [tuple, q] : outcomes) {
      double new_w = 0.0;
      for (int l = 0; l < env.k; ++l) {
        LatticePoint np;
        np.x = points[m].x;
        for (std::size_t i = 0; i < np.x.size(); ++i) np.x[i] += tuple[static_cast<std::size_t>(l)][i];
        np.w = env.attrs[static_cast<std::size_t>(l)].first;
        new_w += np.w;
        points.push_back(std::move(np));
      }
      enumerate_rec(ctx, points, total_w + new_w, step + 1, prob * p_mother * q);
      points.resize(n_before);
    }
  }
}

}  // namespace

FiniteDiscreteDistribution exact_enumerate(std::span<const StepEnvironment> envs,
                                           const std::vector<InitPoint>& initial, std::int64_t n,
                                           int j, std::int64_t max_outcomes) {
  if (n < 0 || n > static_cast<std::int64_t>(envs.size()))
    throw std::out_of_range("n exceeds available environments");
  std::vector<Vec> coords;
  for (const InitPoint& p : initial) coords.push_back(p.x);
  for (std::int64_t r = 1; r <= n; ++r) {
    const StepEnvironment& env = envs[static_cast<std::size_t>(r - 1)];
    for (int l = 0; l < env.k; ++l)
      for (const auto& [v, q] : env.joint->marginal(l).outcomes()) coords.push_back(v);
  }
  FiniteDiscreteDistribution dist;
  dist.scale = detect_scale(coords);

  std::vector<LatticePoint> points;
  double total_w = 0.0;
  for (const InitPoint& p : initial) {
    points.push_back(LatticePoint{dist.to_lattice(p.x), p.w});
    total_w += p.w;
  }
  if (total_w <= 0.0) throw std::invalid_argument("zero total initial weight");

  EnumContext ctx{envs, dist.scale, n, j, max_outcomes, 0, &dist, {0}};
  enumerate_rec(ctx, points, total_w, 1, 1.0);
  if (std::fabs(dist.total() - 1.0) > 1e-12)
    throw std::logic_error("enumerated probabilities do not sum to 1");
  return dist;
}

double mother_count_expectation(const ScalarSeries& series, double w_rj, std::int64_t r,
                                std::int64_t n) {
  if (r >= n) throw std::invalid_argument("requires r < n");
  double s = 0.0;
  for (std::int64_t m = r; m < n; ++m) s += 1.0 / series.W[static_cast<std::size_t>(m)];
  return w_rj * s;
}

double ancestry_mean(const ScalarSeries& series, int k_n, std::int64_t r) {
  return static_cast<double>(k_n) * series.pi[static_cast<std::size_t>(r)];
}

bool has_ancestor(const ProcessState& state, std::size_t flat, std::int32_t r, std::int32_t i) {
  const PointRecord* p = &state.point(flat);
  while (true) {
    if (p->generation == r && p->index == i) return true;
    if (!p->mother || p->generation <= r) return false;
    p = &state.point(state.flat_of(p->mother->generation, p->mother->index));
  }
}

}  // namespace contagion
