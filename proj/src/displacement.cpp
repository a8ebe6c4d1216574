#include "contagion/displacement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace contagion {

namespace {

void check_prob_vector(const std::vector<double>& probs) {
  double s = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("negative probability");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("probabilities do not sum to 1");
}

}  // namespace

DisplacementLaw DisplacementLaw::point_mass(Vec c) {
  if (c.empty()) throw std::invalid_argument("empty point");
  return DisplacementLaw(PointMass{std::move(c)});
}

DisplacementLaw DisplacementLaw::finite_discrete(std::vector<Vec> support,
                                                 std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size())
    throw std::invalid_argument("support/probs size mismatch");
  check_prob_vector(probs);
  const std::size_t d = support.front().size();
  for (const Vec& x : support)
    if (x.size() != d) throw std::invalid_argument("inconsistent support dimension");
  return DisplacementLaw(FiniteDiscrete{std::move(support), std::move(probs)});
}

DisplacementLaw DisplacementLaw::gaussian(Vec mean, Mat cov) {
  const int d = static_cast<int>(mean.size());
  if (cov.d != d) throw std::invalid_argument("mean/cov dimension mismatch");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::fabs(cov(i, j) - cov(j, i)) > 1e-12)
        throw std::invalid_argument("covariance not symmetric");
  // eigenvalues >= -1e-10, clipped at 0 inside cholesky_psd
  Mat chol = cholesky_psd(cov);
  return DisplacementLaw(Gaussian{std::move(mean), std::move(cov), std::move(chol)});
}

DisplacementLaw DisplacementLaw::gaussian1(double mean, double var) {
  Mat cov(1);
  cov(0, 0) = var;
  return gaussian(Vec{mean}, cov);
}

DisplacementLaw DisplacementLaw::rademacher() {
  return finite_discrete({Vec{-1.0}, Vec{1.0}}, {0.5, 0.5});
}

DisplacementLaw DisplacementLaw::uniform_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("bad box bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("lo > hi");
  return DisplacementLaw(UniformBox{std::move(lo), std::move(hi)});
}

int DisplacementLaw::dim() const {
  return std::visit(
      [](const auto& law) -> int {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMass>) return static_cast<int>(law.c.size());
        if constexpr (std::is_same_v<T, FiniteDiscrete>)
          return static_cast<int>(law.support.front().size());
        if constexpr (std::is_same_v<T, Gaussian>) return static_cast<int>(law.mean.size());
        if constexpr (std::is_same_v<T, UniformBox>) return static_cast<int>(law.lo.size());
      },
      v_);
}

Complex DisplacementLaw::chf(const Vec& t) const {
  return std::visit(
      [&](const auto& law) -> Complex {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return std::polar(1.0, dot(t, law.c));
        } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          Complex s{0.0, 0.0};
          for (std::size_t i = 0; i < law.support.size(); ++i)
            s += law.probs[i] * std::polar(1.0, dot(t, law.support[i]));
          return s;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          double q = 0.0;
          const int d = static_cast<int>(law.mean.size());
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q += t[i] * law.cov(i, j) * t[j];
          return std::exp(-0.5 * q) * std::polar(1.0, dot(t, law.mean));
        } else {  // UniformBox
          Complex s{1.0, 0.0};
          for (std::size_t i = 0; i < law.lo.size(); ++i) {
            const double mid = 0.5 * (law.lo[i] + law.hi[i]);
            const double half = 0.5 * (law.hi[i] - law.lo[i]);
            const double x = t[i] * half;
            const double sinc = std::fabs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            s *= sinc * std::polar(1.0, t[i] * mid);
          }
          return s;
        }
      },
      v_);
}

Moments DisplacementLaw::moments() const {
  const int d = dim();
  return std::visit(
      [&](const auto& law) -> Moments {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return Moments{law.c, outer(law.c, law.c)};
        } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          Vec mean(d, 0.0);
          Mat second(d);
          for (std::size_t i = 0; i < law.support.size(); ++i) {
            for (int a = 0; a < d; ++a) {
              mean[a] += law.probs[i] * law.support[i][a];
              for (int b = 0; b < d; ++b)
                second(a, b) += law.probs[i] * law.support[i][a] * law.support[i][b];
            }
          }
          return Moments{std::move(mean), std::move(second)};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return Moments{law.mean, law.cov + outer(law.mean, law.mean)};
        } else {  // UniformBox: per-axis independent uniforms
          Vec mean(d);
          Mat second(d);
          for (int i = 0; i < d; ++i) mean[i] = 0.5 * (law.lo[i] + law.hi[i]);
          for (int i = 0; i < d; ++i) {
            const double len = law.hi[i] - law.lo[i];
            second(i, i) = mean[i] * mean[i] + len * len / 12.0;
            for (int j = 0; j < d; ++j)
              if (j != i) second(i, j) = mean[i] * mean[j];
          }
          return Moments{std::move(mean), std::move(second)};
        }
      },
      v_);
}

Vec DisplacementLaw::sample(Rng& rng) const {
  return std::visit(
      [&](const auto& law) -> Vec {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return law.c;
        } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double u = rng.uniform();
          for (std::size_t i = 0; i + 1 < law.support.size(); ++i) {
            if (u < law.probs[i]) return law.support[i];
            u -= law.probs[i];
          }
          return law.support.back();
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const int d = static_cast<int>(law.mean.size());
          Vec z(d);
          for (int i = 0; i < d; ++i) z[i] = rng.gaussian();
          Vec x = law.mean;
          for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j) x[i] += law.chol(i, j) * z[j];
          return x;
        } else {  // UniformBox
          Vec x(law.lo.size());
          for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = rng.uniform(law.lo[i], law.hi[i]);
          return x;
        }
      },
      v_);
}

bool DisplacementLaw::is_discrete() const {
  return std::holds_alternative<PointMass>(v_) || std::holds_alternative<FiniteDiscrete>(v_);
}

std::vector<std::pair<Vec, double>> DisplacementLaw::outcomes() const {
  if (const auto* pm = std::get_if<PointMass>(&v_)) return {{pm->c, 1.0}};
  if (const auto* fd = std::get_if<FiniteDiscrete>(&v_)) {
    std::vector<std::pair<Vec, double>> out;
    out.reserve(fd->support.size());
    for (std::size_t i = 0; i < fd->support.size(); ++i)
      out.emplace_back(fd->support[i], fd->probs[i]);
    return out;
  }
  throw std::invalid_argument("law has no finite outcome list");
}

JointDisplacement JointDisplacement::independent(std::vector<DisplacementLaw> marginals) {
  if (marginals.empty()) throw std::invalid_argument("empty marginal list");
  const int d = marginals.front().dim();
  for (const auto& m : marginals)
    if (m.dim() != d) throw std::invalid_argument("marginal dimension mismatch");
  const int k = static_cast<int>(marginals.size());
  return JointDisplacement(Coupling::independent, k, std::move(marginals));
}

JointDisplacement JointDisplacement::iid(const DisplacementLaw& law, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<DisplacementLaw> m(static_cast<std::size_t>(k), law);
  return JointDisplacement(Coupling::independent, k, std::move(m));
}

JointDisplacement JointDisplacement::common_copy(DisplacementLaw law, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<DisplacementLaw> m;
  m.push_back(std::move(law));
  return JointDisplacement(Coupling::common_copy, k, std::move(m));
}

int JointDisplacement::dim() const { return marginals_.front().dim(); }

const DisplacementLaw& JointDisplacement::marginal(int j) const {
  if (j < 0 || j >= k_) throw std::out_of_range("marginal index");
  return coupling_ == Coupling::common_copy ? marginals_.front()
                                            : marginals_[static_cast<std::size_t>(j)];
}

std::vector<Vec> JointDisplacement::sample_joint(Rng& rng) const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(k_));
  if (coupling_ == Coupling::common_copy) {
    Vec draw = marginals_.front().sample(rng);
    for (int j = 0; j < k_; ++j) out.push_back(draw);
  } else {
    for (int j = 0; j < k_; ++j) out.push_back(marginals_[static_cast<std::size_t>(j)].sample(rng));
  }
  return out;
}

MixtureLaw::MixtureLaw(std::vector<DisplacementLaw> components, std::vector<double> weights) {
  if (components.empty() || components.size() != weights.size())
    throw std::invalid_argument("component/weight size mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative mixture weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("zero total mixture weight");
  for (double& w : weights) w /= total;
  const int d = components.front().dim();
  for (const auto& c : components)
    if (c.dim() != d) throw std::invalid_argument("mixture dimension mismatch");
  components_ = std::move(components);
  weights_ = std::move(weights);
}

int MixtureLaw::dim() const {
  if (empty()) throw std::logic_error("empty mixture");
  return components_.front().dim();
}

Complex MixtureLaw::chf(const Vec& t) const {
  if (empty()) throw std::logic_error("empty mixture");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < components_.size(); ++i)
    s += weights_[i] * components_[i].chf(t);
  return s;
}

Moments MixtureLaw::moments() const {
  if (empty()) throw std::logic_error("empty mixture");
  const int d = dim();
  Vec mean(d, 0.0);
  Mat second(d);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Moments m = components_[i].moments();
    for (int a = 0; a < d; ++a) {
      mean[a] += weights_[i] * m.mean[a];
      for (int b = 0; b < d; ++b) second(a, b) += weights_[i] * m.second(a, b);
    }
  }
  return Moments{std::move(mean), std::move(second)};
}

Vec MixtureLaw::sample(Rng& rng) const {
  if (empty()) throw std::logic_error("empty mixture");
  double u = rng.uniform();
  std::size_t idx = components_.size() - 1;
  for (std::size_t i = 0; i + 1 < components_.size(); ++i) {
    if (u < weights_[i]) {
      idx = i;
      break;
    }
    u -= weights_[i];
  }
  return components_[idx].sample(rng);
}

}  // namespace contagion
