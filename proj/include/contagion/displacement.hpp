#pragma once

#include <complex>
#include <memory>
#include <variant>
#include <vector>

#include "contagion/linalg.hpp"
#include "contagion/rng.hpp"

namespace contagion {

using Complex = std::complex<double>;

struct Moments {
  Vec mean;     // E Y
  Mat second;   // E Y Y^T
};

// One displacement marginal on R^d: exact sampling, closed-form ch.f.,
// first and second moments. All supported families have finite second
// moments, so the uniform-integrability hypotheses of the limit theorems
// hold by construction.
class DisplacementLaw {
 public:
  struct PointMass {
    Vec c;
  };
  struct FiniteDiscrete {
    std::vector<Vec> support;
    std::vector<double> probs;
  };
  struct Gaussian {
    Vec mean;
    Mat cov;
    Mat chol;  // lower factor, built at construction
  };
  struct UniformBox {
    Vec lo, hi;
  };

  static DisplacementLaw point_mass(Vec c);
  static DisplacementLaw finite_discrete(std::vector<Vec> support, std::vector<double> probs);
  static DisplacementLaw gaussian(Vec mean, Mat cov);
  static DisplacementLaw uniform_box(Vec lo, Vec hi);

  // d=1 conveniences
  static DisplacementLaw point_mass1(double c) { return point_mass(Vec{c}); }
  static DisplacementLaw gaussian1(double mean, double var);
  static DisplacementLaw rademacher();  // +-1 with probability 1/2

  int dim() const;
  Complex chf(const Vec& t) const;
  Moments moments() const;
  Vec sample(Rng& rng) const;

  bool is_discrete() const;  // PointMass or FiniteDiscrete
  // Outcome list (value, probability) for discrete variants; throws otherwise.
  std::vector<std::pair<Vec, double>> outcomes() const;

 private:
  std::variant<PointMass, FiniteDiscrete, Gaussian, UniformBox> v_;
  explicit DisplacementLaw(std::variant<PointMass, FiniteDiscrete, Gaussian, UniformBox> v)
      : v_(std::move(v)) {}
};

// Joint law of the k daughter displacements of one generation.
// independent / product_list: coordinates sampled independently;
// common_copy: one draw shared by all k coordinates.
class JointDisplacement {
 public:
  enum class Coupling { independent, common_copy };

  static JointDisplacement independent(std::vector<DisplacementLaw> marginals);
  // k i.i.d. copies of one marginal
  static JointDisplacement iid(const DisplacementLaw& law, int k);
  static JointDisplacement common_copy(DisplacementLaw law, int k);

  int k() const { return k_; }
  int dim() const;
  Coupling coupling() const { return coupling_; }
  const DisplacementLaw& marginal(int j) const;

  std::vector<Vec> sample_joint(Rng& rng) const;

 private:
  Coupling coupling_;
  int k_;
  std::vector<DisplacementLaw> marginals_;  // size k, or size 1 for common_copy
  JointDisplacement(Coupling c, int k, std::vector<DisplacementLaw> m)
      : coupling_(c), k_(k), marginals_(std::move(m)) {}
};

// Weighted mixture of displacement laws; realizes the per-generation
// mixtures (ch.f. f_n, mean mu_n, second moment m_n) and the initial
// location mixture.
class MixtureLaw {
 public:
  MixtureLaw() = default;  // empty mixture (generation with k = 0)
  MixtureLaw(std::vector<DisplacementLaw> components, std::vector<double> weights);

  bool empty() const { return components_.empty(); }
  int dim() const;
  Complex chf(const Vec& t) const;
  Moments moments() const;
  Vec sample(Rng& rng) const;

  const std::vector<DisplacementLaw>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<DisplacementLaw> components_;
  std::vector<double> weights_;  // normalized
};

}  // namespace contagion
