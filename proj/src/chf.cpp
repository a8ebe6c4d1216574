#include "contagion/chf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace contagion {

std::vector<Vec> default_t_grid(int d, int points, double span) {
  std::vector<Vec> grid;
  for (int axis = 0; axis < d; ++axis) {
    for (int i = 0; i < points; ++i) {
      Vec t(static_cast<std::size_t>(d), 0.0);
      t[static_cast<std::size_t>(axis)] =
          points == 1 ? 0.0 : -span + 2.0 * span * static_cast<double>(i) / (points - 1);
      grid.push_back(std::move(t));
    }
  }
  return grid;
}

Complex empirical_chf(std::span<const Vec> xs, std::span<const double> ws, const Vec& t) {
  if (xs.size() != ws.size()) throw std::invalid_argument("sample/weight size mismatch");
  double total = 0.0;
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ws[i] < 0.0) throw std::invalid_argument("negative weight");
    total += ws[i];
    s += ws[i] * std::polar(1.0, dot(t, xs[i]));
  }
  if (total <= 0.0) throw std::invalid_argument("zero total weight");
  return s / total;
}

Complex empirical_chf(std::span<const Vec> xs, const Vec& t) {
  if (xs.empty()) throw std::invalid_argument("empty sample");
  Complex s{0.0, 0.0};
  for (const Vec& x : xs) s += std::polar(1.0, dot(t, x));
  return s / static_cast<double>(xs.size());
}

ChfEngine::ChfEngine(std::span<const StepEnvironment> envs, const std::vector<InitPoint>& initial)
    : envs_(envs),
      initial_(initial),
      series_(scalar_series(envs, initial)),
      mixtures_(generation_mixtures(envs, initial, static_cast<std::int64_t>(envs.size()))) {}

Complex ChfEngine::f_r(std::int64_t r, const Vec& t) const {
  const MixtureLaw& m = mixtures_[static_cast<std::size_t>(r)];
  if (m.empty()) return Complex{1.0, 0.0};
  return m.chf(t);
}

Complex ChfEngine::phi_product(std::int64_t n, const Vec& t) const {
  if (n < 0 || n > horizon()) throw std::out_of_range("n out of range");
  Complex prod{1.0, 0.0};
  for (std::int64_t r = 0; r <= n; ++r) {
    const double pi = series_.pi[static_cast<std::size_t>(r)];
    if (pi == 0.0) continue;
    prod *= 1.0 + pi * (f_r(r, t) - 1.0);
  }
  return prod;
}

Complex ChfEngine::phi_point(std::int64_t n, int j, const Vec& t) const {
  if (n < 1 || n > horizon()) throw std::out_of_range("n out of range");
  const StepEnvironment& env = envs_[static_cast<std::size_t>(n - 1)];
  if (j < 0 || j >= env.k) throw std::out_of_range("j out of range for generation n");
  return env.joint->marginal(j).chf(t) * phi_product(n - 1, t);
}

Complex ChfEngine::uf_r(std::int64_t r, const Vec& t) const {
  Complex s{0.0, 0.0};
  if (r == 0) {
    for (const InitPoint& p : initial_) s += p.u * std::polar(1.0, dot(t, p.x));
    return s;
  }
  const StepEnvironment& env = envs_[static_cast<std::size_t>(r - 1)];
  for (int j = 0; j < env.k; ++j)
    s += env.attrs[static_cast<std::size_t>(j)].second * env.joint->marginal(j).chf(t);
  return s;
}

Complex ChfEngine::mean_measure_chf(std::int64_t n, const Vec& t) const {
  if (n < 0 || n > horizon()) throw std::out_of_range("n out of range");
  const double U_n = series_.U[static_cast<std::size_t>(n)];
  if (U_n <= 0.0) throw std::invalid_argument("U_n must be positive");
  Complex acc{0.0, 0.0};
  Complex prod{1.0, 0.0};  // phi_product(r-1) rolled forward
  acc += uf_r(0, t);       // phi_{0,j} are the initial point masses
  for (std::int64_t r = 1; r <= n; ++r) {
    const double pi_prev = series_.pi[static_cast<std::size_t>(r - 1)];
    if (pi_prev != 0.0) prod *= 1.0 + pi_prev * (f_r(r - 1, t) - 1.0);
    acc += uf_r(r, t) * prod;
  }
  return acc / U_n;
}

ChfEngine::BigPi ChfEngine::big_pi(const Vec& t, double tail_tol) const {
  const std::int64_t H = horizon();
  // suffix sums of pi
  std::vector<double> suffix(static_cast<std::size_t>(H) + 2, 0.0);
  for (std::int64_t r = H; r >= 1; --r)
    suffix[static_cast<std::size_t>(r)] =
        suffix[static_cast<std::size_t>(r) + 1] + series_.pi[static_cast<std::size_t>(r)];

  // beyond-horizon tail from a geometric fit to the trailing decay
  std::int64_t last = H;
  while (last >= 1 && series_.pi[static_cast<std::size_t>(last)] == 0.0) --last;
  double beyond = 0.0;
  if (last == H && H >= 3) {
    const std::int64_t m = std::min<std::int64_t>(10, H / 2);
    const double head = series_.pi[static_cast<std::size_t>(H - m)];
    const double tail = series_.pi[static_cast<std::size_t>(H)];
    if (head > 0.0 && tail > 0.0) {
      const double rho = std::pow(tail / head, 1.0 / static_cast<double>(m));
      if (rho < 1.0 - 1e-9)
        beyond = tail * rho / (1.0 - rho);
      else
        beyond = std::numeric_limits<double>::infinity();
    }
  }

  std::int64_t trunc = -1;
  for (std::int64_t N = 0; N <= H; ++N) {
    if (suffix[static_cast<std::size_t>(N) + 1] + beyond < tail_tol) {
      trunc = N;
      break;
    }
  }
  if (trunc < 0)
    throw std::runtime_error(
        "pi tail does not fall below tail_tol: weights are not summable at this horizon "
        "(W_infinity = infinity regime)");
  return BigPi{phi_product(trunc, t), 2.0 * (suffix[static_cast<std::size_t>(trunc) + 1] + beyond),
               trunc};
}

ChfEngine::UAverage ChfEngine::u_average(const Vec& t, std::int64_t horizon, double stab_tol,
                                         bool cyclic_tail) const {
  const std::int64_t H = this->horizon();
  if (horizon < 10) throw std::invalid_argument("averaging horizon too small");
  if (!cyclic_tail && horizon > H)
    throw std::out_of_range("averaging horizon exceeds materialized environments");

  const std::int64_t mat = std::min(horizon, H);
  std::vector<Complex> S(static_cast<std::size_t>(mat) + 1);
  Complex acc{0.0, 0.0};
  for (std::int64_t r = 0; r <= mat; ++r) {
    acc += uf_r(r, t);
    S[static_cast<std::size_t>(r)] = acc;
  }
  const auto U_at = [&](std::int64_t n) -> double {
    if (n <= H) return series_.U[static_cast<std::size_t>(n)];
    return series_.U[static_cast<std::size_t>(H)] +
           static_cast<double>(n - H) * series_.u[static_cast<std::size_t>(H)];
  };
  const auto S_at = [&](std::int64_t n) -> Complex {
    if (n <= mat) return S[static_cast<std::size_t>(n)];
    return S[static_cast<std::size_t>(mat)] + static_cast<double>(n - mat) * uf_r(mat, t);
  };

  const Complex a_full = S_at(horizon) / U_at(horizon);
  const Complex a_dec = S_at(horizon / 10) / U_at(horizon / 10);
  const double rel = std::abs(a_full - a_dec) / std::max(std::abs(a_full), 1e-300);
  return UAverage{a_full, rel, rel < stab_tol};
}

Complex ChfEngine::thm1_limit_chf(const Vec& t, double tail_tol, std::int64_t averaging_horizon,
                                  double stab_tol, bool cyclic_tail) const {
  const BigPi pi = big_pi(t, tail_tol);
  const UAverage avg = u_average(t, averaging_horizon, stab_tol, cyclic_tail);
  if (!avg.stabilized)
    throw std::runtime_error("u-weighted average did not stabilize at this horizon");
  return pi.value * avg.value;
}

}  // namespace contagion
