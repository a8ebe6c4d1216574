#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace contagion {

using Vec = std::vector<double>;

// Small dense symmetric-capable d x d matrix, row major. d is the carrier
// dimension (1..3 in practice) so nothing here tries to be clever.
struct Mat {
  int d = 0;
  std::vector<double> a;

  Mat() = default;
  explicit Mat(int dim) : d(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

  static Mat zero(int dim) { return Mat(dim); }
  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }
};

inline Mat operator+(const Mat& x, const Mat& y) {
  Mat r(x.d);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  Mat r(x.d);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

inline Mat operator*(double c, const Mat& x) {
  Mat r(x.d);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = c * x.a[i];
  return r;
}

inline Mat outer(const Vec& x, const Vec& y) {
  Mat m(static_cast<int>(x.size()));
  for (int i = 0; i < m.d; ++i)
    for (int j = 0; j < m.d; ++j) m(i, j) = x[i] * y[j];
  return m;
}

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline double frobenius(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
inline std::vector<double> sym_eigenvalues(const Mat& m0) {
  Mat m = m0;
  const int d = m.d;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        if (std::fabs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < d; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  std::vector<double> ev(d);
  for (int i = 0; i < d; ++i) ev[i] = m(i, i);
  return ev;
}

// Lower Cholesky factor of a PSD matrix. Semidefinite inputs are allowed:
// a pivot below tol (relative to the largest diagonal) zeroes its column.
inline Mat cholesky_psd(const Mat& m, double tol = 1e-12) {
  const int d = m.d;
  double scale = 0.0;
  for (int i = 0; i < d; ++i) scale = std::max(scale, std::fabs(m(i, i)));
  if (scale == 0.0) scale = 1.0;
  Mat l(d);
  for (int j = 0; j < d; ++j) {
    double diag = m(j, j);
    for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag <= tol * scale) {
      if (diag < -1e-10 * scale)
        throw std::invalid_argument("matrix is not positive semidefinite");
      for (int i = j; i < d; ++i) l(i, j) = 0.0;
      continue;
    }
    l(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < d; ++i) {
      double v = m(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

}  // namespace contagion
