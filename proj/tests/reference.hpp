#pragma once

// Test-side reference computations, written independently of the library:
// adaptive Simpson quadrature, a dense Jacobi eigensolver and brute-force
// enumeration of model-cell modes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace reference {

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
    return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Integral of a function with a square-root zero at the right end: the
/// substitution x = b - (b - a) s^2 makes the integrand smooth.
inline double simpson_sqrt_edge(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-13) {
  const double w = b - a;
  return simpson([&](double s) { return f(b - w * s * s) * 2.0 * w * s; }, 0.0,
                 1.0, tol);
}

/// Eigenvalues of a dense symmetric matrix (row-major n x n) by cyclic
/// Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> A,
                                              std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return A[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (at(p, q) == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& d,
                                                   const std::vector<double>& e) {
  const std::size_t n = d.size();
  std::vector<double> A(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) A[i * n + i] = d[i];
  for (std::size_t i = 0; i + 1 < n; ++i) A[i * n + i + 1] = A[(i + 1) * n + i] = e[i];
  return jacobi_eigenvalues(std::move(A), n);
}

struct Modes {
  std::size_t count = 0;
  double sum = 0.0;
};

/// Every (m, j) with m <= m_max, j <= j_max: wavenumber (m - shift) pi / delta,
/// no early exit.
inline Modes enumerate_modes(const std::vector<double>& alpha, double p,
                             double delta, double eps, std::size_t shift,
                             std::size_t m_max = 2000) {
  Modes out;
  for (double a : alpha)
    for (std::size_t m = 1; m <= m_max; ++m) {
      const double k = static_cast<double>(m - shift) * std::numbers::pi / delta;
      const double lambda = p * k * k - a;
      if (lambda < -eps) {
        ++out.count;
        out.sum += -lambda;
      }
    }
  return out;
}

}  // namespace reference

namespace reference {

/// Sign changes of the solution of -y'' - q(x) y = lambda y, y(0) = 0,
/// y'(0) = 1 on (0, x_max], integrated by RK4 with `steps` steps. Equals the
/// number of Dirichlet eigenvalues on [0, x_max] below lambda.
inline std::size_t shooting_nodes(const std::function<double(double)>& q,
                                  double lambda, double x_max,
                                  std::size_t steps) {
  const double h = x_max / static_cast<double>(steps);
  double y = 0.0, v = 1.0, x = 0.0;
  std::size_t nodes = 0;
  auto acc = [&](double xx, double yy) { return -(q(xx) + lambda) * yy; };
  for (std::size_t k = 0; k < steps; ++k) {
    const double k1y = v, k1v = acc(x, y);
    const double k2y = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h, y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h, y + 0.5 * h * k2y);
    const double k4y = v + h * k3v, k4v = acc(x + h, y + h * k3y);
    const double ny = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if ((ny <= 0.0 && y > 0.0) || (ny >= 0.0 && y < 0.0)) ++nodes;
    y = ny;
    x += h;
  }
  return nodes;
}

/// k-th (0-based) Dirichlet eigenvalue in [lo, hi] by bisection on the node
/// count.
inline double shooting_eigenvalue(const std::function<double(double)>& q,
                                  std::size_t k, double lo, double hi,
                                  double x_max, std::size_t steps) {
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shooting_nodes(q, mid, x_max, steps) > k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace reference
