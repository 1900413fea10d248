#pragma once

// Real polynomials in ascending-coefficient form: Descartes sign counts and
// positive root isolation by companion-matrix eigenvalues + Newton polishing.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fcl/network.hpp"

namespace fcl {

struct PolyRoot {
  double value;
  int multiplicity;
};

/// Coefficients from the constant term upward.
template <typename T>
T poly_eval(std::span<const double> c, T x) {
  T acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

template <typename T>
T poly_eval_derivative(std::span<const double> c, T x) {
  T acc(0);
  for (std::size_t i = c.size(); i-- > 1;) acc = acc * x + T(static_cast<double>(i) * c[i]);
  return acc;
}

inline int descartes_sign_changes(std::span<const double> c) {
  int changes = 0;
  int last = 0;
  for (double a : c) {
    if (a == 0.0) continue;
    const int s = a > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  if (last == 0) throw DomainError("descartes_sign_changes: all-zero polynomial");
  return changes;
}

namespace detail {

inline std::complex<double> newton_polish(std::span<const double> c, std::complex<double> z) {
  for (int it = 0; it < 100; ++it) {
    const auto p = poly_eval(c, z);
    const auto dp = poly_eval_derivative(c, z);
    if (dp == std::complex<double>(0.0)) break;
    const auto step = p / dp;
    const auto next = z - step;
    // Stop once the update no longer reduces the residual (clustered roots
    // converge linearly and stall at the noise floor).
    if (std::abs(poly_eval(c, next)) >= std::abs(p)) break;
    z = next;
    if (std::abs(step) <= 1e-16 * std::abs(z)) break;
  }
  return z;
}

}  // namespace detail

/// All complex roots of a polynomial with nonzero leading coefficient.
inline std::vector<std::complex<double>> all_roots(std::span<const double> coeffs) {
  std::vector<double> c(coeffs.begin(), coeffs.end());
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() < 2) return {};
  std::vector<std::complex<double>> roots;
  // zero roots are exact
  std::size_t zeros = 0;
  while (zeros < c.size() - 1 && c[zeros] == 0.0) ++zeros;
  for (std::size_t i = 0; i < zeros; ++i) roots.emplace_back(0.0, 0.0);
  std::vector<double> r(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());
  const int n = static_cast<int>(r.size()) - 1;
  if (n == 0) return roots;

  // rescale u = sigma t so the monic coefficients are balanced
  const double sigma = std::pow(std::abs(r.front() / r.back()), 1.0 / n);
  std::vector<double> q(r.size());
  for (int i = 0; i <= n; ++i) q[i] = r[i] * std::pow(sigma, i) / (r[n] * std::pow(sigma, n));

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -q[i];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("companion eigenvalue solver failed", std::vector<double>(r));
  for (int i = 0; i < n; ++i) {
    const std::complex<double> t = es.eigenvalues()[i];
    roots.push_back(detail::newton_polish(r, t * sigma));
  }
  return roots;
}

/// Positive real roots strictly above `tol`, ascending, with clustered roots
/// merged into one entry of summed multiplicity.
inline std::vector<PolyRoot> positive_roots(std::span<const double> coeffs, double tol = 1e-12) {
  std::vector<double> c(coeffs.begin(), coeffs.end());
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() < 2) throw DomainError("positive_roots requires degree >= 1");
  const int bound = descartes_sign_changes(c);

  std::vector<double> real;
  for (const auto& z : all_roots(c)) {
    const double re = z.real();
    if (std::abs(z.imag()) < 1e-9 * (1.0 + std::abs(re)) && re > std::max(tol, 1e-12))
      real.push_back(re);
  }
  std::sort(real.begin(), real.end());

  std::vector<PolyRoot> out;
  for (double x : real) {
    if (!out.empty() && std::abs(x - out.back().value) <= 1e-7 * std::max(std::abs(x), std::abs(out.back().value))) {
      auto& last = out.back();
      last.value = (last.value * last.multiplicity + x) / (last.multiplicity + 1);
      ++last.multiplicity;
    } else {
      out.push_back({x, 1});
    }
  }
  int total = 0;
  for (const auto& r : out) total += r.multiplicity;
  if (total > bound) {
    std::vector<double> residuals;
    for (const auto& r : out) residuals.push_back(poly_eval<double>(c, r.value));
    throw NumericalError("positive_roots: root count exceeds the Descartes bound", residuals);
  }
  return out;
}

inline int count_with_multiplicity(const std::vector<PolyRoot>& roots) {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

}  // namespace fcl
