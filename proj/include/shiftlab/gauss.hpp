#pragma once

// Gauss-Legendre rules and adaptive interval quadrature.

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "shiftlab/core.hpp"

namespace shiftlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(std::size_t n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are computed once and
/// cached; the returned reference stays valid for the program lifetime.
inline const GaussRule& gauss_legendre(std::size_t n) {
  require(n >= 1, "gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Fixed-order Gauss-Legendre integral of fn over [a, b].
template <class Fn>
auto gauss_integrate(Fn&& fn, double a, double b, std::size_t n) {
  const GaussRule& g = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  using R = decltype(fn(a));
  R s{};
  for (std::size_t i = 0; i < n; ++i) s += g.weights[i] * fn(c + h * g.nodes[i]);
  return s * h;
}

/// Adaptive Gauss-Legendre: a panel is accepted when its 20-point value
/// agrees with the sum over its two halves within the share of tol that the
/// panel's width represents. Returns the integral; `err` gets the summed
/// panel discrepancies.
template <class Fn>
auto adaptive_gauss(Fn&& fn, double a, double b, double tol, double* err = nullptr, int max_depth = 40) {
  using R = decltype(fn(a));
  constexpr std::size_t kOrder = 20;
  double total_err = 0.0;
  const double width = b - a;
  auto rec = [&](auto&& self, double lo, double hi, R whole, int depth) -> R {
    double mid = 0.5 * (lo + hi);
    R left = gauss_integrate(fn, lo, mid, kOrder);
    R right = gauss_integrate(fn, mid, hi, kOrder);
    double diff = std::abs(left + right - whole);
    if (diff <= tol * (hi - lo) / width || depth >= max_depth) {
      total_err += diff;
      return left + right;
    }
    return self(self, lo, mid, left, depth + 1) + self(self, mid, hi, right, depth + 1);
  };
  R whole = gauss_integrate(fn, a, b, kOrder);
  R value = rec(rec, a, b, whole, 0);
  if (err) *err = total_err;
  return value;
}

}  // namespace shiftlab
