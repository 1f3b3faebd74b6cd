#pragma once

// Norms on the spaces used throughout: A^p(Omega) (area measure), A^p of the
// unit disk (normalized area), L^p / H^p on the circle (normalized arc
// length), uniform norm on a compact circle set, and B_s.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "shiftlab/area_rules.hpp"
#include "shiftlab/core.hpp"
#include "shiftlab/domain.hpp"
#include "shiftlab/series.hpp"

namespace shiftlab {

struct ApOnDomain {
  Domain domain;
  double p = 2.0;
};
struct ApDiskNormalized {
  double p = 2.0;
};
struct LpCircle {
  double p = 2.0;
};
struct HardyP {
  double p = 2.0;
};
struct SupOnSet {
  CompactCircleSet set;
};
struct BsSpace {
  double s = 1.0;
};

struct NormSpec {
  using Space = std::variant<ApOnDomain, ApDiskNormalized, LpCircle, HardyP, SupOnSet, BsSpace>;
  Space space;
  double tol = 1e-10;

  NormSpec(Space s, double t = 1e-10) : space(std::move(s)), tol(t) {
    require(tol > 0.0, "NormSpec: tol must be positive");
    std::visit(
        [](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, BsSpace>) require(v.s > 0.0, "NormSpec: s must be positive");
          else if constexpr (!std::is_same_v<V, SupOnSet>) require(v.p >= 1.0, "NormSpec: p must be >= 1");
        },
        space);
  }

  std::string describe() const {
    auto num = [](double x) {
      char b[32];
      std::snprintf(b, sizeof b, "%g", x);
      return std::string(b);
    };
    return std::visit(
        [&](const auto& v) -> std::string {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, ApOnDomain>) return "A^" + num(v.p) + "(" + v.domain.describe() + ",lambda2)";
          else if constexpr (std::is_same_v<V, ApDiskNormalized>) return "A^" + num(v.p) + "(D,m2)";
          else if constexpr (std::is_same_v<V, LpCircle>) return "L^" + num(v.p) + "(T,m)";
          else if constexpr (std::is_same_v<V, HardyP>) return "H^" + num(v.p);
          else if constexpr (std::is_same_v<V, SupOnSet>) return "sup_E";
          else return "B_" + num(v.s);
        },
        space);
  }
};

struct NormResult {
  double value = 0.0;
  double est_error = 0.0;
  std::size_t cells_used = 0;
  bool converged = true;
  double previous = 0.0;  // estimate from the preceding refinement level

  /// Value, or ToleranceFailure carrying the last two estimates.
  double checked(double requested_tol) const {
    if (!converged)
      throw ToleranceFailure("norm refinement did not converge (last estimates " + std::to_string(previous) + ", " +
                                 std::to_string(value) + ")",
                             est_error, requested_tol * std::max(value, 1e-300));
    return value;
  }
};

/// sqrt(sum |a_k|^2 / (k + 1)), the A^2 norm on the unit disk with
/// normalized area measure.
inline double a2_disk_norm_exact(const PowerSeries& f) {
  std::vector<double> t(f.degree() + 1);
  for (std::size_t k = 0; k <= f.degree(); ++k) t[k] = std::norm(f[k]) / static_cast<double>(k + 1);
  return std::sqrt(pairwise_sum(t));
}

/// Integral of |fn|^p against a rule, with fixed-order reduction. Returns
/// the integral and the bound on the unresolved edge-cell contribution.
template <class Fn>
std::pair<double, double> integrate_abs_pow(Fn&& fn, const AreaRule& rule, double p) {
  std::vector<double> vals;
  parallel_map(rule.nodes.size(), vals, [&](std::size_t i) {
    double a = std::abs(fn(rule.nodes[i]));
    return rule.weights[i] * (p == 2.0 ? a * a : std::pow(a, p));
  });
  double integral = pairwise_sum(vals);
  std::vector<double> rem(rule.edge_areas.size());
  for (std::size_t c = 0; c < rem.size(); ++c) {
    double m = 0.0;
    for (cplx z : rule.edge_probes[c]) m = std::max(m, std::pow(std::abs(fn(z)), p));
    rem[c] = rule.edge_areas[c] * m;
  }
  return {integral, pairwise_sum(rem)};
}

/// (integral of |fn|^p over the rule)^{1/p}, scaled by 1/mass if mass > 0.
template <class Fn>
double area_norm(Fn&& fn, const AreaRule& rule, double p, double mass = 0.0) {
  double v = integrate_abs_pow(fn, rule, p).first;
  if (mass > 0.0) v /= mass;
  return std::pow(v, 1.0 / p);
}

namespace detail {

inline NormResult area_norm_refined(const PowerSeries& f, const Domain& dom, double p, double tol, double mass) {
  constexpr int kMaxLevels = 7;
  NormResult res;
  double prev = -1.0;
  for (int level = 0; level < kMaxLevels; ++level) {
    AreaRule rule = domain_rule(dom, f.degree(), level);
    auto [integral, remainder] = integrate_abs_pow(f, rule, p);
    if (mass > 0.0) integral /= mass, remainder /= mass;
    double v = std::pow(integral, 1.0 / p);
    res.cells_used += rule.cells;
    if (prev >= 0.0) {
      res.value = v;
      res.previous = prev;
      // A remainder from unresolved edge cells bounds the integral error;
      // translate it to the norm via d(x^{1/p}) <= x^{1/p-1}/p dx.
      double rem_norm = integral > 0.0 ? v * remainder / (p * integral) : 0.0;
      res.est_error = std::abs(v - prev) + rem_norm;
      if (std::abs(v - prev) <= tol * std::max(v, 1e-300)) {
        res.converged = true;
        return res;
      }
    }
    prev = v;
  }
  res.converged = false;
  return res;
}

// Trapezoid rule on the circle |z| = 1, doubling until the relative change
// drops below tol.
template <class Fn>
NormResult circle_norm_refined(Fn&& fn, std::size_t start, double p, double tol) {
  NormResult res;
  double prev = -1.0;
  std::size_t n = std::max<std::size_t>(start, 16);
  for (int round = 0; round < 24; ++round, n *= 2) {
    std::vector<double> vals;
    parallel_map(n, vals, [&](std::size_t i) {
      double a = std::abs(fn(unit(two_pi * static_cast<double>(i) / static_cast<double>(n))));
      return p == 2.0 ? a * a : std::pow(a, p);
    });
    double v = std::pow(pairwise_sum(vals) / static_cast<double>(n), 1.0 / p);
    ++res.cells_used;
    if (prev >= 0.0) {
      res.value = v;
      res.previous = prev;
      res.est_error = std::abs(v - prev);
      if (res.est_error <= tol * std::max(v, 1e-300)) return res;
    }
    prev = v;
  }
  res.converged = false;
  return res;
}

// max of |f| over an arc, sampling densely and polishing the best sample.
inline double sup_on_arc(const PowerSeries& f, const Arc& a, std::size_t n) {
  auto mod = [&](double t) { return std::abs(f(unit(t))); };
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    double v = mod(a.start + a.length() * static_cast<double>(i) / static_cast<double>(n));
    if (v > best) best = v, arg = i;
  }
  double h = a.length() / static_cast<double>(n);
  double t0 = a.start + static_cast<double>(arg) * h;
  double lo = std::max(a.start, t0 - h), hi = std::min(a.end, t0 + h);
  if (hi > lo) best = std::max(best, golden_max(mod, lo, hi).second);
  return best;
}

}  // namespace detail

/// Circle norm (sum over a fine trapezoid grid)^{1/p}; for polynomials this
/// is the H^p norm since the sup over r is attained at r = 1. For p = 2 it
/// reproduces sqrt(sum |a_k|^2).
template <class Series>
NormResult hp_or_lp_circle_norm(const Series& f, double p, double tol = 1e-10) {
  require(p >= 1.0, "hp_or_lp_circle_norm: p must be >= 1");
  std::size_t width;
  if constexpr (std::is_same_v<Series, TrigPolynomial>)
    width = static_cast<std::size_t>(std::max(-f.min_index(), f.max_index()));
  else width = f.degree();
  return detail::circle_norm_refined(f, 4 * (width + 1), p, tol);
}

/// sup over the set's samples, with arc grids doubled until the relative
/// change is below 1e-9.
inline double sup_norm_on_set(const PowerSeries& f, const CompactCircleSet& E) {
  require(!E.empty(), "sup_norm_on_set: empty set");
  double best = 0.0;
  for (const auto& p : E.points()) best = std::max(best, std::abs(f(p.value())));
  for (const auto& a : E.arcs()) {
    std::size_t n = std::max<std::size_t>(64, 4 * (f.degree() + 1));
    double prev = detail::sup_on_arc(f, a, n);
    for (int round = 0; round < 16; ++round) {
      n *= 2;
      double v = detail::sup_on_arc(f, a, n);
      bool stable = std::abs(v - prev) <= 1e-9 * std::max(v, 1e-300);
      prev = std::max(prev, v);
      if (stable) break;
    }
    best = std::max(best, prev);
  }
  return best;
}

/// Dispatch on the norm selector.
inline NormResult norm(const PowerSeries& f, const NormSpec& spec) {
  return std::visit(
      [&](const auto& v) -> NormResult {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ApOnDomain>) return detail::area_norm_refined(f, v.domain, v.p, spec.tol, 0.0);
        else if constexpr (std::is_same_v<V, ApDiskNormalized>)
          return detail::area_norm_refined(f, Domain::unit_disk(), v.p, spec.tol, pi);
        else if constexpr (std::is_same_v<V, LpCircle> || std::is_same_v<V, HardyP>)
          return hp_or_lp_circle_norm(f, v.p, spec.tol);
        else if constexpr (std::is_same_v<V, SupOnSet>) {
          NormResult r;
          r.value = sup_norm_on_set(f, v.set);
          return r;
        } else {
          NormResult r;
          r.value = b_s_norm(f, v.s);
          return r;
        }
      },
      spec.space);
}

/// L^p norm of a trigonometric polynomial on the circle (normalized measure).
inline NormResult norm(const TrigPolynomial& f, const NormSpec& spec) {
  const auto* lp = std::get_if<LpCircle>(&spec.space);
  require(lp != nullptr, "norm: trigonometric polynomials support only L^p(T)");
  return hp_or_lp_circle_norm(f, lp->p, spec.tol);
}

/// Result of the arc geometry test behind the density of Kitai functions.
struct ArcGeometryReport {
  Arc quotient;                     // A^{-1} Gamma as an angle interval
  double dist_to_circle_part;       // dist(A^{-1}Gamma, closure(T cap Omega))
  double dist_to_closure;           // dist(A^{-1}Gamma, closure(Omega))
  bool arc_in_complement;           // quotient arc lies in T minus Omega
  bool passes() const { return dist_to_circle_part > 0.0 && arc_in_complement; }
};

namespace detail {

// T cap Omega as a list of angle intervals [lo, hi] (lo may be negative when
// an interval straddles angle 0), from a dense scan with bisected ends.
inline std::vector<std::pair<double, double>> circle_part(const Domain& dom) {
  constexpr std::size_t kScan = 1 << 14;
  auto in = [&](double t) { return dom.contains(unit(t)); };
  auto edge = [&](double t0, double t1) {
    bool in0 = in(t0);
    for (int it = 0; it < 60; ++it) {
      double m = 0.5 * (t0 + t1);
      if (in(m) == in0) t0 = m;
      else t1 = m;
    }
    return 0.5 * (t0 + t1);
  };
  std::vector<std::pair<double, double>> out;
  const double h = two_pi / kScan;
  std::vector<char> flag(kScan);
  for (std::size_t i = 0; i < kScan; ++i) flag[i] = in(h * static_cast<double>(i));
  bool all = std::all_of(flag.begin(), flag.end(), [](char c) { return c != 0; });
  if (all) return {{0.0, two_pi}};
  // Start the sweep at an outside sample so runs do not wrap.
  std::size_t s0 = static_cast<std::size_t>(std::find(flag.begin(), flag.end(), 0) - flag.begin());
  for (std::size_t k = 0; k < kScan; ++k) {
    std::size_t i = (s0 + k) % kScan, j = (i + 1) % kScan;
    double ti = h * static_cast<double>(s0 + k);
    if (!flag[i] && flag[j]) out.push_back({edge(ti, ti + h), 0.0});
    if (flag[i] && !flag[j] && !out.empty()) out.back().second = edge(ti, ti + h);
  }
  for (auto& iv : out) {
    iv.first = std::remainder(iv.first, two_pi);
    iv.second = iv.first + wrap_angle(iv.second - iv.first);
  }
  return out;
}

inline double chord(double dt) { return 2.0 * std::abs(std::sin(0.5 * std::min(std::abs(dt), pi))); }

// Distance from e^{it} to the closure of the union of the intervals.
inline double dist_to_intervals(const std::vector<std::pair<double, double>>& ivs, double t) {
  double best = INFINITY;
  for (auto [lo, hi] : ivs) {
    double u = wrap_angle(t - lo);
    if (u <= hi - lo) return 0.0;
    best = std::min({best, chord(std::abs(std::remainder(t - lo, two_pi))), chord(std::abs(std::remainder(t - hi, two_pi)))});
  }
  return best;
}

}  // namespace detail

/// Computes A^{-1}Gamma = {gamma / alpha} for single closed arcs A = [a1, a2]
/// and Gamma = [g1, g2]: the angle interval [g1 - a2, g2 - a1]. Reports its
/// distance to closure(T cap Omega) (the quantity that must be positive), to
/// closure(Omega), and whether the arc lies in T minus Omega.
inline ArcGeometryReport arc_geometry_check(const Domain& dom, const CompactCircleSet& A, const CompactCircleSet& G,
                                            std::size_t samples = 4096) {
  require(A.arcs().size() == 1 && A.points().empty(), "arc_geometry_check: A must be a single closed arc");
  require(G.arcs().size() == 1 && G.points().empty(), "arc_geometry_check: Gamma must be a single closed arc");
  const Arc& a = A.arcs().front();
  const Arc& g = G.arcs().front();
  ArcGeometryReport rep;
  double lo = g.start - a.end, hi = g.end - a.start;
  if (hi - lo >= two_pi) rep.quotient = {0.0, two_pi};
  else rep.quotient = {wrap_angle(lo), wrap_angle(lo) + (hi - lo)};

  const auto part = detail::circle_part(dom);
  rep.dist_to_circle_part = INFINITY;
  rep.dist_to_closure = INFINITY;
  rep.arc_in_complement = true;
  for (std::size_t i = 0; i <= samples; ++i) {
    double t = rep.quotient.start + rep.quotient.length() * static_cast<double>(i) / static_cast<double>(samples);
    cplx z = unit(t);
    if (dom.contains(z)) rep.arc_in_complement = false;
    rep.dist_to_closure = std::min(rep.dist_to_closure, dom.distance_to_closure(z));
    if (!part.empty()) rep.dist_to_circle_part = std::min(rep.dist_to_circle_part, detail::dist_to_intervals(part, t));
  }
  return rep;
}

}  // namespace shiftlab
