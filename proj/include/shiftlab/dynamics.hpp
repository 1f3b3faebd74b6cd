#pragma once

// The Taylor backward shift T on A^p(Omega): eigenfunctions, the resolvent,
// spectrum membership, the Kitai data f_alpha with closed-form iterates and
// right inverses, mixing tables, the Dirichlet-set limit demonstration, and
// convergence diagnostics on arcs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/approx.hpp"
#include "shiftlab/area_rules.hpp"
#include "shiftlab/boundary_sets.hpp"
#include "shiftlab/core.hpp"
#include "shiftlab/gauss.hpp"
#include "shiftlab/linalg.hpp"
#include "shiftlab/norms.hpp"
#include "shiftlab/series.hpp"

namespace shiftlab {

/// Raised when an evaluation point lies within the guard distance of the
/// singular arc alpha^{-1} Gamma.
class NearSingular : public InvalidInput {
 public:
  NearSingular(const std::string& who, double dist)
      : InvalidInput(who + ": point within " + std::to_string(dist) + " of the singular arc"), dist_(dist) {}
  double distance() const noexcept { return dist_; }

 private:
  double dist_;
};

inline constexpr double kitai_guard = 1e-6;

// ---------------------------------------------------------------------------
// Eigenfunctions, resolvent, spectrum

/// gamma_alpha(z) = 1 / (1 - z alpha).
inline cplx gamma_eval(cplx alpha, cplx z) {
  cplx den = 1.0 - z * alpha;
  require(std::abs(den) > 1e-14, "gamma_eval: z is the pole 1/alpha");
  return 1.0 / den;
}

/// Degree-d truncation of gamma_alpha: coefficients alpha^k, k <= d.
inline PowerSeries gamma_truncated(cplx alpha, std::size_t d) {
  std::vector<cplx> c(d + 1);
  cplx a{1.0};
  for (std::size_t k = 0; k <= d; ++k, a *= alpha) c[k] = a;
  return PowerSeries(c);
}

/// max_{k < d} |(T g)_k - alpha g_k| for the degree-d truncation g of gamma_alpha.
inline double eigen_check(cplx alpha, std::size_t d) {
  PowerSeries g = gamma_truncated(alpha, d);
  PowerSeries Tg = backward_shift(g);
  double worst = 0.0;
  for (std::size_t k = 0; k < d; ++k) worst = std::max(worst, std::abs(Tg[k] - alpha * g[k]));
  return worst;
}

/// lambda lies in Omega' = 1/(C_inf minus Omega): lambda = 0 always (Omega is
/// bounded, so infinity is outside it), otherwise iff 1/lambda is not in Omega.
inline bool spectrum_membership(const Domain& dom, cplx lambda) {
  if (lambda == cplx{0.0}) return true;
  return !dom.contains(1.0 / lambda);
}

struct ResolventReport {
  std::vector<cplx> values;   // S_alpha g on the grid
  double residual = 0.0;      // max |(T - alpha) S_alpha g - g| over the grid
};

/// S_alpha g as a polynomial: z g(z) - g(1/alpha)/alpha vanishes at 1/alpha,
/// so it factors as (z - 1/alpha) q(z) and S_alpha g = -q / alpha.
inline PowerSeries resolvent_series(const PowerSeries& g, cplx alpha) {
  require(alpha != cplx{0.0}, "resolvent_series: alpha must be nonzero");
  const cplx r = 1.0 / alpha;
  PowerSeries h = g.shifted_up(1) - PowerSeries{g(r) / alpha};
  const std::size_t D = h.degree();
  std::vector<cplx> q(D, cplx{0.0});
  cplx carry{0.0};
  for (std::size_t k = D; k >= 1; --k) {
    carry = h[k] + r * carry;
    q[k - 1] = carry;
  }
  for (auto& c : q) c *= -1.0 / alpha;
  return q.empty() ? PowerSeries{} : PowerSeries(q);
}

/// Evaluates S_alpha g(z) = (z g(z) - g(1/alpha)/alpha) / (1 - z alpha) on
/// the grid, with the removable point filled by l'Hopital when
/// |z alpha - 1| < 1e-6, and checks (T - alpha I) S_alpha g = g pointwise
/// (T h(z) = (h(z) - h(0)) / z; at z = 0 the derivative is used).
inline ResolventReport resolvent_apply(const PowerSeries& g, cplx alpha, const Domain& dom, const std::vector<cplx>& grid) {
  require(alpha != cplx{0.0}, "resolvent_apply: alpha must be nonzero");
  require(dom.contains(1.0 / alpha), "resolvent_apply: 1/alpha must lie in the domain");
  const cplx r = 1.0 / alpha;
  const cplx g_r = g(r);
  std::vector<cplx> dc;
  for (std::size_t k = 1; k <= g.degree(); ++k) dc.push_back(static_cast<double>(k) * g[k]);
  PowerSeries gp(dc.empty() ? std::vector<cplx>{0.0} : dc);
  auto S = [&](cplx z) -> cplx {
    if (std::abs(z * alpha - 1.0) < 1e-6) return -(g(z) + z * gp(z)) / alpha;
    return (z * g(z) - g_r / alpha) / (1.0 - z * alpha);
  };
  // S(0) and S'(0) from the formula's Taylor expansion at 0 (|alpha r| = 1
  // keeps 0 away from the removable point): S(0) = -g(r)/alpha,
  // S'(0) = g(0) + alpha S(0).
  const cplx S0 = -g_r / alpha;
  const cplx S1 = g[0] + alpha * S0;
  ResolventReport rep;
  for (cplx z : grid) {
    cplx s = S(z);
    rep.values.push_back(s);
    cplx Ts = std::abs(z) < 1e-8 ? S1 : (s - S0) / z;
    rep.residual = std::max(rep.residual, std::abs(Ts - alpha * s - g(z)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Kitai data

/// J_m = integral over Gamma of zeta^m d zeta, tabulated for m in [lo, hi].
class GammaMoments {
 public:
  GammaMoments() = default;
  GammaMoments(const Arc& G, long lo, long hi) : G_(G), lo_(lo), hi_(hi) {
    require(hi >= lo, "GammaMoments: empty range");
    J_.resize(static_cast<std::size_t>(hi - lo + 1));
    for (long m = lo; m <= hi; ++m) J_[static_cast<std::size_t>(m - lo)] = compute(G, m);
  }
  static cplx compute(const Arc& G, long m) {
    if (m == -1) return I * G.length();
    return (detail::unit_power(G.end, m + 1) - detail::unit_power(G.start, m + 1)) / static_cast<double>(m + 1);
  }
  cplx operator()(long m) const {
    if (m < lo_ || m > hi_) return compute(G_, m);
    return J_[static_cast<std::size_t>(m - lo_)];
  }
  long lo() const { return lo_; }
  long hi() const { return hi_; }

 private:
  Arc G_{0.0, 0.0};
  long lo_ = 0, hi_ = -1;
  std::vector<cplx> J_;
};

namespace detail {

// Distance from w to the arc Gamma of the unit circle.
inline double dist_to_arc(const Arc& G, cplx w) {
  double t = std::arg(w);
  if (std::abs(w) > 0.0 && G.contains_angle(t, 0.0)) return std::abs(std::abs(w) - 1.0);
  return std::min(std::abs(w - unit(G.start)), std::abs(w - unit(G.end)));
}

// integral over Gamma of d zeta / (zeta - w) as a sum of principal logarithms
// of (zeta_{k+1} - w)/(zeta_k - w) over sub-arcs. A piece is split while it
// subtends pi/2 or more, or while w lies in the circular segment between the
// piece and its chord (where the chord and the arc wind differently).
inline cplx arc_cauchy_log_subdivided(const Arc& G, cplx w) {
  const double rw = std::abs(w), tw = std::arg(w);
  cplx acc{0.0};
  auto piece = [&](auto&& self, double t0, double t1, int depth) -> void {
    const double half = 0.5 * (t1 - t0);
    bool split = (t1 - t0) >= 0.5 * pi;
    if (!split && rw < 1.0 && rw > std::cos(half) - 1e-15) {
      double off = std::remainder(tw - 0.5 * (t0 + t1), two_pi);
      if (std::abs(off) <= half + 1e-15) split = true;
    }
    if (split && depth < 60) {
      self(self, t0, t0 + half, depth + 1);
      self(self, t0 + half, t1, depth + 1);
      return;
    }
    acc += std::log((unit(t1) - w) / (unit(t0) - w));
  };
  piece(piece, G.start, G.end, 0);
  return acc;
}

// Same integral in one logarithm: Gamma followed by the chord from b back to
// a is a closed curve winding once around its circular segment, so
// L(w) = Log((b - w)/(a - w)) + 2 pi i [w in the segment]. Points within
// rounding distance of the chord go through the subdivided form.
inline cplx arc_cauchy_log(const Arc& G, cplx w) {
  const cplx a = unit(G.start), b = unit(G.end);
  const cplx ab = a - b, wb = w - b;
  const double side = ab.real() * wb.imag() - ab.imag() * wb.real();
  if (std::abs(side) <= 1e-12 * std::abs(ab)) return arc_cauchy_log_subdivided(G, w);
  cplx L = std::log((b - w) / (a - w));
  if (side > 0.0 && std::norm(w) < 1.0) L += cplx{0.0, two_pi};
  return L;
}

}  // namespace detail

/// f_alpha(z) = integral over Gamma of d zeta / (zeta - alpha z), Gamma an arc of
/// the unit circle from a = e^{i theta_a} to b = e^{i theta_b}.
class KitaiFunction {
 public:
  static constexpr std::size_t default_cap = 400;

  KitaiFunction(cplx alpha, Arc gamma, std::size_t cap = default_cap) : alpha_(alpha), G_(gamma), cap_(cap) {
    require(G_.length() > 0.0 && G_.length() < two_pi, "KitaiFunction: Gamma must be a proper closed arc");
    require(std::abs(alpha) <= 1.0 + 1e-12, "KitaiFunction: |alpha| must not exceed 1");
    std::vector<cplx> c(cap + 1);
    cplx ap{1.0};
    for (std::size_t v = 0; v <= cap; ++v, ap *= alpha) c[v] = ap * GammaMoments::compute(G_, -static_cast<long>(v) - 1);
    taylor_ = PowerSeries(c);
  }

  cplx alpha() const { return alpha_; }
  const Arc& gamma() const { return G_; }
  cplx a() const { return unit(G_.start); }
  cplx b() const { return unit(G_.end); }
  std::size_t cap() const { return cap_; }
  /// c_v = alpha^v * integral of zeta^{-v-1}, v <= cap.
  const PowerSeries& taylor() const { return taylor_; }
  /// Size of the first omitted Taylor term at radius r (truncation indicator).
  double cap_error(double r) const {
    return std::abs(std::pow(alpha_ * r, static_cast<double>(cap_ + 1)) *
                    GammaMoments::compute(G_, -static_cast<long>(cap_) - 2));
  }
  /// Angles of alpha^{-1} a and alpha^{-1} b (the log singularities of f_alpha).
  std::pair<double, double> singular_angles() const {
    double s = std::arg(alpha_);
    return {wrap_angle(G_.start - s), wrap_angle(G_.end - s)};
  }

 private:
  cplx alpha_;
  Arc G_;
  std::size_t cap_;
  PowerSeries taylor_;
};

namespace detail {

inline void kitai_guard_check(const KitaiFunction& kf, cplx w, const char* who) {
  double d = dist_to_arc(kf.gamma(), w);
  if (d < kitai_guard) throw NearSingular(who, d);
}

// integral over Gamma of zeta^{-n} / (zeta - w).
inline cplx iterate_integral(const Arc& G, const GammaMoments& J, std::size_t n, cplx w) {
  const double rw = std::abs(w);
  const long nl = static_cast<long>(n);
  if (n == 0) return arc_cauchy_log(G, w);
  if (rw < 1.0 && std::pow(rw, static_cast<double>(n)) < 1e-3) {
    // sum_j w^j J_{-n-j-1}
    std::size_t jmax = rw == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(-37.0 / std::log(rw))) + 1;
    cplx s{0.0};
    for (std::size_t j = jmax + 1; j-- > 0;) s = s * w + J(-nl - static_cast<long>(j) - 1);
    return s;
  }
  // w^{-n} L(w) - sum_{k<n} w^{-1-k} J_{k-n}
  const cplx winv = 1.0 / w;
  cplx s{0.0};
  for (std::size_t k = n; k-- > 0;) s = s * winv + J(static_cast<long>(k) - nl);
  s *= winv;
  return std::pow(winv, static_cast<double>(n)) * arc_cauchy_log(G, w) - s;
}

// integral over Gamma of zeta^n / (zeta - w).
inline cplx right_inverse_integral(const Arc& G, const GammaMoments& J, std::size_t n, cplx w) {
  const double rw = std::abs(w);
  const long nl = static_cast<long>(n);
  if (n == 0) return arc_cauchy_log(G, w);
  if (rw > 1.0 && std::pow(rw, static_cast<double>(n)) > 1e3) {
    // -sum_k w^{-k-1} J_{n+k}
    std::size_t kmax = static_cast<std::size_t>(std::ceil(37.0 / std::log(rw))) + 1;
    const cplx winv = 1.0 / w;
    cplx s{0.0};
    for (std::size_t k = kmax + 1; k-- > 0;) s = s * winv + J(nl + static_cast<long>(k));
    return -s * winv;
  }
  // sum_{k<n} w^k J_{n-1-k} + w^n L(w)
  cplx s{0.0};
  for (std::size_t k = n; k-- > 0;) s = s * w + J(nl - 1 - static_cast<long>(k));
  return s + std::pow(w, static_cast<double>(n)) * arc_cauchy_log(G, w);
}

inline GammaMoments moments_for(const Arc& G, std::size_t n) {
  const long span = 6 * static_cast<long>(n) + 64;
  return GammaMoments(G, -span, span);
}

}  // namespace detail

/// Evaluator of f_alpha, T^n f_alpha and S_n f_alpha for a fixed n, sharing
/// one moment table. No proximity guard (used at quadrature nodes).
class KitaiEvaluator {
 public:
  KitaiEvaluator(const KitaiFunction& kf, std::size_t n) : kf_(&kf), n_(n), J_(detail::moments_for(kf.gamma(), n)) {
    alpha_n_ = std::pow(kf.alpha(), static_cast<double>(n));
  }
  cplx f(cplx z) const { return detail::arc_cauchy_log(kf_->gamma(), kf_->alpha() * z); }
  cplx iterate(cplx z) const { return alpha_n_ * detail::iterate_integral(kf_->gamma(), J_, n_, kf_->alpha() * z); }
  cplx right_inverse(cplx z) const {
    return detail::right_inverse_integral(kf_->gamma(), J_, n_, kf_->alpha() * z) / alpha_n_;
  }
  const GammaMoments& moments() const { return J_; }

 private:
  const KitaiFunction* kf_;
  std::size_t n_;
  GammaMoments J_;
  cplx alpha_n_;
};

namespace detail {

// Adaptive quadrature over Gamma with a break at the angle of w (where the
// kernel peaks when w is near the arc). Depth is capped so that roundoff
// cannot drive the recursion.
template <class Fn>
cplx arc_quadrature(Fn&& fn, const Arc& G, cplx w, double tol) {
  std::vector<double> br{G.start};
  if (w != cplx{0.0}) {
    double t = G.start + wrap_angle(std::arg(w) - G.start);
    if (t > G.start + 1e-9 && t < G.end - 1e-9) br.push_back(t);
  }
  br.push_back(G.end);
  cplx s{0.0};
  for (std::size_t i = 0; i + 1 < br.size(); ++i) s += adaptive_gauss(fn, br[i], br[i + 1], tol, nullptr, 30);
  return s;
}

}  // namespace detail

/// f_alpha(z) by the branch-tracked logarithm.
inline cplx kitai_eval(const KitaiFunction& kf, cplx z) {
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_eval");
  return detail::arc_cauchy_log(kf.gamma(), w);
}

/// f_alpha(z) by adaptive Gauss quadrature along Gamma (zeta = e^{i theta}).
inline cplx kitai_eval_quadrature(const KitaiFunction& kf, cplx z, double tol = 1e-12) {
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_eval_quadrature");
  return detail::arc_quadrature([&](double t) { cplx e = unit(t); return I * e / (e - w); }, kf.gamma(), w, tol);
}

/// T^n f_alpha(z) = alpha^n integral over Gamma of zeta^{-n} d zeta / (zeta - alpha z).
inline cplx kitai_iterate(const KitaiFunction& kf, std::size_t n, cplx z) {
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_iterate");
  return KitaiEvaluator(kf, n).iterate(z);
}

inline cplx kitai_iterate_quadrature(const KitaiFunction& kf, std::size_t n, cplx z, double tol = 1e-12) {
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_iterate_quadrature");
  const double nd = static_cast<double>(n);
  cplx v = detail::arc_quadrature([&](double t) { cplx e = unit(t); return I * e * unit(-nd * t) / (e - w); },
                                  kf.gamma(), w, tol);
  return std::pow(kf.alpha(), nd) * v;
}

/// S_n f_alpha(z) = alpha^{-n} integral over Gamma of zeta^n d zeta / (zeta - alpha z).
inline cplx kitai_right_inverse(const KitaiFunction& kf, std::size_t n, cplx z) {
  require(kf.alpha() != cplx{0.0}, "kitai_right_inverse: alpha must be nonzero");
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_right_inverse");
  return KitaiEvaluator(kf, n).right_inverse(z);
}

inline cplx kitai_right_inverse_quadrature(const KitaiFunction& kf, std::size_t n, cplx z, double tol = 1e-12) {
  require(kf.alpha() != cplx{0.0}, "kitai_right_inverse: alpha must be nonzero");
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_right_inverse_quadrature");
  const double nd = static_cast<double>(n);
  cplx v = detail::arc_quadrature([&](double t) { cplx e = unit(t); return I * e * unit(nd * t) / (e - w); },
                                  kf.gamma(), w, tol);
  return v / std::pow(kf.alpha(), nd);
}

/// max over the grid of |T^n (S_n f_alpha) - f_alpha|, where T^n is applied
/// as (g - s_{n-1} g) / z^n with the Taylor coefficients
/// g_j = alpha^{j-n} J_{n-1-j} (j < n) of g = S_n f_alpha. Grid points must be
/// nonzero.
inline double kitai_right_inverse_check(const KitaiFunction& kf, std::size_t n, const std::vector<cplx>& grid) {
  require(kf.alpha() != cplx{0.0}, "kitai_right_inverse_check: alpha must be nonzero");
  KitaiEvaluator ev(kf, n);
  std::vector<cplx> head(n);
  for (std::size_t j = 0; j < n; ++j)
    head[j] = std::pow(kf.alpha(), static_cast<double>(j) - static_cast<double>(n)) *
              ev.moments()(static_cast<long>(n) - 1 - static_cast<long>(j));
  PowerSeries s(head.empty() ? std::vector<cplx>{0.0} : head);
  double worst = 0.0;
  for (cplx z : grid) {
    require(z != cplx{0.0}, "kitai_right_inverse_check: grid points must be nonzero");
    detail::kitai_guard_check(kf, kf.alpha() * z, "kitai_right_inverse_check");
    cplx g = ev.right_inverse(z);
    cplx Tn = (g - (n ? s(z) : cplx{0.0})) / std::pow(z, static_cast<double>(n));
    worst = std::max(worst, std::abs(Tn - ev.f(z)));
  }
  return worst;
}

struct PartialIntegrationCheck {
  cplx lhs_closed;   // integral over Gamma of zeta^{-n} / (zeta - w), closed form
  cplx lhs_quad;     // same, adaptive quadrature
  cplx rhs;          // after integrating by parts (quadrature for the remaining integral)
  double residual;   // max(|lhs_closed - rhs|, |lhs_quad - rhs|)
};

/// Integration by parts for n >= 2:
/// int zeta^{-n}/(zeta - w) = 1/(n-1) ( -int zeta^{1-n}/(zeta - w)^2
///                           - 1/((b - w) b^{n-1}) + 1/((a - w) a^{n-1}) ).
inline PartialIntegrationCheck kitai_partial_integration(const KitaiFunction& kf, std::size_t n, cplx z,
                                                         double tol = 1e-12) {
  require(n >= 2, "kitai_partial_integration: n must be at least 2");
  cplx w = kf.alpha() * z;
  detail::kitai_guard_check(kf, w, "kitai_partial_integration");
  const Arc& G = kf.gamma();
  const double nd = static_cast<double>(n);
  PartialIntegrationCheck out;
  out.lhs_closed = detail::iterate_integral(G, detail::moments_for(G, n), n, w);
  out.lhs_quad =
      detail::arc_quadrature([&](double t) { cplx e = unit(t); return I * e * unit(-nd * t) / (e - w); }, G, w, tol);
  cplx sq = detail::arc_quadrature(
      [&](double t) {
        cplx e = unit(t);
        return I * e * unit((1.0 - nd) * t) / ((e - w) * (e - w));
      },
      G, w, tol);
  const cplx a = kf.a(), b = kf.b();
  const cplx bt = detail::unit_power(G.end, static_cast<long long>(n) - 1);
  const cplx at = detail::unit_power(G.start, static_cast<long long>(n) - 1);
  out.rhs = (-sq - 1.0 / ((b - w) * bt) + 1.0 / ((a - w) * at)) / (nd - 1.0);
  out.residual = std::max(std::abs(out.lhs_closed - out.rhs), std::abs(out.lhs_quad - out.rhs));
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature for Kitai functions

struct KitaiQuadOptions {
  double p = 2.0;
  double tol = 1e-6;  // relative change between refinement levels
  int max_level = 3;
  std::size_t order = 8;
  int grade_depth = 10;   // angular grading levels toward each singular angle
  int radial_extra = 6;   // radial levels beyond log2(n + 2)
};

namespace detail {

// Angular panel edges: `base` uniform panels plus geometric grading toward
// each singular angle (2^{-k} h0 on both sides, k < depth).
inline std::vector<double> graded_angular_edges(std::size_t base, const std::vector<double>& singular, int depth) {
  std::vector<double> e;
  const double h0 = two_pi / static_cast<double>(base);
  for (std::size_t k = 0; k <= base; ++k) e.push_back(h0 * static_cast<double>(k));
  for (double s : singular) {
    e.push_back(wrap_angle(s));
    for (int k = 0; k < depth; ++k) {
      double h = h0 * std::ldexp(1.0, -k);
      e.push_back(wrap_angle(s - h));
      e.push_back(wrap_angle(s + h));
    }
  }
  std::sort(e.begin(), e.end());
  std::vector<double> out;
  for (double t : e)
    if (out.empty() || t - out.back() > 1e-14) out.push_back(t);
  if (two_pi - out.back() < 1e-14) out.back() = two_pi;
  else out.push_back(two_pi);
  return out;
}

// Area rule for functions with a layer of width ~1/n along the unit circle
// and logarithmic singularities at the given angles on it.
inline AreaRule kitai_rule(const Domain& dom, const std::vector<double>& singular, std::size_t n, int level,
                           std::size_t order, int grade_depth = 10, int radial_extra = 6) {
  const std::size_t scale = std::size_t{1} << level;
  const std::size_t base = std::max<std::size_t>(32, n / 2 + 16) * scale;
  const int depth = grade_depth + level;
  const int rlevels = static_cast<int>(std::ceil(std::log2(static_cast<double>(n) + 2.0))) + radial_extra + level;
  auto disk_part = [&](cplx c, double R) {
    return graded_disk_rule(c, R, graded_angular_edges(base, singular, depth), rlevels, order);
  };
  return std::visit(
      [&](const auto& s) -> AreaRule {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnitDiskShape>) return disk_part(0.0, 1.0);
        else if constexpr (std::is_same_v<S, DiskShape>) return disk_part(s.center, s.radius);
        else if constexpr (std::is_same_v<S, TwoDiskShape>) {
          AreaRule r = disk_part(s.c1, s.r1);
          r.append(lune_rule(s.c1, s.r1, s.c2, s.r2, (4 + n / 8) * scale, 16, (16 + n / 8) * scale));
          return r;
        } else {
          return cell_rule(dom, std::min(7 + level, 12));
        }
      },
      dom.shape());
}

}  // namespace detail

/// ||fn||_{A^p(Omega)} (area measure, unnormalized) for a function with the
/// Kitai singularity structure, refining until the relative change between
/// levels is below opt.tol. `mass` > 0 divides the integral (normalized
/// measures).
template <class Fn>
NormResult kitai_area_norm(Fn&& fn, const Domain& dom, const std::vector<double>& singular, std::size_t n,
                           const KitaiQuadOptions& opt = {}, double mass = 0.0) {
  NormResult res;
  double prev = -1.0;
  for (int level = 0; level <= opt.max_level; ++level) {
    AreaRule rule = detail::kitai_rule(dom, singular, n, level, opt.order, opt.grade_depth, opt.radial_extra);
    auto [integral, remainder] = integrate_abs_pow(fn, rule, opt.p);
    if (mass > 0.0) integral /= mass, remainder /= mass;
    double v = std::pow(integral, 1.0 / opt.p);
    res.cells_used += rule.cells;
    res.value = v;
    if (prev >= 0.0) {
      res.previous = prev;
      res.est_error = std::abs(v - prev);
      if (std::abs(v - prev) <= opt.tol * std::max(v, 1e-300)) {
        res.converged = true;
        return res;
      }
    }
    prev = v;
  }
  return res;
}

enum class KitaiPart { F, Iterate, RightInverse };

/// ||f_alpha||, ||T^n f_alpha|| or ||S_n f_alpha|| in A^p(Omega).
inline NormResult kitai_norm(const KitaiFunction& kf, KitaiPart part, std::size_t n, const Domain& dom,
                             const KitaiQuadOptions& opt = {}) {
  KitaiEvaluator ev(kf, part == KitaiPart::F ? 0 : n);
  auto [s1, s2] = kf.singular_angles();
  std::function<cplx(cplx)> fn;
  if (part == KitaiPart::F) fn = [&](cplx z) { return ev.f(z); };
  else if (part == KitaiPart::Iterate) fn = [&](cplx z) { return ev.iterate(z); };
  else fn = [&](cplx z) { return ev.right_inverse(z); };
  return kitai_area_norm(fn, dom, {s1, s2}, part == KitaiPart::F ? 0 : n, opt);
}

// ---------------------------------------------------------------------------
// Expansion in the Kitai span

struct KitaiExpansion {
  std::vector<cplx> alphas;
  std::vector<cplx> coeffs;
  Arc gamma{0.0, 0.0};
  double residual = 0.0;      // ||v - sum c_i f_{alpha_i}||_{A^2(Omega)}
  double v_norm = 0.0;
  double condition = 0.0;     // of the regularized Gram matrix
  double ridge = 0.0;
  std::size_t nodes = 0;

  std::vector<KitaiFunction> functions() const {
    std::vector<KitaiFunction> out;
    for (cplx a : alphas) out.emplace_back(a, gamma, 0);
    return out;
  }
  cplx operator()(cplx z) const {
    cplx s{0.0};
    for (std::size_t i = 0; i < alphas.size(); ++i) s += coeffs[i] * detail::arc_cauchy_log(gamma, alphas[i] * z);
    return s;
  }
};

struct ExpansionOptions {
  std::size_t samples = 48;
  double ridge = 1e-8;       // relative to trace(G)/M
  int level = 0;             // quadrature level for the inner product
  std::size_t order = 8;
  int grade_depth = 0;       // angular grading toward each singular angle
  int radial_extra = 3;      // radial grading levels toward the rim
};

/// Chebyshev-spaced points on the arc A (endpoints clustered).
inline std::vector<cplx> chebyshev_alphas(const Arc& A, std::size_t M) {
  std::vector<cplx> out;
  for (std::size_t i = 1; i <= M; ++i) {
    double x = std::cos((2.0 * static_cast<double>(i) - 1.0) * pi / (2.0 * static_cast<double>(M)));
    out.push_back(unit(A.midpoint() + 0.5 * A.length() * x));
  }
  return out;
}

namespace detail {

inline std::pair<Arc, Arc> single_arcs(const CompactCircleSet& A, const CompactCircleSet& G) {
  require(A.arcs().size() == 1 && A.points().empty(), "Kitai arcs: A must be a single closed arc");
  require(G.arcs().size() == 1 && G.points().empty(), "Kitai arcs: Gamma must be a single closed arc");
  return {A.arcs().front(), G.arcs().front()};
}

inline std::vector<double> expansion_singular_angles(const std::vector<cplx>& alphas, const Arc& G) {
  std::vector<double> s;
  for (cplx a : alphas) {
    double t = std::arg(a);
    s.push_back(wrap_angle(G.start - t));
    s.push_back(wrap_angle(G.end - t));
  }
  return s;
}

}  // namespace detail

/// Least-squares system for v in span{f_{alpha_i}} in the A^2(Omega)
/// quadrature inner product, alpha_i Chebyshev-spaced on A. The weighted
/// matrix is factored once (F = QR) so several ridges cost an M x M solve
/// each: minimizing |y - F c|^2 + mu |c|^2 reduces to [R; sqrt(mu) I] c = [Q^H y; 0].
class KitaiLeastSquares {
 public:
  KitaiLeastSquares(const std::function<cplx(cplx)>& v, const Domain& dom, const CompactCircleSet& A,
                    const CompactCircleSet& G, const ExpansionOptions& opt = {}) {
    auto [a_arc, g_arc] = detail::single_arcs(A, G);
    auto geo = arc_geometry_check(dom, A, G);
    require(geo.passes(), "expand_in_kitai_span: arc geometry check failed (A^{-1} Gamma meets the circle part of the "
                          "domain)");
    require(opt.samples >= 1, "expand_in_kitai_span: need at least one sample");
    gamma_ = g_arc;
    alphas_ = chebyshev_alphas(a_arc, opt.samples);
    const std::size_t M = alphas_.size();
    AreaRule rule = detail::kitai_rule(dom, detail::expansion_singular_angles(alphas_, g_arc), 0, opt.level,
                                       opt.order, opt.grade_depth, opt.radial_extra);
    const auto Nq = static_cast<Eigen::Index>(rule.nodes.size());
    nodes_ = rule.nodes.size();
    F_.resize(Nq, Eigen::Index(M));
    y_.resize(Nq);
    std::vector<char> done;
    parallel_map(rule.nodes.size(), done, [&](std::size_t q) {
      const double sw = std::sqrt(rule.weights[q]);
      const cplx z = rule.nodes[q];
      for (std::size_t i = 0; i < M; ++i)
        F_(Eigen::Index(q), Eigen::Index(i)) = sw * detail::arc_cauchy_log(g_arc, alphas_[i] * z);
      y_[Eigen::Index(q)] = sw * v(z);
      return char{1};
    });
    CMatrix Gm = F_.adjoint() * F_;
    scale_ = Gm.trace().real() / static_cast<double>(M);
    eig_ = Eigen::SelfAdjointEigenSolver<CMatrix>(Gm, Eigen::EigenvaluesOnly).eigenvalues();
    Eigen::HouseholderQR<CMatrix> qr(F_);
    R_ = qr.matrixQR().topRows(Eigen::Index(M)).triangularView<Eigen::Upper>();
    Qty_ = (qr.householderQ().adjoint() * y_).head(Eigen::Index(M));
  }

  /// Solution for the ridge mu = ridge * trace(G) / M.
  KitaiExpansion solve(double ridge) const {
    require(ridge >= 0.0, "expand_in_kitai_span: ridge must be non-negative");
    const auto M = R_.cols();
    KitaiExpansion out;
    out.gamma = gamma_;
    out.alphas = alphas_;
    out.ridge = ridge;
    out.nodes = nodes_;
    const double mu = ridge * scale_;
    double lo = eig_.minCoeff() + mu, hi = eig_.maxCoeff() + mu;
    out.condition = lo > 0.0 ? hi / lo : INFINITY;
    CMatrix S(2 * M, M);
    S.topRows(M) = R_;
    S.bottomRows(M) = std::sqrt(mu) * CMatrix::Identity(M, M);
    CVector rhs = CVector::Zero(2 * M);
    rhs.head(M) = Qty_;
    CVector c = S.colPivHouseholderQr().solve(rhs);
    out.coeffs = from_eigen(c);
    out.residual = (y_ - F_ * c).norm();
    out.v_norm = y_.norm();
    return out;
  }

 private:
  Arc gamma_{0.0, 0.0};
  std::vector<cplx> alphas_;
  std::size_t nodes_ = 0;
  CMatrix F_, R_;
  CVector y_, Qty_;
  Eigen::VectorXd eig_;
  double scale_ = 0.0;
};

/// Ridge-regularized least squares for v in span{f_{alpha_i}}; the residual
/// ||v - sum c_i f_{alpha_i}||_{A^2(Omega)} is reported, never assumed small.
inline KitaiExpansion expand_in_kitai_span(const std::function<cplx(cplx)>& v, const Domain& dom,
                                           const CompactCircleSet& A, const CompactCircleSet& G,
                                           const ExpansionOptions& opt = {}) {
  return KitaiLeastSquares(v, dom, A, G, opt).solve(opt.ridge);
}

inline KitaiExpansion expand_in_kitai_span(const PowerSeries& v, const Domain& dom, const CompactCircleSet& A,
                                           const CompactCircleSet& G, const ExpansionOptions& opt = {}) {
  return expand_in_kitai_span(std::function<cplx(cplx)>([&v](cplx z) { return v(z); }), dom, A, G, opt);
}

/// sum_i c_i S_n f_{alpha_i}(z) for an expansion. With unimodular alphas the
/// sum over i is folded into the moment coefficients: inside |z|^n <= 1e3,
/// sum_{k<n} z^k J_{n-1-k} sum_i c_i alpha_i^{k-n} + z^n sum_i c_i L(alpha_i z);
/// outside, -sum_k z^{-k-1} J_{n+k} sum_i c_i alpha_i^{-n-k-1}.
class RightInverseCombination {
 public:
  RightInverseCombination(const KitaiExpansion& e, std::size_t n) : e_(&e), n_(n) {
    folded_ = std::all_of(e.alphas.begin(), e.alphas.end(),
                          [](cplx a) { return std::abs(std::abs(a) - 1.0) <= 1e-12; });
    if (!folded_) {
      J_ = detail::moments_for(e.gamma, n);
      for (cplx a : e.alphas) scale_.push_back(1.0 / std::pow(a, static_cast<double>(n)));
      return;
    }
    for (cplx a : e.alphas) theta_.push_back(std::arg(a));
    inner_.resize(n);
    for (std::size_t k = 0; k < n; ++k) inner_[k] = GammaMoments::compute(e.gamma, long(n) - 1 - long(k)) * weight(long(k) - long(n));
    // The outer branch needs log|z| > log(1e3)/n, hence at most 37 n / log(1e3) + 2 terms.
    const std::size_t kcap = static_cast<std::size_t>(std::ceil(37.0 * static_cast<double>(n) / std::log(1e3))) + 2;
    for (std::size_t k = 0; k <= kcap; ++k)
      outer_.push_back(GammaMoments::compute(e.gamma, long(n + k)) * weight(-long(n) - long(k) - 1));
  }

  cplx operator()(cplx z) const {
    const std::size_t M = e_->alphas.size();
    if (!folded_) {
      cplx s{0.0};
      for (std::size_t i = 0; i < M; ++i)
        s += e_->coeffs[i] * scale_[i] * detail::right_inverse_integral(e_->gamma, J_, n_, e_->alphas[i] * z);
      return s;
    }
    const double r = std::abs(z);
    if (n_ == 0 || std::pow(r, static_cast<double>(n_)) <= 1e3) {
      cplx poly{0.0};
      for (std::size_t k = n_; k-- > 0;) poly = poly * z + inner_[k];
      cplx logs{0.0};
      for (std::size_t i = 0; i < M; ++i) logs += e_->coeffs[i] * detail::arc_cauchy_log(e_->gamma, e_->alphas[i] * z);
      return poly + std::pow(z, static_cast<double>(n_)) * logs;
    }
    const std::size_t kmax = std::min(outer_.size() - 1, static_cast<std::size_t>(std::ceil(37.0 / std::log(r))) + 1);
    const cplx zinv = 1.0 / z;
    cplx s{0.0};
    for (std::size_t k = kmax + 1; k-- > 0;) s = s * zinv + outer_[k];
    return -s * zinv;
  }

 private:
  // sum_i c_i alpha_i^m
  cplx weight(long m) const {
    cplx s{0.0};
    for (std::size_t i = 0; i < theta_.size(); ++i) s += e_->coeffs[i] * detail::unit_power(theta_[i], m);
    return s;
  }

  const KitaiExpansion* e_;
  std::size_t n_;
  bool folded_ = false;
  GammaMoments J_;
  std::vector<cplx> scale_;
  std::vector<double> theta_;
  std::vector<cplx> inner_, outer_;
};

// ---------------------------------------------------------------------------
// Mixing tables

struct MixingOptions {
  CompactCircleSet A = CompactCircleSet::arc(-0.5, 0.5);
  CompactCircleSet Gamma = CompactCircleSet::arc(0.9, two_pi - 0.9);
  ExpansionOptions expansion;
  KitaiQuadOptions quad{2.0, 1e-4, 2, 8, 0, 4};
};

struct MixingRow {
  std::size_t n = 0;
  double err_u = 0.0;          // ||w_n - u||
  double err_v = 0.0;          // ||T^n w_n - v||
  double closed_form = -1.0;   // disk fast path: sqrt(sum |v_k|^2/(n+k+1)) (p = 2)
  bool converged = true;
};

struct MixingTable {
  bool fast_path = false;
  double expansion_residual = 0.0;
  double expansion_condition = 0.0;
  std::vector<MixingRow> rows;
  bool inconclusive = false;     // expansion residual dominates both columns
  bool monotone = true;          // both columns non-increasing (5% slack) beyond deg u
};

namespace detail {

inline bool non_increasing(const std::vector<double>& v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + slack) + 1e-300) return false;
  return true;
}

}  // namespace detail

namespace detail {

inline void finish_mixing(MixingTable& tab, std::size_t deg_u) {
  std::vector<double> c1, c2;
  for (const auto& r : tab.rows)
    if (r.n > deg_u) c1.push_back(r.err_u), c2.push_back(r.err_v);
  tab.monotone = non_increasing(c1, 0.05) && non_increasing(c2, 0.05);
}

}  // namespace detail

/// General-domain table for a target v given as a function on Omega.
inline MixingTable verify_mixing(const PowerSeries& u, const std::function<cplx(cplx)>& v, const Domain& dom,
                                 const std::vector<std::size_t>& n_list, const MixingOptions& opt = {}) {
  require(opt.quad.p >= 1.0, "verify_mixing: p must be at least 1");
  MixingTable tab;
  auto ex = expand_in_kitai_span(v, dom, opt.A, opt.Gamma, opt.expansion);
  tab.expansion_residual = ex.residual;
  tab.expansion_condition = ex.condition;
  auto sing = detail::expansion_singular_angles(ex.alphas, ex.gamma);
  for (std::size_t n : n_list) {
    MixingRow row;
    row.n = n;
    RightInverseCombination S(ex, n);
    PowerSeries Tu = backward_shift(u, n);
    auto r1 = kitai_area_norm([&](cplx z) { return S(z); }, dom, sing, n, opt.quad);
    auto r2 = kitai_area_norm([&](cplx z) { return Tu(z) + ex(z) - v(z); }, dom, sing, 0, opt.quad);
    row.err_u = r1.value;
    row.err_v = r2.value;
    row.converged = r1.converged && r2.converged;
    tab.rows.push_back(row);
  }
  double max_u = 0.0;
  for (const auto& r : tab.rows) max_u = std::max(max_u, r.err_u);
  tab.inconclusive = tab.expansion_residual >= max_u;
  detail::finish_mixing(tab, u.degree());
  return tab;
}

/// Kitai-criterion mixing table: w_n = u + S_n v with S_n the right inverse
/// (multiplication by z^n on the unit disk; on other domains, S_n applied to
/// the expansion of v in the Kitai span). Columns are ||w_n - u|| and
/// ||T^n w_n - v|| in A^p(Omega); the unit disk uses the normalized area
/// measure, other domains the plain area measure.
inline MixingTable verify_mixing(const PowerSeries& u, const PowerSeries& v, const Domain& dom,
                                 const std::vector<std::size_t>& n_list, const MixingOptions& opt = {}) {
  const double p = opt.quad.p;
  require(p >= 1.0, "verify_mixing: p must be at least 1");
  if (!std::holds_alternative<UnitDiskShape>(dom.shape()))
    return verify_mixing(u, std::function<cplx(cplx)>([&v](cplx z) { return v(z); }), dom, n_list, opt);
  MixingTable tab;
  tab.fast_path = true;
  for (std::size_t n : n_list) {
    MixingRow row;
    row.n = n;
    auto r1 = norm(v.shifted_up(n), NormSpec{ApDiskNormalized{p}, 1e-12});
    auto r2 = norm(backward_shift(u, n), NormSpec{ApDiskNormalized{p}, 1e-12});
    row.err_u = r1.value;
    row.err_v = r2.value;
    row.converged = r1.converged && r2.converged;
    if (p == 2.0) {
      double s = 0.0;
      for (std::size_t k = 0; k <= v.degree(); ++k) s += std::norm(v[k]) / static_cast<double>(n + k + 1);
      row.closed_form = std::sqrt(s);
    }
    tab.rows.push_back(row);
  }
  detail::finish_mixing(tab, u.degree());
  return tab;
}

// ---------------------------------------------------------------------------
// Dirichlet-set limit demonstration

struct DirichletDemoOptions {
  CompactCircleSet A = CompactCircleSet::arc(-0.5, 0.5);
  CompactCircleSet Gamma = CompactCircleSet::arc(0.9, two_pi - 0.9);
  ExpansionOptions expansion;
  // Candidate ridges; per n the one minimizing the A^2 mixing errors
  // ||d - T^{n+1} f~|| + ||f~ - f|| is used.
  std::vector<double> ridges{1e-2, 1e-4, 1e-6, 1e-8};
  KitaiQuadOptions quad{2.0, 1e-3, 0, 8, 0, 3};
  double delta = 0.1;            // admissible sup_E |z^{n+1} - 1|
  std::size_t samples_per_arc = 64;
};

struct DirichletDemoRow {
  std::size_t n = 0;
  double residual = 0.0;          // sup_E |s_n f~ - h|
  double power_residual = 0.0;    // sup_E |z^{n+1} - 1|
  double expansion_residual = 0.0;  // ||d - T^{n+1} f~||_{A^2(Omega)}
  double correction_norm = 0.0;   // ||f~ - f||_{A^2(Omega)}
  double ridge = 0.0;
};

struct DirichletDemo {
  std::vector<DirichletDemoRow> rows;
  std::vector<std::size_t> skipped;   // n from the list that fail the Dirichlet test
};

/// For each admissible n (sup_E |z^{n+1} - 1| <= delta), expands
/// d = f - h - T^{n+1} f in the Kitai span, sets
/// f~ = f + sum c_i S_{n+1} f_{alpha_i}, so that T^{n+1} f~ = T^{n+1} f + sum c_i f_{alpha_i},
/// and reports sup_E |f~ - z^{n+1} T^{n+1} f~ - h| (which is s_n f~ - h).
inline DirichletDemo dirichlet_limit_demo(const PowerSeries& f, const PowerSeries& h, const CompactCircleSet& E,
                                          const Domain& dom, const std::vector<std::size_t>& n_list,
                                          const DirichletDemoOptions& opt = {}) {
  require(!E.empty(), "dirichlet_limit_demo: empty set");
  require(!opt.ridges.empty(), "dirichlet_limit_demo: no candidate ridges");
  std::vector<cplx> pts = E.samples(opt.samples_per_arc);
  for (cplx z : pts) require(dom.contains(z), "dirichlet_limit_demo: E must lie in the domain");

  DirichletDemo out;
  std::optional<std::vector<KitaiExpansion>> fixed;  // valid once n + 1 > deg f
  const PowerSeries d = f - h;
  for (std::size_t n : n_list) {
    double pr = detail::dirichlet_residual(E, n + 1, opt.delta);
    if (pr < 0.0 || pr > opt.delta) {
      out.skipped.push_back(n);
      continue;
    }
    const PowerSeries Tf = backward_shift(f, n + 1);
    const PowerSeries target = d - Tf;
    std::vector<KitaiExpansion> cands;
    if (n + 1 > f.degree() && fixed) cands = *fixed;
    else if (!(target == PowerSeries{})) {
      KitaiLeastSquares ls([&](cplx z) { return target(z); }, dom, opt.A, opt.Gamma, opt.expansion);
      for (double r : opt.ridges) cands.push_back(ls.solve(r));
      if (n + 1 > f.degree()) fixed = cands;
    }
    DirichletDemoRow row;
    row.n = n;
    row.power_residual = pr;
    const KitaiExpansion* best = nullptr;
    std::optional<RightInverseCombination> bestS;
    double best_obj = INFINITY;
    for (const auto& ex : cands) {
      RightInverseCombination S(ex, n + 1);
      double cn = kitai_area_norm([&](cplx z) { return S(z); }, dom,
                                  detail::expansion_singular_angles(ex.alphas, ex.gamma), n + 1, opt.quad)
                      .value;
      if (ex.residual + cn < best_obj) {
        best_obj = ex.residual + cn;
        best = &ex;
        bestS.emplace(ex, n + 1);
        row.expansion_residual = ex.residual;
        row.correction_norm = cn;
        row.ridge = ex.ridge;
      }
    }
    for (cplx z : pts) {
      cplx ft = f(z) + (best ? (*bestS)(z) : cplx{0.0});
      cplx Tft = Tf(z) + (best ? (*best)(z) : cplx{0.0});
      cplx sn = ft - std::pow(z, static_cast<double>(n + 1)) * Tft;
      row.residual = std::max(row.residual, std::abs(sn - h(z)));
    }
    out.rows.push_back(row);
  }
  require(!out.rows.empty(), "dirichlet_limit_demo: no n in the list passes the Dirichlet test for E");
  return out;
}

// ---------------------------------------------------------------------------
// Convergence diagnostics

struct ConvergenceRow {
  std::size_t n;
  double value;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool monotone = false;    // non-increasing
  bool converging = false;  // last value well below the first and the trend is down
};

/// sup over samples of the set of |s_n f - f|, with s_n f built from the
/// coefficient law a(nu) and f given in closed form.
inline ConvergenceTable fatou_riesz_check(const std::function<cplx(std::size_t)>& coeff,
                                          const std::function<cplx(cplx)>& closed_form, const CompactCircleSet& set,
                                          const std::vector<std::size_t>& n_list, std::size_t per_arc = 256) {
  require(!set.empty(), "fatou_riesz_check: empty set");
  std::vector<cplx> pts = set.samples(per_arc), ref;
  for (cplx z : pts) ref.push_back(closed_form(z));
  ConvergenceTable tab;
  std::vector<cplx> sums(pts.size(), cplx{0.0}), powers(pts.size(), cplx{1.0});
  std::size_t done = 0;  // terms summed so far
  std::vector<std::size_t> ns = n_list;
  std::sort(ns.begin(), ns.end());
  for (std::size_t n : ns) {
    for (; done <= n; ++done) {
      cplx a = coeff(done);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sums[i] += a * powers[i];
        powers[i] *= pts[i];
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, std::abs(sums[i] - ref[i]));
    tab.rows.push_back({n, worst});
  }
  std::vector<double> v;
  for (const auto& r : tab.rows) v.push_back(r.value);
  tab.monotone = detail::non_increasing(v, 1e-12);
  tab.converging = v.size() >= 2 && tab.monotone && v.back() < 0.5 * v.front();
  return tab;
}

/// max_{|z| <= r} |T^n f| along n: tends to 0 when the coefficients of f do.
inline ConvergenceTable shift_decay_table(const PowerSeries& f, double r, const std::vector<std::size_t>& n_list) {
  ConvergenceTable tab;
  for (std::size_t n : n_list) tab.rows.push_back({n, max_modulus(backward_shift(f, n), r)});
  std::vector<double> v;
  for (const auto& x : tab.rows) v.push_back(x.value);
  tab.monotone = detail::non_increasing(v, 1e-12);
  tab.converging = v.size() >= 2 && v.back() < 0.5 * v.front();
  return tab;
}

}  // namespace shiftlab
