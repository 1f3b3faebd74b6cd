#pragma once

// Constructive simultaneous approximation: minimum-norm interpolation on
// finite circle sets, peaking polynomials, the combined norm / uniform
// approximation engine, the staged universal-series builder, the Menshov
// demonstration, and Cauchy-transform diagnostics for atomic measures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/boundary_sets.hpp"
#include "shiftlab/core.hpp"
#include "shiftlab/linalg.hpp"
#include "shiftlab/norms.hpp"
#include "shiftlab/series.hpp"

namespace shiftlab {

inline constexpr double gram_condition_limit = 1e12;

namespace detail {

// e^{i k theta} with the product reduced in extended precision.
inline cplx unit_power(double theta, long long k) {
  const long double two_pi_l = 2.0L * std::numbers::pi_v<long double>;
  long double t = std::remainder(static_cast<long double>(k) * static_cast<long double>(theta), two_pi_l);
  return std::polar(1.0, static_cast<double>(t));
}

inline std::vector<double> unimodular_angles(const std::vector<cplx>& w, const char* who) {
  std::vector<double> th;
  for (cplx z : w) {
    require(std::abs(std::abs(z) - 1.0) <= 1e-12, std::string(who) + ": points must be unimodular");
    th.push_back(std::arg(z));
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      require(std::abs(w[i] - w[j]) > 1e-14, std::string(who) + ": points must be distinct");
  return th;
}

// Powers w_i^k for k in [lo, hi], row-major by point.
struct PowerTable {
  std::size_t lo, hi, M;
  std::vector<cplx> v;
  PowerTable(const std::vector<double>& theta, std::size_t lo_, std::size_t hi_) : lo(lo_), hi(hi_), M(theta.size()) {
    const std::size_t L = hi - lo + 1;
    v.resize(M * L);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t k = 0; k < L; ++k) v[i * L + k] = unit_power(theta[i], static_cast<long long>(lo + k));
  }
  cplx at(std::size_t i, std::size_t k) const { return v[i * (hi - lo + 1) + (k - lo)]; }
};

// K_ij = sum_{k=lo}^{hi} rho_k w_i^k conj(w_j^k).
template <class Rho>
CMatrix weighted_gram(const PowerTable& P, Rho&& rho) {
  const auto M = static_cast<Eigen::Index>(P.M);
  CMatrix K(M, M);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      cplx s{0.0};
      for (std::size_t k = P.lo; k <= P.hi; ++k)
        s += rho(k) * P.at(static_cast<std::size_t>(i), k) * std::conj(P.at(static_cast<std::size_t>(j), k));
      K(i, j) = s;
      K(j, i) = std::conj(s);
    }
  return K;
}

// Coefficients c_k = rho_k sum_j conj(w_j^k) y_j for k in [lo, hi], placed
// in a dense vector indexed from 0.
template <class Rho>
std::vector<cplx> weighted_coeffs(const PowerTable& P, Rho&& rho, const CVector& y) {
  std::vector<cplx> c(P.hi + 1, cplx{0.0});
  for (std::size_t k = P.lo; k <= P.hi; ++k) {
    cplx s{0.0};
    for (std::size_t j = 0; j < P.M; ++j) s += std::conj(P.at(j, k)) * y[static_cast<Eigen::Index>(j)];
    c[k] = rho(k) * s;
  }
  return c;
}

inline double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (cplx x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

struct InterpolationResult {
  PowerSeries P;
  double residual = 0.0;   // max_j |P(w_j) - t_j|
  double condition = 1.0;  // Gram condition number
};

/// Polynomial of degree <= d with P(w_j) = t_j minimizing sum |p_k|^2 (the
/// H^2 norm). Solved through the M x M Gram system
/// G_ij = sum_{k=0}^{d} (w_i conj(w_j))^k, summed in closed form.
inline InterpolationResult min_norm_interpolant(const std::vector<cplx>& w, const std::vector<cplx>& t, std::size_t d) {
  require(w.size() == t.size(), "min_norm_interpolant: points and targets differ in length");
  const auto theta = detail::unimodular_angles(w, "min_norm_interpolant");
  const std::size_t M = w.size();
  if (M == 0) return {};
  require(d + 1 >= M, "min_norm_interpolant: degree must be at least M - 1");
  const auto Mi = static_cast<Eigen::Index>(M);
  CMatrix G(Mi, Mi);
  const double n1 = static_cast<double>(d + 1);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      cplx g;
      const double dt = theta[i] - theta[j];
      cplx x = unit(dt);
      if (std::abs(1.0 - x) < 1e-3) {
        // Direct summation near the diagonal, where the closed form cancels.
        g = 0.0;
        for (std::size_t k = 0; k <= d; ++k) g += detail::unit_power(dt, static_cast<long long>(k));
      } else {
        cplx xn = detail::unit_power(theta[i], static_cast<long long>(d + 1)) *
                  std::conj(detail::unit_power(theta[j], static_cast<long long>(d + 1)));
        g = (1.0 - xn) / (1.0 - x);
      }
      if (i == j) g = n1;
      G(Eigen::Index(i), Eigen::Index(j)) = g;
      G(Eigen::Index(j), Eigen::Index(i)) = std::conj(g);
    }
  auto sol = solve_hermitian(G, to_eigen(t), gram_condition_limit, "min_norm_interpolant");
  detail::PowerTable P(theta, 0, d);
  InterpolationResult out;
  out.P = PowerSeries(detail::weighted_coeffs(P, [](std::size_t) { return 1.0; }, sol.x));
  out.condition = sol.condition;
  for (std::size_t j = 0; j < M; ++j) out.residual = std::max(out.residual, std::abs(out.P(w[j]) - t[j]));
  return out;
}

/// Minimizes sum_{k=lo}^{hi} |c_k|^2 / rho_k over polynomials supported in
/// degrees [lo, hi] subject to P(w_j) = t_j. An optional ridge relaxes the
/// interpolation to a penalized fit (ridge = 0: exact).
template <class Rho>
InterpolationResult weighted_min_norm_block(const std::vector<cplx>& w, const std::vector<cplx>& t, std::size_t lo,
                                            std::size_t hi, Rho&& rho, double ridge = 0.0) {
  require(w.size() == t.size(), "weighted_min_norm_block: points and targets differ in length");
  require(hi >= lo && hi - lo + 1 >= w.size(), "weighted_min_norm_block: block too short for the point count");
  const auto theta = detail::unimodular_angles(w, "weighted_min_norm_block");
  if (w.empty()) return {};
  detail::PowerTable P(theta, lo, hi);
  CMatrix K = detail::weighted_gram(P, rho);
  if (ridge > 0.0) K += CMatrix::Identity(K.rows(), K.cols()) * (ridge * K.trace().real() / double(K.rows()));
  auto sol = solve_hermitian(K, to_eigen(t), gram_condition_limit, "weighted_min_norm_block");
  InterpolationResult out;
  out.P = PowerSeries(detail::weighted_coeffs(P, rho, sol.x));
  out.condition = sol.condition;
  for (std::size_t j = 0; j < w.size(); ++j) out.residual = std::max(out.residual, std::abs(out.P(w[j]) - t[j]));
  return out;
}

// ---------------------------------------------------------------------------
// Peaking polynomials

struct PeakOptions {
  double lambda = 1e3;      // initial penalty for construction (a)
  double lambda_max = 1e9;  // doubling stops here
  double sup_target = 1e-6; // construction (a) doubles lambda until sup_E |Q| meets this
  double s = 1.0;           // B_s exponent for the report
  bool with_bs = true;
  std::optional<std::size_t> q_degree;  // (b): degree of q; default scans for the smallest bound
};

struct PeakCandidate {
  PowerSeries Q;
  bool valid = false;
  double a2_dist = 0.0;        // ||Q - 1||_{A^2(D)}
  double sup_E = 0.0;          // max_j |Q(w_j)|
  double bs_dist = 0.0;        // ||Q - 1||_{B_s}
  double lambda = 0.0;         // (a): final penalty
  double stationarity = 0.0;   // (a): relative normal-equation residual
  std::size_t m = 0;           // (b): shift
  std::size_t q_degree = 0;    // (b): degree of q, m = d - q_degree
  double q_l2_sq = 0.0;        // (b): ||q||_{l2}^2
  double bound = 0.0;          // (b): ||q||^2 / (m + 1)
  double condition = 0.0;
  std::string note;
};

struct PeakResult {
  PowerSeries Q;
  char construction = '-';
  PeakCandidate a, b;
};

namespace detail {

inline void finish_peak(PeakCandidate& c, const std::vector<cplx>& w, const PeakOptions& opt) {
  PowerSeries dq = c.Q - PowerSeries{1.0};
  c.a2_dist = a2_disk_norm_exact(dq);
  c.sup_E = 0.0;
  for (cplx z : w) c.sup_E = std::max(c.sup_E, std::abs(c.Q(z)));
  c.bs_dist = opt.with_bs ? b_s_norm(dq, opt.s) : 0.0;
  c.valid = true;
}

// (a) minimize ||Q - 1||_{A^2}^2 + lambda sum_j |Q(w_j)|^2 over deg <= d.
// With D = diag(1/(k+1)) and V_jk = w_j^k, the normal equations
// (D + lambda V^H V) q = D e are solved by the Woodbury identity:
// q = e - D^{-1} V^H y, (I / lambda + V D^{-1} V^H) y = V e.
inline PeakCandidate peak_penalized(const std::vector<cplx>& w, const std::vector<double>& theta, std::size_t d,
                                    double lambda) {
  PeakCandidate c;
  c.lambda = lambda;
  detail::PowerTable P(theta, 0, d);
  auto rho = [](std::size_t k) { return static_cast<double>(k + 1); };
  CMatrix K = weighted_gram(P, rho);
  K += CMatrix::Identity(K.rows(), K.cols()) / lambda;
  CVector ones = CVector::Ones(static_cast<Eigen::Index>(w.size()));
  auto sol = solve_hermitian(K, ones, gram_condition_limit, "peaking_polynomial(a)");
  c.condition = sol.condition;
  auto corr = weighted_coeffs(P, rho, sol.x);
  std::vector<cplx> q(d + 1);
  for (std::size_t k = 0; k <= d; ++k) q[k] = (k == 0 ? 1.0 : 0.0) - corr[k];
  // Stationarity: (D + lambda V^H V) q - D e, relative to |D e| = 1.
  std::vector<cplx> Vq(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    cplx s{0.0};
    for (std::size_t k = 0; k <= d; ++k) s += P.at(j, k) * q[k];
    Vq[j] = s;
  }
  double res = 0.0;
  for (std::size_t k = 0; k <= d; ++k) {
    cplx s{0.0};
    for (std::size_t j = 0; j < w.size(); ++j) s += std::conj(P.at(j, k)) * Vq[j];
    cplx r = q[k] / double(k + 1) + lambda * s - (k == 0 ? 1.0 : 0.0);
    res = std::max(res, std::abs(r));
  }
  c.stationarity = res;
  c.Q = PowerSeries(q);
  return c;
}

}  // namespace detail

/// Polynomial Q of degree <= d close to 1 in A^2 (and B_s) and small on the
/// finite set w. Two constructions are run and the better one (smaller
/// max(||Q - 1||_{A^2}, sup_E |Q|)) is returned:
/// (a) penalized least squares with penalty doubling from opt.lambda;
/// (b) Q = 1 - z^m q with q the minimum-norm interpolant of w_j^{-m} of
///     degree d_q >= M - 1 and m = d - d_q. Q vanishes on E and
///     ||Q - 1||^2 = sum |q_k|^2/(m+k+1) <= ||q||^2/(m+1). Unless fixed in
///     the options, d_q is picked from a scan to minimize that bound.
inline PeakResult peaking_polynomial(const std::vector<cplx>& w, std::size_t d, const PeakOptions& opt = {}) {
  PeakResult out;
  if (w.empty()) {
    out.Q = PowerSeries{1.0};
    out.construction = 'b';
    out.a.Q = out.b.Q = out.Q;
    out.a.valid = out.b.valid = true;
    return out;
  }
  const auto theta = detail::unimodular_angles(w, "peaking_polynomial");
  const std::size_t M = w.size();
  require(d + 1 >= M, "peaking_polynomial: degree must be at least M - 1");

  // (a)
  for (double lam = opt.lambda; lam <= opt.lambda_max * (1 + 1e-12); lam *= 2.0) {
    try {
      auto c = detail::peak_penalized(w, theta, d, lam);
      detail::finish_peak(c, w, opt);
      out.a = c;
      if (c.sup_E <= opt.sup_target) break;
    } catch (const IllConditioned& e) {
      out.a.note = e.what();
      break;
    }
  }

  // (b)
  {
    std::vector<std::size_t> dqs;
    if (opt.q_degree) {
      require(*opt.q_degree + 1 >= M && *opt.q_degree <= d, "peaking_polynomial: q degree out of range");
      dqs.push_back(*opt.q_degree);
    } else {
      for (std::size_t j = 0; j < 8 && M - 1 + j <= d; ++j) dqs.push_back(M - 1 + j);
      for (std::size_t i = 1; i <= 32; ++i) dqs.push_back(M - 1 + (d - (M - 1)) * i / 32);
      std::sort(dqs.begin(), dqs.end());
      dqs.erase(std::unique(dqs.begin(), dqs.end()), dqs.end());
    }
    PeakCandidate best;
    for (std::size_t dq : dqs) {
      PeakCandidate c;
      c.q_degree = dq;
      c.m = d - dq;
      std::vector<cplx> targets(M);
      for (std::size_t j = 0; j < M; ++j) targets[j] = detail::unit_power(-theta[j], static_cast<long long>(c.m));
      try {
        auto q = min_norm_interpolant(w, targets, dq);
        c.condition = q.condition;
        for (auto a : q.P.coeffs()) c.q_l2_sq += std::norm(a);
        c.bound = c.q_l2_sq / static_cast<double>(c.m + 1);
        c.Q = PowerSeries{1.0} - q.P.shifted_up(c.m);
        c.valid = true;
      } catch (const IllConditioned& e) {
        c.note = e.what();
      }
      if (c.valid && (!best.valid || c.bound < best.bound)) best = c;
      else if (!best.valid && best.note.empty()) best.note = c.note;
    }
    if (best.valid) detail::finish_peak(best, w, opt);
    out.b = best;
  }

  auto score = [](const PeakCandidate& c) { return c.valid ? std::max(c.a2_dist, c.sup_E) : INFINITY; };
  if (!out.a.valid && !out.b.valid) throw ToleranceFailure("peaking_polynomial: both constructions failed", INFINITY, 0.0);
  if (score(out.a) < score(out.b)) out.Q = out.a.Q, out.construction = 'a';
  else out.Q = out.b.Q, out.construction = 'b';
  return out;
}

// ---------------------------------------------------------------------------
// Simultaneous approximation

enum class CoeffSpace { A2, H2 };

inline double coeff_norm(const PowerSeries& f, CoeffSpace sp) {
  return sp == CoeffSpace::A2 ? a2_disk_norm_exact(f) : std::sqrt(std::max(0.0, [&] {
    std::vector<double> t;
    for (auto a : f.coeffs()) t.push_back(std::norm(a));
    return pairwise_sum(t);
  }()));
}

inline CoeffSpace coeff_space_of(const NormSpec& spec) {
  if (const auto* a = std::get_if<ApDiskNormalized>(&spec.space); a && a->p == 2.0) return CoeffSpace::A2;
  if (const auto* h = std::get_if<HardyP>(&spec.space); h && h->p == 2.0) return CoeffSpace::H2;
  if (const auto* l = std::get_if<LpCircle>(&spec.space); l && l->p == 2.0) return CoeffSpace::H2;
  throw InvalidInput("simultaneous_approx: spec must be A^2(D), H^2 or L^2(T)");
}

struct SimResult {
  PowerSeries P;
  double norm_err = 0.0;  // ||f - P||_spec
  double sup_err = 0.0;   // max_j |g_j - P(w_j)|
  std::string method;
  // Constrained-optimal candidate.
  double constrained_norm_err = 0.0, constrained_sup_err = 0.0, condition = 0.0;
  // Combiner candidate (A^2 only): P = Q P_f + (1 - Q) G.
  bool has_combiner = false;
  double combiner_norm_err = 0.0, combiner_sup_err = 0.0;
  double g_sup_disk = 0.0, one_minus_q_norm = 0.0, one_minus_q_times_g_norm = 0.0;
  char peak_construction = '-';

  double joint() const { return std::max(norm_err, sup_err); }
};

/// Polynomial of degree <= d that is close to f in the spec norm and to g on
/// the finite set w. Two candidates are formed and the one with the smaller
/// joint error max(norm, sup) is returned:
///  * constrained optimum: P = s_d f + c with c of degree <= d of least norm
///    satisfying P(w_j) = g_j (feasible sets are nested in d, so the error
///    is non-increasing in d);
///  * for A^2, the combiner Q P_f + (1 - Q) G with P_f = s_k f, G the
///    minimum-norm interpolant of g (degree k) and Q a peaking polynomial of
///    degree d - k.
inline SimResult simultaneous_approx(const PowerSeries& f, const std::vector<cplx>& w, const std::vector<cplx>& g,
                                     const NormSpec& spec, std::size_t d, const PeakOptions& popt = {}) {
  require(w.size() == g.size(), "simultaneous_approx: points and targets differ in length");
  const CoeffSpace sp = coeff_space_of(spec);
  SimResult out;
  auto sup_err = [&](const PowerSeries& P) {
    double m = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) m = std::max(m, std::abs(g[j] - P(w[j])));
    return m;
  };

  // Constrained optimum.
  PowerSeries sd = partial_sum(f, d);
  PowerSeries Pc = sd;
  if (!w.empty()) {
    std::vector<cplx> r(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) r[j] = g[j] - sd(w[j]);
    auto rho = [sp](std::size_t k) { return sp == CoeffSpace::A2 ? static_cast<double>(k + 1) : 1.0; };
    auto blk = weighted_min_norm_block(w, r, 0, d, rho);
    out.condition = blk.condition;
    Pc = sd + blk.P;
  }
  out.constrained_norm_err = coeff_norm(f - Pc, sp);
  out.constrained_sup_err = sup_err(Pc);
  out.P = Pc;
  out.norm_err = out.constrained_norm_err;
  out.sup_err = out.constrained_sup_err;
  out.method = "constrained";

  if (sp == CoeffSpace::A2 && !w.empty()) {
    const std::size_t dq = d / 2, k = d - dq;
    if (k + 1 >= w.size() && dq + 1 >= w.size()) {
      try {
        PowerSeries Pf = partial_sum(f, k);
        PowerSeries G = min_norm_interpolant(w, g, k).P;
        auto peak = peaking_polynomial(w, dq, popt);
        const PowerSeries& Q = peak.Q;
        PowerSeries one_minus_q = PowerSeries{1.0} - Q;
        PowerSeries P = Q * Pf + one_minus_q * G;
        out.has_combiner = true;
        out.peak_construction = peak.construction;
        out.combiner_norm_err = coeff_norm(f - P, sp);
        out.combiner_sup_err = sup_err(P);
        out.g_sup_disk = detail::max_on_circle(G, 1.0);
        out.one_minus_q_norm = a2_disk_norm_exact(one_minus_q);
        out.one_minus_q_times_g_norm = a2_disk_norm_exact(one_minus_q * G);
        if (std::max(out.combiner_norm_err, out.combiner_sup_err) < out.joint()) {
          out.P = P;
          out.norm_err = out.combiner_norm_err;
          out.sup_err = out.combiner_sup_err;
          out.method = "combiner";
        }
      } catch (const ToleranceFailure&) {
        // The constrained candidate stands; the combiner is optional.
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universal series builder

struct UniversalOptions {
  CoeffSpace space = CoeffSpace::A2;
  std::optional<std::size_t> n0;  // default: deg f0
  std::size_t block_min = 64;     // first block length is max(4M, block_min)
  std::size_t max_degree = default_degree_cap;
  double ridge = 0.0;             // relative ridge on the stage Gram (0: exact interpolation)
};

struct UniversalStage {
  std::size_t n_prev = 0, n_k = 0;
  double sup_residual = 0.0;
  double block_norm = 0.0;
  double eps = 0.0, norm_budget = 0.0;
  double condition = 0.0;
  bool met = false;
};

struct UniversalResult {
  PowerSeries f;
  std::vector<std::size_t> indices;     // n_1 < ... < n_K (completed stages)
  std::vector<PowerSeries> snapshots;   // F_0, F_1, ..., F_K
  std::vector<UniversalStage> stages;   // includes a failing stage, if any
  std::optional<std::size_t> failed_stage;  // 1-based

  /// s_{n_k} f == F_k coefficientwise, for every completed stage.
  bool exact_prefixes() const {
    for (std::size_t k = 0; k < indices.size(); ++k)
      if (!(partial_sum(f, indices[k]) == snapshots[k + 1])) return false;
    return true;
  }
};

/// Default stage tolerances eps_k = 0.2 * 2^{-k}, k = 1..K.
inline std::vector<double> default_budgets(std::size_t K) {
  std::vector<double> e;
  for (std::size_t k = 1; k <= K; ++k) e.push_back(0.2 * std::ldexp(1.0, -static_cast<int>(k)));
  return e;
}

/// Builds f = F_K stage by stage. With F_0 = s_{n_0} f_0, stage k adds a
/// block R_k supported in degrees (n_{k-1}, n_k] such that
/// |F_{k-1} + R_k - g_k| <= eps_k on the points and ||R_k|| <= 2^{-k}; the
/// block is the least-norm one (A^2 weights 1/(j+1), or l^2 for H^2), and
/// its length doubles from max(4M, block_min) until both budgets hold.
/// Because blocks occupy disjoint degree ranges, s_{n_k} f = F_k exactly.
inline UniversalResult universal_builder(const std::vector<std::vector<cplx>>& targets, const std::vector<cplx>& w,
                                         const PowerSeries& f0, std::vector<double> budgets = {},
                                         const UniversalOptions& opt = {}) {
  const std::size_t K = targets.size();
  if (budgets.empty()) budgets = default_budgets(K);
  require(budgets.size() == K, "universal_builder: one budget per target is required");
  for (double e : budgets) require(e > 0.0, "universal_builder: budgets must be positive");
  for (const auto& g : targets) require(g.size() == w.size(), "universal_builder: target length differs from points");
  detail::unimodular_angles(w, "universal_builder");

  UniversalResult out;
  std::size_t n_prev = opt.n0.value_or(f0.degree());
  PowerSeries F = partial_sum(f0, n_prev);
  out.snapshots.push_back(F);
  auto rho = [&](std::size_t k) { return opt.space == CoeffSpace::A2 ? static_cast<double>(k + 1) : 1.0; };

  for (std::size_t k = 1; k <= K; ++k) {
    const auto& g = targets[k - 1];
    UniversalStage st;
    st.n_prev = n_prev;
    st.eps = budgets[k - 1];
    st.norm_budget = std::ldexp(1.0, -static_cast<int>(k));
    std::vector<cplx> r(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) r[j] = g[j] - F(w[j]);
    std::size_t L = std::max(4 * w.size(), opt.block_min);
    PowerSeries best_block;
    bool have = false;
    for (; n_prev + L <= opt.max_degree; L *= 2) {
      InterpolationResult blk;
      try {
        blk = w.empty() ? InterpolationResult{} : weighted_min_norm_block(w, r, n_prev + 1, n_prev + L, rho, opt.ridge);
      } catch (const IllConditioned& e) {
        st.condition = e.condition();
        continue;
      }
      st.n_k = n_prev + L;
      st.condition = blk.condition;
      st.block_norm = coeff_norm(blk.P, opt.space);
      double sup = 0.0;
      PowerSeries Fk = F + blk.P;
      for (std::size_t j = 0; j < w.size(); ++j) sup = std::max(sup, std::abs(Fk(w[j]) - g[j]));
      st.sup_residual = sup;
      best_block = blk.P;
      have = true;
      if (sup <= st.eps && st.block_norm <= st.norm_budget) {
        st.met = true;
        break;
      }
    }
    out.stages.push_back(st);
    if (!st.met || !have) {
      out.failed_stage = k;
      break;
    }
    F = F + best_block;
    n_prev = st.n_k;
    out.indices.push_back(n_prev);
    out.snapshots.push_back(F);
  }
  out.f = F;
  return out;
}

// ---------------------------------------------------------------------------
// Menshov demonstration

/// Piecewise-constant function on the circle: value values[i] on the angle
/// interval [jumps[i], jumps[i+1]) (cyclically), jumps sorted in [0, 2pi).
struct StepFunction {
  std::vector<double> jumps;
  std::vector<cplx> values;

  cplx operator()(double theta) const {
    if (jumps.empty()) return values.empty() ? cplx{0.0} : values[0];
    double t = wrap_angle(theta);
    auto it = std::upper_bound(jumps.begin(), jumps.end(), t);
    if (it == jumps.begin()) return values.back();
    return values[static_cast<std::size_t>(it - jumps.begin() - 1)];
  }

  static StepFunction sign_step() { return {{0.0, pi}, {1.0, -1.0}}; }
  static StepFunction zero() { return {{}, {0.0}}; }
};

struct MenshovOptions {
  int cantor_levels = 3;
  std::size_t samples = 64;      // points placed on E (measure-zero stand-in)
  std::size_t grid = 4096;       // angular grid for coverage
  double delta = 0.2;            // coverage threshold for stage 1; halves per stage
  double jump_excision = 0.02;   // share of eps spent excising jumps that fall in E
  UniversalOptions builder;
};

struct MenshovStage {
  int N = 0;
  double eps = 0.0;
  double E_measure = 0.0;     // normalized measure of the set used at this stage
  double delta = 0.0;
  std::size_t n_k = 0;
  double coverage = 0.0;      // fraction of grid with |s_{n_k} f - g| <= delta
  double coverage_on_E = 0.0; // same, restricted to grid points in E
  double sup_on_samples = 0.0;
  double block_norm = 0.0;
  bool met = false;
};

struct MenshovReport {
  std::vector<MenshovStage> stages;
  double coverage_stage0 = 0.0;
  PowerSeries f;
  std::optional<std::size_t> failed_stage;
};

namespace detail {

// Level-J Cantor arcs for N, with small arcs around jumps of g cut out.
inline CompactCircleSet menshov_set(int N, int levels, const StepFunction& g, double cut) {
  auto C = build_cantor({N, levels});
  std::vector<Arc> arcs;
  for (const auto& iv : C.arcs) {
    double lo = two_pi * iv.lo, hi = two_pi * iv.hi;
    std::vector<std::pair<double, double>> pieces{{lo, hi}};
    for (double jmp : g.jumps) {
      std::vector<std::pair<double, double>> next;
      for (auto [a, b] : pieces) {
        for (double j : {jmp - two_pi, jmp, jmp + two_pi}) {
          if (j + cut <= a || j - cut >= b) continue;
          if (j - cut > a) next.push_back({a, j - cut});
          a = std::max(a, j + cut);
        }
        if (b > a) next.push_back({a, b});
      }
      pieces = std::move(next);
    }
    for (auto [a, b] : pieces)
      if (b - a > 1e-12) arcs.push_back({a, b});
  }
  return CompactCircleSet(std::move(arcs), {});
}

// Samples spread over the arcs in proportion to length, avoiding arc ends
// (which may carry jump discontinuities of the surrogate).
inline std::vector<double> menshov_samples(const CompactCircleSet& E, std::size_t count) {
  double total = 0.0;
  for (const auto& a : E.arcs()) total += a.length();
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    double s = total * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    for (const auto& a : E.arcs()) {
      if (s <= a.length()) {
        out.push_back(wrap_angle(a.start + s));
        break;
      }
      s -= a.length();
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) < 1e-13; }), out.end());
  return out;
}

}  // namespace detail

/// Lusin surrogate: equal to g on E, linear in angle across each gap of E.
inline std::function<cplx(double)> lusin_surrogate(const StepFunction& g, const CompactCircleSet& E) {
  return [g, E](double theta) -> cplx {
    double t = wrap_angle(theta);
    if (E.contains_angle(t, 0.0) || E.arcs().empty()) return g(t);
    // Gap between consecutive arcs: interpolate between the adjacent ends.
    double best_before = INFINITY, best_after = INFINITY, a_end = 0.0, b_start = 0.0;
    for (const auto& a : E.arcs()) {
      double d1 = wrap_angle(t - a.end);
      if (d1 < best_before) best_before = d1, a_end = a.end;
      double d2 = wrap_angle(a.start - t);
      if (d2 < best_after) best_after = d2, b_start = a.start;
    }
    double gap = best_before + best_after;
    double s = gap > 0.0 ? best_before / gap : 0.0;
    // Values just inside the adjacent arcs.
    cplx va = g(a_end - 1e-12), vb = g(b_start + 1e-12);
    return (1.0 - s) * va + s * vb;
  };
}

/// Runs the staged pipeline toward a universal series (Menshov sense) for a
/// step function g: stage k uses eps_k = eps 2^{-(k-1)}, the Cantor set E_N
/// with the minimal N having removed measure < eps_k (level-truncated,
/// jumps lying in E excised), the Lusin surrogate on E, finite samples of E
/// and one builder stage; the report gives the fraction of a uniform grid
/// where |s_{n_k} f - g| <= delta_k.
inline MenshovReport menshov_demo(const StepFunction& g, double eps, int stages, const MenshovOptions& opt = {}) {
  require(eps > 0.0 && eps < 1.0, "menshov_demo: eps must lie in (0, 1)");
  require(stages >= 0, "menshov_demo: stages must be non-negative");
  MenshovReport rep;
  std::vector<double> grid(opt.grid);
  std::vector<cplx> gvals(opt.grid);
  for (std::size_t i = 0; i < opt.grid; ++i) {
    grid[i] = two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(opt.grid);
    gvals[i] = g(grid[i]);
  }
  auto coverage = [&](const PowerSeries& P, double delta, const CompactCircleSet* E, double* on_E) {
    std::size_t hit = 0, inE = 0, hitE = 0;
    for (std::size_t i = 0; i < opt.grid; ++i) {
      bool ok = std::abs(P(unit(grid[i])) - gvals[i]) <= delta;
      hit += ok;
      if (E && E->contains_angle(grid[i], 0.0)) ++inE, hitE += ok;
    }
    if (on_E) *on_E = inE ? static_cast<double>(hitE) / static_cast<double>(inE) : 0.0;
    return static_cast<double>(hit) / static_cast<double>(opt.grid);
  };

  PowerSeries F;
  rep.coverage_stage0 = coverage(F, opt.delta, nullptr, nullptr);
  std::size_t n_prev = 0;
  for (int k = 1; k <= stages; ++k) {
    MenshovStage st;
    st.eps = eps * std::ldexp(1.0, -(k - 1));
    st.delta = opt.delta * std::ldexp(1.0, -(k - 1));
    // Part of eps pays for cutting arcs of total length 2 * cut around each
    // jump that lies inside E.
    const double cut = opt.jump_excision * st.eps * pi / std::max<std::size_t>(1, g.jumps.size());
    st.N = cantor_N_for_measure(st.eps * (1.0 - opt.jump_excision));
    auto E = detail::menshov_set(st.N, opt.cantor_levels, g, cut);
    st.E_measure = E.measure();
    auto surrogate = lusin_surrogate(g, E);
    auto ang = detail::menshov_samples(E, opt.samples);
    std::vector<cplx> w, tv;
    for (double t : ang) w.push_back(unit(t)), tv.push_back(surrogate(t));
    UniversalOptions bo = opt.builder;
    bo.n0 = n_prev;
    auto res = universal_builder({tv}, w, F, {st.eps}, bo);
    const auto& s = res.stages.back();
    st.sup_on_samples = s.sup_residual;
    st.block_norm = s.block_norm;
    st.met = s.met;
    if (res.failed_stage) {
      rep.failed_stage = static_cast<std::size_t>(k);
      rep.stages.push_back(st);
      break;
    }
    F = res.f;
    n_prev = res.indices.back();
    st.n_k = n_prev;
    st.coverage = coverage(F, st.delta, &E, &st.coverage_on_E);
    rep.stages.push_back(st);
  }
  rep.f = F;
  return rep;
}

// ---------------------------------------------------------------------------
// Cauchy transforms of atomic measures

/// K mu(w) = sum_j c_j / (1 - w_j w) for mu = sum_j c_j delta_{w_j}.
inline cplx cauchy_transform_measure(const std::vector<cplx>& points, const std::vector<cplx>& weights, cplx w) {
  require(points.size() == weights.size(), "cauchy_transform_measure: length mismatch");
  require(std::abs(std::abs(w) - 1.0) > 1e-8, "cauchy_transform_measure: w lies on the unit circle");
  cplx s{0.0};
  for (std::size_t j = 0; j < points.size(); ++j) s += weights[j] / (1.0 - points[j] * w);
  return s;
}

/// max over n = 0..n_max of |sum_j c_j w_j^n|, the moments that the Cauchy
/// transform encodes as Taylor coefficients.
inline double moment_annihilation_check(const std::vector<cplx>& points, const std::vector<cplx>& weights,
                                        std::size_t n_max) {
  require(points.size() == weights.size(), "moment_annihilation_check: length mismatch");
  double worst = 0.0;
  std::vector<cplx> pw(points.size(), cplx{1.0});
  for (std::size_t n = 0; n <= n_max; ++n) {
    cplx s{0.0};
    for (std::size_t j = 0; j < points.size(); ++j) {
      s += weights[j] * pw[j];
      pw[j] *= points[j];
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

/// Solves the homogeneous moment system sum_j c_j w_j^n = 0, n < M, for M
/// distinct atoms and returns the dimension of its solution space (0 means
/// only the zero measure annihilates the first M moments).
inline std::size_t moment_null_dimension(const std::vector<cplx>& points) {
  const auto M = static_cast<Eigen::Index>(points.size());
  CMatrix V(M, M);
  for (Eigen::Index n = 0; n < M; ++n)
    for (Eigen::Index j = 0; j < M; ++j) V(n, j) = std::pow(points[static_cast<std::size_t>(j)], static_cast<double>(n));
  Eigen::FullPivLU<CMatrix> lu(V);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.dimensionOfKernel());
}

}  // namespace shiftlab
