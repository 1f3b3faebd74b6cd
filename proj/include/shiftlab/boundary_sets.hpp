#pragma once

// Exceptional subsets of the circle: Cantor-type sets with prescribed removed
// measure, Dirichlet sets (where z^n -> 1 uniformly along a subsequence),
// and the Rogosinski sequences accumulating at a point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "shiftlab/core.hpp"
#include "shiftlab/domain.hpp"

namespace shiftlab {

struct CantorSpec {
  int N = 2;
  int levels = 0;  // J: removals at levels 0..J
};

/// Raised when a removal would not fit inside its host arc.
class CantorUnderflow : public InvalidInput {
 public:
  CantorUnderflow(int level, double removed, double host)
      : InvalidInput("build_cantor: removed arc of length " + std::to_string(removed) + " does not fit host arc of " +
                     "length " + std::to_string(host) + " at level " + std::to_string(level)),
        level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Interval in normalized circle units: [0, 1) is the full turn.
// Endpoints are kept in extended precision so that gap lengths at deep
// levels (~1e-9 near 0.5) are measured to ~1e-19 absolute.
struct UnitInterval {
  long double lo, hi;
  double length() const { return static_cast<double>(hi - lo); }
};

struct CantorLevelStats {
  int level;
  double removed_each;       // m_{N,j}
  double removed_level;      // sum of the 2^j lengths removed at this level
  double removed_through;    // cumulative removed measure
  double remaining;          // total length of the remaining closed arcs
  double carleson_through;   // sum m log(1/m) over removed arcs so far
};

/// Level-J stage of the Cantor construction: closed arcs that remain, the
/// open arcs removed (by level), and per-level bookkeeping. Lengths are in
/// normalized units (full circle = 1).
struct CantorSet {
  CantorSpec spec;
  std::vector<UnitInterval> arcs;
  std::vector<std::vector<UnitInterval>> removed;  // removed[j]: the 2^j arcs of level j
  std::vector<CantorLevelStats> stats;

  double removed_measure() const { return stats.empty() ? 0.0 : stats.back().removed_through; }
  double remaining_measure() const { return stats.empty() ? 1.0 : stats.back().remaining; }

  std::vector<double> removed_lengths() const {
    std::vector<double> out;
    for (const auto& lvl : removed)
      for (const auto& r : lvl) out.push_back(r.length());
    return out;
  }

  /// The remaining closed arcs as a CompactCircleSet (angles = 2 pi units).
  CompactCircleSet as_set() const {
    std::vector<Arc> a;
    for (const auto& iv : arcs) a.push_back({static_cast<double>(two_pi * iv.lo), static_cast<double>(two_pi * iv.hi)});
    return CompactCircleSet(std::move(a), {});
  }

  /// Distinct endpoints of the remaining arcs, as angles in [0, 2pi). These
  /// lie in the limiting Cantor set at every level. Unit position 1 is the
  /// same point as 0 and is listed once.
  std::vector<double> endpoint_angles() const {
    std::vector<double> out;
    for (const auto& iv : arcs) {
      out.push_back(static_cast<double>(two_pi * iv.lo));
      if (iv.hi < 1.0L) out.push_back(static_cast<double>(two_pi * iv.hi));
    }
    return out;
  }

  /// `count` endpoints chosen with an even stride through the ordered
  /// endpoint list (all of them if count exceeds the list).
  std::vector<double> endpoint_samples(std::size_t count) const {
    auto all = endpoint_angles();
    if (count >= all.size()) return all;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(all[i * all.size() / count]);
    return out;
  }
};

/// m_{N,j} = 2^{-j} (N + j)^{-2}.
inline double cantor_removed_length(int N, int j) {
  double nj = static_cast<double>(N + j);
  return std::ldexp(1.0, -j) / (nj * nj);
}

/// sum over the given normalized lengths of m log(1/m).
inline double carleson_partial(const std::vector<double>& lengths) {
  std::vector<double> t;
  t.reserve(lengths.size());
  for (double m : lengths) {
    require(m > 0.0 && m < 1.0, "carleson_partial: lengths must lie in (0, 1)");
    t.push_back(m * std::log(1.0 / m));
  }
  return pairwise_sum(t);
}

/// Starting from the whole circle as the closed arc [0, 1], level j removes
/// the centred open arc of length m_{N,j} from each of the 2^j current arcs.
inline CantorSet build_cantor(const CantorSpec& spec) {
  require(spec.N >= 1, "build_cantor: N must be positive");
  require(spec.levels >= 0 && spec.levels <= 24, "build_cantor: levels must lie in [0, 24]");
  CantorSet out;
  out.spec = spec;
  out.arcs = {{0.0, 1.0}};
  double removed_through = 0.0, carleson = 0.0;
  for (int j = 0; j <= spec.levels; ++j) {
    const double m = cantor_removed_length(spec.N, j);
    std::vector<UnitInterval> next, gone;
    next.reserve(2 * out.arcs.size());
    gone.reserve(out.arcs.size());
    for (const auto& a : out.arcs) {
      if (!(m < a.length())) throw CantorUnderflow(j, m, a.length());
      const long double c = 0.5L * (a.lo + a.hi), h = 0.5L * m;
      next.push_back({a.lo, c - h});
      gone.push_back({c - h, c + h});
      next.push_back({c + h, a.hi});
    }
    std::vector<double> gl(gone.size()), cl(gone.size()), rl(next.size());
    for (std::size_t i = 0; i < gone.size(); ++i) {
      gl[i] = gone[i].length();
      cl[i] = -gl[i] * std::log(gl[i]);
    }
    for (std::size_t i = 0; i < next.size(); ++i) rl[i] = next[i].length();
    double removed_level = pairwise_sum(gl);
    removed_through += removed_level;
    carleson += pairwise_sum(cl);
    out.arcs = std::move(next);
    out.removed.push_back(std::move(gone));
    out.stats.push_back({j, m, removed_level, removed_through, pairwise_sum(rl), carleson});
  }
  return out;
}

/// Smallest N >= 2 with sum_{j>=0} (N+j)^{-2} < eps, using the exact tail
/// sum_{j>=0} (N+j)^{-2} = psi'(N) (trigamma), evaluated by asymptotics.
inline int cantor_N_for_measure(double eps) {
  require(eps > 0.0 && eps < 1.0, "cantor_N_for_measure: eps must lie in (0, 1)");
  auto trigamma = [](double x) {
    double acc = 0.0;
    while (x < 20.0) acc += 1.0 / (x * x), x += 1.0;
    double x2 = 1.0 / (x * x);
    return acc + 1.0 / x + 0.5 * x2 + x2 / x * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)));
  };
  int N = 2;
  while (trigamma(static_cast<double>(N)) >= eps) ++N;
  return N;
}

struct DirichletHit {
  std::uint64_t n;
  double residual;
};

namespace detail {

// max of |e^{i phi} - 1| for phi ranging over [lo, hi] (turns, long double).
inline double chord_sup_turns(long double lo, long double hi) {
  if (hi - lo >= 1.0L) return 2.0;
  long double a = lo - std::floor(lo), b = a + (hi - lo);
  // Contains a half-turn: the antipode of 1 is reached.
  if ((a <= 0.5L && b >= 0.5L) || (b >= 1.5L)) return 2.0;
  auto ch = [](long double t) {
    return 2.0 * std::abs(std::sin(static_cast<double>(std::numbers::pi_v<long double> * (t - std::floor(t)))));
  };
  return std::max(ch(a), ch(b));
}

// sup_E |z^n - 1|; negative when an arc of E is too long for n (guard).
inline double dirichlet_residual(const CompactCircleSet& E, std::uint64_t n, double delta) {
  double worst = 0.0;
  for (const auto& p : E.points()) worst = std::max(worst, p.power_residual(n));
  for (const auto& a : E.arcs()) {
    if (a.length() > delta / static_cast<double>(n)) return -1.0;
    const long double two_pi_l = 2.0L * std::numbers::pi_v<long double>;
    long double lo = static_cast<long double>(n) * (static_cast<long double>(a.start) / two_pi_l);
    long double hi = static_cast<long double>(n) * (static_cast<long double>(a.end) / two_pi_l);
    worst = std::max(worst, chord_sup_turns(lo, hi));
  }
  return worst;
}

}  // namespace detail

/// All n in [1, n_max] with sup_E |z^n - 1| <= delta, sorted by residual
/// (ties by n). Arcs longer than delta/n disqualify that n: no set with
/// interior is a Dirichlet set.
inline std::vector<DirichletHit> dirichlet_search(const CompactCircleSet& E, std::uint64_t n_max, double delta) {
  require(delta > 0.0, "dirichlet_search: delta must be positive");
  require(!E.empty(), "dirichlet_search: empty set");
  std::vector<double> res;
  parallel_map(static_cast<std::size_t>(n_max), res,
               [&](std::size_t i) { return detail::dirichlet_residual(E, i + 1, delta); });
  std::vector<DirichletHit> hits;
  for (std::size_t i = 0; i < res.size(); ++i)
    if (res[i] >= 0.0 && res[i] <= delta) hits.push_back({i + 1, res[i]});
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.residual < b.residual; });
  return hits;
}

/// Record minima of n -> sup_E |z^n - 1| over 1..n_max: each returned n has
/// a strictly smaller residual than every earlier n.
inline std::vector<DirichletHit> dirichlet_records(const CompactCircleSet& E, std::uint64_t n_max) {
  require(!E.empty(), "dirichlet_records: empty set");
  std::vector<double> res;
  parallel_map(static_cast<std::size_t>(n_max), res,
               [&](std::size_t i) { return detail::dirichlet_residual(E, i + 1, 2.0); });
  std::vector<DirichletHit> out;
  double best = INFINITY;
  for (std::size_t i = 0; i < res.size(); ++i)
    if (res[i] >= 0.0 && res[i] < best) best = res[i], out.push_back({i + 1, res[i]});
  return out;
}

enum class RogosinskiVariant { E1, EN };

/// zeta * E1 with E1 = {e^{+-i pi/(2k)} : k <= k_max} u {1}, or
/// zeta * EN with EN = {e^{i pi/k} : N <= k <= k_max} u {1}. The points are
/// stored exactly (as turn fractions) when zeta = 1.
inline CompactCircleSet rogosinski_set(cplx zeta, RogosinskiVariant variant, int k_max, int N = 1) {
  require(std::abs(std::abs(zeta) - 1.0) <= 1e-12, "rogosinski_set: zeta must be unimodular");
  require(k_max >= 1, "rogosinski_set: k_max must be positive");
  std::vector<CirclePoint> pts;
  pts.push_back({0.0, TurnFraction{0, 1}});
  if (variant == RogosinskiVariant::E1) {
    for (std::int64_t k = 1; k <= k_max; ++k) {
      pts.push_back({pi / (2.0 * k), TurnFraction{1, 4 * k}});
      pts.push_back({-pi / (2.0 * k), TurnFraction{4 * k - 1, 4 * k}});
    }
  } else {
    require(N >= 1, "rogosinski_set: N must be positive");
    for (std::int64_t k = N; k <= k_max; ++k) pts.push_back({pi / k, TurnFraction{1, 2 * k}});
  }
  CompactCircleSet base({}, std::move(pts));
  if (zeta == cplx{1.0}) return base;
  return base.rotated(std::arg(zeta));
}

}  // namespace shiftlab
