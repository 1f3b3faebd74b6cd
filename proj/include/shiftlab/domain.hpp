#pragma once

// Bounded plane domains with membership oracles, and compact subsets of the
// unit circle built from finitely many closed arcs and isolated points.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shiftlab/core.hpp"

namespace shiftlab {

struct Box {
  double xmin, xmax, ymin, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

struct UnitDiskShape {};
struct DiskShape {
  cplx center;
  double radius;
};
struct TwoDiskShape {
  cplx c1;
  double r1;
  cplx c2;
  double r2;
};
struct PolygonShape {
  std::vector<cplx> vertices;  // counter-clockwise after construction
};

namespace detail {

// Sign of the orientation of (a, b, c); zero within the boundary tolerance.
inline int orientation(cplx a, cplx b, cplx c, double tol = 1e-12) {
  double v = (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
  if (std::abs(v) <= tol * std::max(1.0, std::abs(b - a))) return 0;
  return v > 0 ? 1 : -1;
}

inline double segment_distance(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

inline bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
  int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  // Touching / collinear overlap counts as a defect for a Jordan polygon.
  if (o1 == 0 && segment_distance(c, a, b) < 1e-12) return true;
  if (o2 == 0 && segment_distance(d, a, b) < 1e-12) return true;
  return false;
}

// Closed segment vs closed box (Liang-Barsky clipping).
inline bool segment_meets_box(cplx a, cplx b, const Box& box) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.real() - a.real(), dy = b.imag() - a.imag();
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.real() - box.xmin, box.xmax - a.real(), a.imag() - box.ymin, box.ymax - a.imag()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      double t = q[i] / p[i];
      if (p[i] < 0.0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
      if (t0 > t1) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Bounded domain: unit disk, disk, union of two overlapping disks, or a
/// Jordan polygon. Membership is strict: points within 1e-12 of the
/// boundary are treated as outside.
class Domain {
 public:
  using Shape = std::variant<UnitDiskShape, DiskShape, TwoDiskShape, PolygonShape>;

  static Domain unit_disk() { return Domain(UnitDiskShape{}); }

  static Domain disk(cplx center, double radius) {
    require(radius > 0.0, "Disk: radius must be positive");
    return Domain(DiskShape{center, radius});
  }

  /// Union of two disks that overlap without either containing the other,
  /// which makes the union a Jordan domain.
  static Domain two_disk_union(cplx c1, double r1, cplx c2, double r2) {
    require(r1 > 0.0 && r2 > 0.0, "TwoDiskUnion: radii must be positive");
    double d = std::abs(c1 - c2);
    require(d < r1 + r2, "TwoDiskUnion: disks do not overlap");
    require(d > std::abs(r1 - r2), "TwoDiskUnion: one disk contains the other");
    return Domain(TwoDiskShape{c1, r1, c2, r2});
  }

  static Domain polygon(std::vector<cplx> vertices) {
    const std::size_t n = vertices.size();
    require(n >= 3, "PolygonJordan: need at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx a = vertices[i], b = vertices[(i + 1) % n];
      area2 += a.real() * b.imag() - b.real() * a.imag();
    }
    require(std::abs(area2) > 1e-12, "PolygonJordan: degenerate polygon");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
        require(!detail::segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]),
                "PolygonJordan: edges intersect");
      }
    if (area2 < 0) std::reverse(vertices.begin(), vertices.end());
    return Domain(PolygonShape{std::move(vertices)});
  }

  const Shape& shape() const { return shape_; }

  std::string kind_name() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return "UnitDisk";
          else if constexpr (std::is_same_v<S, DiskShape>) return "Disk";
          else if constexpr (std::is_same_v<S, TwoDiskShape>) return "TwoDiskUnion";
          else return "PolygonJordan";
        },
        shape_);
  }

  bool contains(cplx z) const {
    constexpr double tol = 1e-12;
    return std::visit(
        [&](const auto& s) -> bool {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return std::abs(z) < 1.0 - tol;
          else if constexpr (std::is_same_v<S, DiskShape>) return std::abs(z - s.center) < s.radius - tol;
          else if constexpr (std::is_same_v<S, TwoDiskShape>)
            return std::abs(z - s.c1) < s.r1 - tol || std::abs(z - s.c2) < s.r2 - tol;
          else return polygon_contains(s, z);
        },
        shape_);
  }

  /// Euclidean distance from z to the closure of the domain (0 inside).
  double distance_to_closure(cplx z) const {
    return std::visit(
        [&](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return std::max(0.0, std::abs(z) - 1.0);
          else if constexpr (std::is_same_v<S, DiskShape>) return std::max(0.0, std::abs(z - s.center) - s.radius);
          else if constexpr (std::is_same_v<S, TwoDiskShape>)
            return std::min(std::max(0.0, std::abs(z - s.c1) - s.r1), std::max(0.0, std::abs(z - s.c2) - s.r2));
          else {
            if (polygon_contains(s, z)) return 0.0;
            double d = INFINITY;
            const auto& v = s.vertices;
            for (std::size_t i = 0; i < v.size(); ++i)
              d = std::min(d, detail::segment_distance(z, v[i], v[(i + 1) % v.size()]));
            return d;
          }
        },
        shape_);
  }

  Box bbox() const {
    return std::visit(
        [](const auto& s) -> Box {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return {-1, 1, -1, 1};
          else if constexpr (std::is_same_v<S, DiskShape>)
            return {s.center.real() - s.radius, s.center.real() + s.radius, s.center.imag() - s.radius,
                    s.center.imag() + s.radius};
          else if constexpr (std::is_same_v<S, TwoDiskShape>)
            return {std::min(s.c1.real() - s.r1, s.c2.real() - s.r2), std::max(s.c1.real() + s.r1, s.c2.real() + s.r2),
                    std::min(s.c1.imag() - s.r1, s.c2.imag() - s.r2), std::max(s.c1.imag() + s.r1, s.c2.imag() + s.r2)};
          else {
            Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
            for (cplx v : s.vertices) {
              b.xmin = std::min(b.xmin, v.real());
              b.xmax = std::max(b.xmax, v.real());
              b.ymin = std::min(b.ymin, v.imag());
              b.ymax = std::max(b.ymax, v.imag());
            }
            return b;
          }
        },
        shape_);
  }

  /// Lebesgue area in closed form.
  double area() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return pi;
          else if constexpr (std::is_same_v<S, DiskShape>) return pi * s.radius * s.radius;
          else if constexpr (std::is_same_v<S, TwoDiskShape>) {
            double d = std::abs(s.c1 - s.c2), r1 = s.r1, r2 = s.r2;
            double lens = r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1)) +
                          r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2)) -
                          0.5 * std::sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
            return pi * (r1 * r1 + r2 * r2) - lens;
          } else {
            double a2 = 0.0;
            const auto& v = s.vertices;
            for (std::size_t i = 0; i < v.size(); ++i) {
              cplx a = v[i], b = v[(i + 1) % v.size()];
              a2 += a.real() * b.imag() - b.real() * a.imag();
            }
            return 0.5 * a2;
          }
        },
        shape_);
  }

  enum class Cover { Inside, Outside, Boundary };

  /// Exact classification of a closed axis-aligned box against the domain.
  /// Boundary is conservative: it is returned whenever the box is not
  /// provably inside or provably outside.
  Cover classify(const Box& b) const {
    const cplx corners[4] = {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
    auto box_dist = [&](cplx c) {
      double dx = std::max({b.xmin - c.real(), 0.0, c.real() - b.xmax});
      double dy = std::max({b.ymin - c.imag(), 0.0, c.imag() - b.ymax});
      return std::hypot(dx, dy);
    };
    auto disk_cover = [&](cplx c, double r) {
      bool all_in = true;
      for (cplx z : corners) all_in = all_in && std::abs(z - c) < r;
      if (all_in) return Cover::Inside;
      if (box_dist(c) >= r) return Cover::Outside;
      return Cover::Boundary;
    };
    return std::visit(
        [&](const auto& s) -> Cover {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitDiskShape>) return disk_cover(0.0, 1.0);
          else if constexpr (std::is_same_v<S, DiskShape>) return disk_cover(s.center, s.radius);
          else if constexpr (std::is_same_v<S, TwoDiskShape>) {
            Cover a = disk_cover(s.c1, s.r1), c = disk_cover(s.c2, s.r2);
            if (a == Cover::Inside || c == Cover::Inside) return Cover::Inside;
            if (a == Cover::Outside && c == Cover::Outside) return Cover::Outside;
            return Cover::Boundary;
          } else {
            const auto& v = s.vertices;
            for (std::size_t i = 0; i < v.size(); ++i)
              if (detail::segment_meets_box(v[i], v[(i + 1) % v.size()], b)) return Cover::Boundary;
            return polygon_contains(s, {0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)}) ? Cover::Inside
                                                                                            : Cover::Outside;
          }
        },
        shape_);
  }

  /// Throws unless 0 lies in the domain (needed for shift experiments).
  const Domain& require_contains_zero() const {
    require(contains(0.0), "Domain: 0 is not in the domain");
    return *this;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using S = std::decay_t<decltype(s)>;
          auto c = [](cplx z) { return "(" + fmt_num(z.real()) + "," + fmt_num(z.imag()) + ")"; };
          if constexpr (std::is_same_v<S, UnitDiskShape>) return "UnitDisk";
          else if constexpr (std::is_same_v<S, DiskShape>) return "Disk" + c(s.center) + "r" + fmt_num(s.radius);
          else if constexpr (std::is_same_v<S, TwoDiskShape>)
            return "TwoDiskUnion" + c(s.c1) + "r" + fmt_num(s.r1) + "+" + c(s.c2) + "r" + fmt_num(s.r2);
          else return "PolygonJordan[" + std::to_string(s.vertices.size()) + "]";
        },
        shape_);
  }

 private:
  explicit Domain(Shape s) : shape_(std::move(s)) {}

  static std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

  // Winding number with an exact-orientation predicate; points on an edge
  // (within tolerance) are boundary points and therefore not contained.
  static bool polygon_contains(const PolygonShape& s, cplx z) {
    const auto& v = s.vertices;
    int wn = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      cplx a = v[i], b = v[(i + 1) % v.size()];
      if (detail::segment_distance(z, a, b) <= 1e-12) return false;
      if (a.imag() <= z.imag()) {
        if (b.imag() > z.imag() && detail::orientation(a, b, z, 0.0) > 0) ++wn;
      } else if (b.imag() <= z.imag() && detail::orientation(a, b, z, 0.0) < 0) {
        --wn;
      }
    }
    return wn != 0;
  }

  Shape shape_;
};

/// Closed arc of the unit circle, {e^{it} : start <= t <= end}, with start in
/// [0, 2*pi) and 0 <= end - start <= 2*pi.
struct Arc {
  double start;
  double end;
  double length() const { return end - start; }
  double midpoint() const { return 0.5 * (start + end); }
  bool contains_angle(double theta, double tol = 1e-12) const {
    double t = wrap_angle(theta - start);
    return t <= length() + tol || t >= two_pi - tol;
  }
  bool full_circle() const { return length() >= two_pi; }
};

/// Exact rational position on the circle, a fraction num/den of a full turn.
struct TurnFraction {
  std::int64_t num;
  std::int64_t den;
};

/// Point of the unit circle; rational points keep an exact representation
/// so that z^n = 1 can be decided without rounding.
struct CirclePoint {
  double angle;
  std::optional<TurnFraction> turn;
  // Position in turns carried in extended precision, for irrational points
  // whose powers are examined at large n. NaN when absent.
  long double turns_ld = std::numeric_limits<long double>::quiet_NaN();

  static CirclePoint from_turns(long double t) {
    t -= std::floor(t);
    return {static_cast<double>(2.0L * std::numbers::pi_v<long double> * t), std::nullopt, t};
  }

  cplx value() const {
    if (turn) return unit(two_pi * static_cast<double>(turn->num % turn->den) / static_cast<double>(turn->den));
    return unit(angle);
  }

  /// |z^n - 1|, exact zero for rational points whose denominator divides n*num.
  double power_residual(std::uint64_t n) const {
    if (turn) {
      const auto den = static_cast<unsigned __int128>(turn->den);
      auto num = static_cast<__int128>(turn->num % turn->den);
      if (num < 0) num += turn->den;
      auto r = static_cast<std::int64_t>((static_cast<unsigned __int128>(num) * n) % den);
      if (r == 0) return 0.0;
      return 2.0 * std::abs(std::sin(pi * static_cast<double>(r) / static_cast<double>(turn->den)));
    }
    long double t = std::isnan(turns_ld) ? static_cast<long double>(angle) / (2.0L * std::numbers::pi_v<long double>)
                                         : turns_ld;
    long double x = static_cast<long double>(n) * t;
    x -= std::floor(x);
    return 2.0 * std::abs(std::sin(static_cast<double>(std::numbers::pi_v<long double> * x)));
  }
};

/// Finite union of closed arcs and isolated points of the unit circle.
class CompactCircleSet {
 public:
  CompactCircleSet() = default;

  /// Arcs are normalized (wrapped, sorted, overlapping or touching arcs
  /// merged); points are wrapped and de-duplicated.
  CompactCircleSet(std::vector<Arc> arcs, std::vector<CirclePoint> points) {
    for (auto& a : arcs) {
      require(a.end >= a.start, "CompactCircleSet: arc end precedes start");
      double len = std::min(a.length(), two_pi);
      a.start = wrap_angle(a.start);
      a.end = a.start + len;
    }
    arcs_ = merge(std::move(arcs));
    for (auto& p : points) p.angle = wrap_angle(p.angle);
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.angle < b.angle; });
    for (const auto& p : points)
      if (points_.empty() || std::abs(points_.back().angle - p.angle) > 1e-15) points_.push_back(p);
  }

  static CompactCircleSet from_angles(const std::vector<double>& angles) {
    std::vector<CirclePoint> pts;
    for (double t : angles) pts.push_back({t, std::nullopt});
    return CompactCircleSet({}, std::move(pts));
  }

  /// Points given as complex numbers; each must be unimodular within 1e-12.
  static CompactCircleSet from_points(const std::vector<cplx>& zs) {
    std::vector<CirclePoint> pts;
    for (cplx z : zs) {
      require(std::abs(std::abs(z) - 1.0) <= 1e-12, "CompactCircleSet: point is not unimodular");
      pts.push_back({std::arg(z), std::nullopt});
    }
    return CompactCircleSet({}, std::move(pts));
  }

  /// The K-th roots of unity, stored exactly.
  static CompactCircleSet roots_of_unity(std::int64_t K) {
    require(K >= 1, "roots_of_unity: K must be positive");
    std::vector<CirclePoint> pts;
    for (std::int64_t k = 0; k < K; ++k)
      pts.push_back({two_pi * static_cast<double>(k) / static_cast<double>(K), TurnFraction{k, K}});
    return CompactCircleSet({}, std::move(pts));
  }

  static CompactCircleSet arc(double start, double end) { return CompactCircleSet({{start, end}}, {}); }

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<CirclePoint>& points() const { return points_; }
  bool empty() const { return arcs_.empty() && points_.empty(); }

  /// Normalized arc-length measure (isolated points have measure zero).
  double measure() const {
    double s = 0.0;
    for (const auto& a : arcs_) s += a.length();
    return std::min(1.0, s / two_pi);
  }

  bool contains_angle(double theta, double tol = 1e-12) const {
    for (const auto& a : arcs_)
      if (a.contains_angle(theta, tol)) return true;
    for (const auto& p : points_)
      if (std::abs(std::remainder(theta - p.angle, two_pi)) <= tol) return true;
    return false;
  }

  /// Evaluation grid: every isolated point plus, for each arc, per_arc + 1
  /// equispaced angles including both endpoints.
  std::vector<cplx> samples(std::size_t per_arc = 64) const {
    std::vector<cplx> out;
    for (const auto& p : points_) out.push_back(p.value());
    for (const auto& a : arcs_) {
      std::size_t n = std::max<std::size_t>(per_arc, 1);
      for (std::size_t i = 0; i <= n; ++i) {
        if (a.full_circle() && i == n) break;
        out.push_back(unit(a.start + a.length() * static_cast<double>(i) / static_cast<double>(n)));
      }
    }
    return out;
  }

  /// Same set rotated by the angle phi.
  CompactCircleSet rotated(double phi) const {
    std::vector<Arc> arcs = arcs_;
    for (auto& a : arcs) a.start += phi, a.end += phi;
    std::vector<CirclePoint> pts;
    for (auto p : points_) {
      p.angle += phi;
      p.turn.reset();
      p.turns_ld = std::numeric_limits<long double>::quiet_NaN();
      pts.push_back(p);
    }
    return CompactCircleSet(std::move(arcs), std::move(pts));
  }

  friend CompactCircleSet set_union(const CompactCircleSet& a, const CompactCircleSet& b) {
    std::vector<Arc> arcs = a.arcs_;
    arcs.insert(arcs.end(), b.arcs_.begin(), b.arcs_.end());
    std::vector<CirclePoint> pts = a.points_;
    pts.insert(pts.end(), b.points_.begin(), b.points_.end());
    return CompactCircleSet(std::move(arcs), std::move(pts));
  }

 private:
  static std::vector<Arc> merge(std::vector<Arc> arcs) {
    if (arcs.empty()) return arcs;
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
    std::vector<Arc> out;
    for (const auto& a : arcs) {
      if (!out.empty() && a.start <= out.back().end) out.back().end = std::max(out.back().end, a.end);
      else out.push_back(a);
    }
    // Wrap-around: the last arc may reach past 2*pi into the first one.
    while (out.size() > 1 && out.back().end >= out.front().start + two_pi) {
      out.back().end = std::max(out.back().end, out.front().end + two_pi);
      out.erase(out.begin());
    }
    for (auto& a : out)
      if (a.length() >= two_pi) return {Arc{0.0, two_pi}};
    return out;
  }

  std::vector<Arc> arcs_;
  std::vector<CirclePoint> points_;
};

}  // namespace shiftlab
