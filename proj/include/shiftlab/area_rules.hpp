#pragma once

// Area quadrature rules (weighted node sets) for the supported domains.
// Weights integrate against Lebesgue area measure.

#include <algorithm>
#include <cmath>
#include <vector>

#include "shiftlab/core.hpp"
#include "shiftlab/domain.hpp"
#include "shiftlab/gauss.hpp"

namespace shiftlab {

struct AreaRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  // Partially covered cells left at the depth limit: a few probe points and
  // the cell area, used to bound the unresolved part of the integral.
  std::vector<std::vector<cplx>> edge_probes;
  std::vector<double> edge_areas;
  std::size_t cells = 0;

  void append(const AreaRule& o) {
    nodes.insert(nodes.end(), o.nodes.begin(), o.nodes.end());
    weights.insert(weights.end(), o.weights.begin(), o.weights.end());
    edge_probes.insert(edge_probes.end(), o.edge_probes.begin(), o.edge_probes.end());
    edge_areas.insert(edge_areas.end(), o.edge_areas.begin(), o.edge_areas.end());
    cells += o.cells;
  }

  double total_weight() const { return pairwise_sum(weights); }
};

/// Polar tensor rule on the disk |z - c| < R: nr Gauss-Legendre radial nodes
/// times nt equispaced angles. Integrates r^j e^{ik theta} exactly for
/// j <= 2 nr - 2 and |k| < nt.
inline AreaRule polar_disk_rule(cplx c, double R, std::size_t nr, std::size_t nt) {
  AreaRule rule;
  const GaussRule& g = gauss_legendre(nr);
  const double dt = two_pi / static_cast<double>(nt);
  for (std::size_t i = 0; i < nr; ++i) {
    double r = 0.5 * R * (g.nodes[i] + 1.0);
    double wr = 0.5 * R * g.weights[i] * r;
    for (std::size_t j = 0; j < nt; ++j) {
      rule.nodes.push_back(c + r * unit(dt * static_cast<double>(j)));
      rule.weights.push_back(wr * dt);
    }
  }
  rule.cells = 1;
  return rule;
}

/// Angular edges for composite rules: `base` equal panels over [0, 2pi),
/// and each interval in `hot` (angle pairs, lo < hi) cut into panels no wider
/// than `hot_width`.
inline std::vector<double> angular_edges(std::size_t base, const std::vector<std::pair<double, double>>& hot,
                                         double hot_width) {
  std::vector<double> e;
  for (std::size_t k = 0; k <= base; ++k) e.push_back(two_pi * static_cast<double>(k) / static_cast<double>(base));
  for (auto [lo, hi] : hot) {
    auto cnt = static_cast<std::size_t>(std::ceil((hi - lo) / hot_width));
    for (std::size_t k = 0; k <= cnt; ++k) {
      double t = wrap_angle(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cnt));
      e.push_back(t);
    }
  }
  std::sort(e.begin(), e.end());
  std::vector<double> out;
  for (double t : e)
    if (out.empty() || t - out.back() > 1e-13) out.push_back(t);
  if (two_pi - out.back() < 1e-13) out.back() = two_pi;
  else out.push_back(two_pi);
  return out;
}

/// Composite polar rule on |z - c| < R with radial panels graded toward the
/// rim ([0, R/2], then halving gaps `levels` times) and the given angular
/// panel edges. `order` Gauss nodes per panel in each direction. Suited to
/// integrands with weak singularities on the circle.
inline AreaRule graded_disk_rule(cplx c, double R, const std::vector<double>& theta_edges, int levels,
                                 std::size_t order) {
  std::vector<double> r_edges{0.0, 0.5};
  for (int k = 2; k <= levels + 1; ++k) r_edges.push_back(1.0 - std::ldexp(1.0, -k));
  r_edges.push_back(1.0);
  AreaRule rule;
  const GaussRule& g = gauss_legendre(order);
  for (std::size_t a = 0; a + 1 < r_edges.size(); ++a) {
    double r0 = R * r_edges[a], r1 = R * r_edges[a + 1];
    for (std::size_t b = 0; b + 1 < theta_edges.size(); ++b) {
      double t0 = theta_edges[b], t1 = theta_edges[b + 1];
      for (std::size_t i = 0; i < order; ++i) {
        double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * g.nodes[i];
        double wr = 0.5 * (r1 - r0) * g.weights[i] * r;
        for (std::size_t j = 0; j < order; ++j) {
          double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * g.nodes[j];
          rule.nodes.push_back(c + r * unit(t));
          rule.weights.push_back(wr * 0.5 * (t1 - t0) * g.weights[j]);
        }
      }
      ++rule.cells;
    }
  }
  return rule;
}

/// Rule for the lune D(c2, r2) minus the closed disk D(c1, r1), in polar
/// coordinates about c2. The angle range is cut at every direction where the
/// radial segment structure changes (rays through the circle intersection
/// points, tangent rays); each angular panel uses a sine substitution that
/// absorbs square-root behaviour at its ends, split into `sub` pieces.
inline AreaRule lune_rule(cplx c1, double r1, cplx c2, double r2, std::size_t sub, std::size_t nphi, std::size_t nt) {
  const cplx d = c2 - c1;
  const double dist = std::abs(d);
  double cc = dist * dist - r1 * r1;
  if (std::abs(cc) < 1e-14 * std::max(1.0, r1 * r1)) cc = 0.0;

  std::vector<double> breaks;
  // Circle intersection points.
  double a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
  double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  cplx dir = -d / dist;  // from c2 toward c1 is -d; intersection seen from c1 along +d
  cplx base = c1 + a * (d / dist);
  cplx perp = I * (d / dist);
  for (cplx p : {base + h * perp, base - h * perp}) breaks.push_back(wrap_angle(std::arg(p - c2)));
  const double phi_c1 = std::arg(dir);
  if (cc > 0.0) {
    double s = std::asin(std::min(1.0, r1 / dist));
    breaks.push_back(wrap_angle(phi_c1 + s));
    breaks.push_back(wrap_angle(phi_c1 - s));
  } else if (cc == 0.0) {
    breaks.push_back(wrap_angle(phi_c1 + pi / 2));
    breaks.push_back(wrap_angle(phi_c1 - pi / 2));
  }
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(two_pi);

  AreaRule rule;
  const GaussRule& gp = gauss_legendre(nphi);
  const GaussRule& gt = gauss_legendre(nt);
  auto add_segment = [&](cplx u, double wphi, double lo, double hi) {
    if (hi - lo <= 0.0) return;
    for (std::size_t k = 0; k < nt; ++k) {
      double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gt.nodes[k];
      rule.nodes.push_back(c2 + t * u);
      rule.weights.push_back(wphi * 0.5 * (hi - lo) * gt.weights[k] * t);
    }
  };
  for (std::size_t bi = 0; bi + 1 < breaks.size(); ++bi) {
    const double A = breaks[bi], B = breaks[bi + 1];
    if (B - A < 1e-14) continue;
    for (std::size_t s = 0; s < sub; ++s) {
      // Pieces in the substituted variable so that the ends of [A, B] stay
      // clustered.
      double u0 = -1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(sub);
      double u1 = -1.0 + 2.0 * static_cast<double>(s + 1) / static_cast<double>(sub);
      for (std::size_t j = 0; j < nphi; ++j) {
        double uu = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gp.nodes[j];
        double phi = 0.5 * (A + B) + 0.5 * (B - A) * std::sin(0.5 * pi * uu);
        double jac = 0.5 * (B - A) * 0.5 * pi * std::cos(0.5 * pi * uu);
        double wphi = 0.5 * (u1 - u0) * gp.weights[j] * jac;
        cplx u = unit(phi);
        double b = (std::conj(u) * d).real();
        double disc = b * b - cc;
        if (disc <= 0.0) {
          add_segment(u, wphi, 0.0, r2);
          continue;
        }
        double sq = std::sqrt(disc);
        double t1 = -b - sq, t2 = -b + sq;
        if (t1 > 0.0) add_segment(u, wphi, 0.0, std::min(t1, r2));
        if (t2 < r2) add_segment(u, wphi, std::max(t2, 0.0), r2);
      }
      ++rule.cells;
    }
  }
  return rule;
}

/// Adaptive cell subdivision of the bounding box. Cells classified inside
/// get a tensor Gauss rule of the given order; boundary cells split until
/// max_depth, where the covered part is estimated from a 4x4 probe grid.
inline AreaRule cell_rule(const Domain& dom, int max_depth, std::size_t order = 4) {
  AreaRule rule;
  const GaussRule& g = gauss_legendre(order);
  Box bb = dom.bbox();
  // Square root cell so that subdivision keeps cells square.
  double side = std::max(bb.width(), bb.height()) * (1.0 + 1e-9);
  Box root{bb.xmin, bb.xmin + side, bb.ymin, bb.ymin + side};
  auto rec = [&](auto&& self, const Box& b, int depth) -> void {
    auto cover = dom.classify(b);
    if (cover == Domain::Cover::Outside) return;
    const double hx = 0.5 * b.width(), hy = 0.5 * b.height();
    const double cx = b.xmin + hx, cy = b.ymin + hy;
    if (cover == Domain::Cover::Inside) {
      for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j) {
          rule.nodes.push_back({cx + hx * g.nodes[i], cy + hy * g.nodes[j]});
          rule.weights.push_back(hx * hy * g.weights[i] * g.weights[j]);
        }
      ++rule.cells;
      return;
    }
    if (depth >= max_depth) {
      std::vector<cplx> probes;
      const double area = b.width() * b.height();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          cplx z{b.xmin + (i + 0.5) * b.width() / 4, b.ymin + (j + 0.5) * b.height() / 4};
          probes.push_back(z);
          if (dom.contains(z)) {
            rule.nodes.push_back(z);
            rule.weights.push_back(area / 16.0);
          }
        }
      rule.edge_probes.push_back(std::move(probes));
      rule.edge_areas.push_back(area);
      ++rule.cells;
      return;
    }
    self(self, Box{b.xmin, cx, b.ymin, cy}, depth + 1);
    self(self, Box{cx, b.xmax, b.ymin, cy}, depth + 1);
    self(self, Box{b.xmin, cx, cy, b.ymax}, depth + 1);
    self(self, Box{cx, b.xmax, cy, b.ymax}, depth + 1);
  };
  rec(rec, root, 0);
  return rule;
}

/// Standard rule for integrating |P|^p over a domain, P a polynomial of
/// degree d, at refinement level `level` (each level roughly doubles the
/// resolution in every direction). For disks, level 0 is exact when p = 2.
inline AreaRule domain_rule(const Domain& dom, std::size_t d, int level) {
  const std::size_t scale = std::size_t{1} << level;
  const std::size_t nr = (d + 2) * scale, nt = (2 * d + 2) * scale;
  return std::visit(
      [&](const auto& s) -> AreaRule {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnitDiskShape>) return polar_disk_rule(0.0, 1.0, nr, std::max<std::size_t>(nt, 8));
        else if constexpr (std::is_same_v<S, DiskShape>)
          return polar_disk_rule(s.center, s.radius, nr, std::max<std::size_t>(nt, 8));
        else if constexpr (std::is_same_v<S, TwoDiskShape>) {
          AreaRule r = polar_disk_rule(s.c1, s.r1, nr, std::max<std::size_t>(nt, 8));
          r.append(lune_rule(s.c1, s.r1, s.c2, s.r2, (2 + d / 4) * scale, 16, d + 2));
          return r;
        } else {
          return cell_rule(dom, std::min(5 + level, 12));
        }
      },
      dom.shape());
}

}  // namespace shiftlab
