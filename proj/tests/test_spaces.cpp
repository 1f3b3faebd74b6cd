#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shiftlab/norms.hpp"

using namespace shiftlab;
using Catch::Approx;

namespace {

PowerSeries random_poly(std::mt19937_64& rng, std::size_t max_deg, double scale = 1.0) {
  std::uniform_int_distribution<std::size_t> deg(0, max_deg);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<cplx> c(deg(rng) + 1);
  for (auto& a : c) a = {u(rng), u(rng)};
  return PowerSeries(c);
}

}  // namespace

TEST_CASE("domain membership and validation") {
  auto D = Domain::unit_disk();
  CHECK(D.contains(0.0));
  CHECK_FALSE(D.contains(1.0));
  CHECK_FALSE(D.contains(1.0 - 1e-13));
  CHECK(D.contains(1.0 - 1e-11));

  auto U = Domain::two_disk_union(0.0, 1.0, 1.0, 0.3);
  CHECK(U.contains(1.2));
  CHECK_FALSE(U.contains(-1.0));
  CHECK(U.area() == Approx(pi + 0.09 * pi - 0.0).epsilon(0.05));
  CHECK_THROWS_AS(Domain::two_disk_union(0.0, 1.0, 3.0, 0.3), InvalidInput);
  CHECK_THROWS_AS(Domain::two_disk_union(0.0, 1.0, 0.2, 0.3), InvalidInput);

  auto P = Domain::polygon({{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}});
  CHECK(P.contains({0.5, 0.4}));
  CHECK_FALSE(P.contains({1.0, 1.5}));
  CHECK_FALSE(P.contains({1.0, 0.0}));  // on an edge
  CHECK(P.area() == Approx(2.5));
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidInput);
  // Clockwise input is reoriented.
  auto Q = Domain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(Q.area() == Approx(1.0));

  CHECK_THROWS_AS(Domain::disk(2.0, 0.5).require_contains_zero(), InvalidInput);
  CHECK(Domain::disk(0.1, 0.5).distance_to_closure(2.0) == Approx(1.4));
}

TEST_CASE("compact circle sets") {
  // Overlapping arcs merge; the wrap-around arc joins the one starting at 0.
  CompactCircleSet E({{0.0, 0.5}, {0.4, 1.0}, {6.0, two_pi}}, {});
  REQUIRE(E.arcs().size() == 1);
  CHECK(E.arcs()[0].start == Approx(6.0));
  CHECK(E.arcs()[0].end == Approx(two_pi + 1.0));
  CHECK(E.measure() == Approx((1.0 + two_pi - 6.0) / two_pi));
  for (cplx z : E.samples(32)) CHECK(E.contains_angle(std::arg(z), 1e-12));

  auto R = CompactCircleSet::roots_of_unity(6);
  CHECK(R.points().size() == 6);
  for (const auto& p : R.points()) {
    CHECK(p.power_residual(6) == 0.0);
    CHECK(p.power_residual(12) == 0.0);
  }
  CHECK(R.points()[1].power_residual(3) > 1.0);
  CHECK_THROWS_AS(CompactCircleSet::from_points({cplx{1.0, 1e-5}}), InvalidInput);
}

TEST_CASE("A^2 disk norm: quadrature vs exact") {
  CHECK(norm(PowerSeries{1.0}, NormSpec(ApDiskNormalized{2})).value == Approx(1.0).epsilon(1e-12));
  for (std::size_t nu : {0, 1, 5, 17}) {
    double v = norm(PowerSeries::monomial(nu), NormSpec(ApDiskNormalized{2})).value;
    CHECK(v * v == Approx(1.0 / (nu + 1)).epsilon(1e-12));
  }
  CHECK(a2_disk_norm_exact(PowerSeries{0.0, 1.0}) == Approx(std::sqrt(0.5)));
  CHECK(a2_disk_norm_exact(PowerSeries{1.0}) == 1.0);

  auto g = geometric_series(0.5, 60);
  double oracle = 0.0;
  for (int nu = 0; nu <= 60; ++nu) oracle += std::pow(0.25, nu) / (nu + 1);
  double q = norm(g, NormSpec(ApDiskNormalized{2})).value;
  CHECK(std::abs(q * q - oracle) <= 1e-8 * oracle);

  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    auto f = random_poly(rng, 60);
    auto r = norm(f, NormSpec(ApDiskNormalized{2}));
    CHECK(r.converged);
    CHECK(std::abs(r.value - a2_disk_norm_exact(f)) <= 1e-8 * a2_disk_norm_exact(f));
  }
}

TEST_CASE("circle norms") {
  for (std::size_t n : {0, 3, 20})
    for (double p : {1.0, 2.0, 3.5})
      CHECK(hp_or_lp_circle_norm(PowerSeries::monomial(n), p).value == Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    auto f = random_poly(rng, 40);
    double s = 0.0;
    for (auto a : f.coeffs()) s += std::norm(a);
    double v = hp_or_lp_circle_norm(f, 2.0).value;
    CHECK(std::abs(v * v - s) <= 1e-10 * s);
  }

  // 1-D oracle: (1/2pi) int_0^{2pi} 2|cos(t/2)| dt by adaptive Gauss on the
  // two smooth halves.
  double half = adaptive_gauss([](double t) { return 2.0 * std::cos(0.5 * t); }, 0.0, pi, 1e-14);
  double oracle = 2.0 * half / two_pi;
  CHECK(oracle == Approx(4.0 / pi).epsilon(1e-13));
  auto h1 = norm(PowerSeries{1.0, 1.0}, NormSpec(HardyP{1.0}));
  CHECK(std::abs(h1.value - oracle) <= 1e-6);

  TrigPolynomial tp({1.0, 0.0, 1.0}, -1);  // z^{-1} + z = 2 cos t
  double l2 = norm(tp, NormSpec(LpCircle{2.0})).value;
  CHECK(l2 == Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sup norm on sets") {
  auto E = CompactCircleSet({{0.3, 1.2}}, {{3.0, std::nullopt}});
  CHECK(sup_norm_on_set(PowerSeries{1.0}, E) == Approx(1.0));
  auto R = CompactCircleSet::roots_of_unity(5);
  CHECK(sup_norm_on_set(PowerSeries::monomial(5), R) == Approx(1.0));
  for (const auto& p : R.points()) CHECK(std::abs(PowerSeries::monomial(5)(p.value()) - 1.0) <= 1e-14);
  CHECK(sup_norm_on_set(PowerSeries{1.0, -1.0}, CompactCircleSet::from_angles({0.0})) == 0.0);
  // |1 + z| on the arc [0.3, 1.2] peaks at the left end: 2 cos(0.15).
  CHECK(sup_norm_on_set(PowerSeries{1.0, 1.0}, CompactCircleSet::arc(0.3, 1.2)) == Approx(2 * std::cos(0.15)).epsilon(1e-12));
  CHECK_THROWS_AS(sup_norm_on_set(PowerSeries{1.0}, CompactCircleSet()), InvalidInput);
}

TEST_CASE("norm axioms for every norm selector") {
  std::mt19937_64 rng(17);
  std::vector<NormSpec> specs{
      NormSpec(ApOnDomain{Domain::two_disk_union(0.0, 1.0, 1.0, 0.3), 2.0}, 1e-10),
      NormSpec(ApOnDomain{Domain::disk(0.2, 0.7), 1.5}, 1e-10),
      NormSpec(ApDiskNormalized{2.0}),
      NormSpec(ApDiskNormalized{3.0}, 1e-11),
      NormSpec(LpCircle{1.0}, 1e-11),
      NormSpec(HardyP{4.0}, 1e-11),
      NormSpec(SupOnSet{CompactCircleSet({{0.5, 1.5}}, {{3.0, std::nullopt}})}),
      NormSpec(BsSpace{0.5}),
  };
  for (const auto& spec : specs) {
    for (int t = 0; t < 4; ++t) {
      auto f = random_poly(rng, 12), g = random_poly(rng, 12);
      cplx c{-1.7, 0.4};
      double nf = norm(f, spec).value, ng = norm(g, spec).value;
      double nfg = norm(f + g, spec).value;
      double ncf = norm(c * f, spec).value;
      INFO(spec.describe());
      CHECK(nfg <= nf + ng + 1e-9 * (nf + ng));
      CHECK(std::abs(ncf - std::abs(c) * nf) <= 1e-9 * ncf);
    }
  }
}

TEST_CASE("area norm on other domains") {
  // Disk(0, R): ||z^k||_p^p = 2 pi R^{kp+2} / (kp + 2) with area measure.
  for (double p : {1.0, 2.0, 3.0}) {
    double R = 1.2;
    auto r = norm(PowerSeries::monomial(3), NormSpec(ApOnDomain{Domain::disk(0.0, R), p}, 1e-11));
    CHECK(r.converged);
    CHECK(std::pow(r.value, p) == Approx(two_pi * std::pow(R, 3 * p + 2) / (3 * p + 2)).epsilon(1e-9));
  }
  // Square [0,1]^2 as a polygon: int |z|^2 = 2/3.
  auto sq = Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  auto r = norm(PowerSeries{0.0, 1.0}, NormSpec(ApOnDomain{sq, 2.0}, 1e-10));
  CHECK(r.value * r.value == Approx(2.0 / 3.0).epsilon(1e-7));
  // A rotated square needs real boundary cells; accuracy is first order.
  auto dia = Domain::polygon({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  auto rd = norm(PowerSeries{1.0}, NormSpec(ApOnDomain{dia, 2.0}, 1e-3));
  CHECK(rd.value * rd.value == Approx(2.0).epsilon(3e-3));
  auto strict = norm(PowerSeries{1.0}, NormSpec(ApOnDomain{dia, 2.0}, 1e-12));
  CHECK_FALSE(strict.converged);
  CHECK_THROWS_AS(strict.checked(1e-12), ToleranceFailure);
}

TEST_CASE("monotone in the domain") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    auto f = random_poly(rng, 20);
    double a = norm(f, NormSpec(ApOnDomain{Domain::disk(0.0, 1.0), 2.0})).value;
    double b = norm(f, NormSpec(ApOnDomain{Domain::disk(0.0, 1.2), 2.0})).value;
    CHECK(a <= b * (1 + 1e-10));
    CHECK(a == Approx(std::sqrt(pi) * a2_disk_norm_exact(f)).epsilon(1e-10));
  }
}

TEST_CASE("tail norms decrease") {
  std::vector<cplx> c(40);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = cplx{1.0 / (k + 1.0), 0.3};
  PowerSeries f(c);
  double prev = INFINITY;
  for (std::size_t n = 0; n < 39; ++n) {
    double v = a2_disk_norm_exact(f - partial_sum(f, n));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("local uniform control by the mean value property") {
  // |f(z)| <= (1 / area D(z, 1/2)) int_D |f| dA = 4 ||f||_{A^1(D, m2)} for |z| <= 1/2.
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    auto f = random_poly(rng, 25);
    double a1 = norm(f, NormSpec(ApDiskNormalized{1.0}, 1e-6)).value;
    double m = std::max(max_modulus(f, 0.5), std::abs(f(0.0)));
    CHECK(m <= 4.0 * a1 * (1 + 1e-5));
  }
}

TEST_CASE("arc geometry") {
  auto D = Domain::unit_disk();
  auto rep = arc_geometry_check(D, CompactCircleSet::arc(0.0, 0.2), CompactCircleSet::arc(pi - 0.1, pi + 0.1));
  CHECK(rep.arc_in_complement);
  CHECK(rep.quotient.start == Approx(pi - 0.3));
  CHECK(rep.quotient.end == Approx(pi + 0.1));

  auto U = Domain::two_disk_union(0.0, 1.0, 1.0, 0.3);
  auto r2 = arc_geometry_check(U, CompactCircleSet::arc(0.0, 0.2), CompactCircleSet::arc(pi - 0.1, pi + 0.1));
  CHECK(r2.arc_in_complement);
  CHECK(r2.dist_to_closure == 0.0);  // every point of T lies in closure(D)
  // Oracle: T cap U = angles with |e^{it} - 1| < 0.3, i.e. |t| < 2 asin(0.15).
  double edge = 2 * std::asin(0.15);
  double oracle = 2 * std::sin(0.5 * ((pi - 0.3) - edge));
  CHECK(r2.dist_to_circle_part == Approx(oracle).epsilon(1e-6));
  CHECK(r2.passes());

  // Standard configuration: A = [-0.5, 0.5], Gamma = [0.9, 2pi - 0.9].
  auto r3 = arc_geometry_check(U, CompactCircleSet::arc(-0.5, 0.5), CompactCircleSet::arc(0.9, two_pi - 0.9));
  CHECK(r3.passes());
  CHECK(r3.quotient.length() == Approx(two_pi - 0.8));
  // An A that is too wide makes the quotient arc reach into the bump.
  auto r4 = arc_geometry_check(U, CompactCircleSet::arc(-0.7, 0.7), CompactCircleSet::arc(0.9, two_pi - 0.9));
  CHECK_FALSE(r4.passes());
}
