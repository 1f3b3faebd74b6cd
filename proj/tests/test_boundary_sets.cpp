#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "shiftlab/boundary_sets.hpp"

using namespace shiftlab;
using Catch::Approx;

TEST_CASE("cantor level 0") {
  auto C = build_cantor({2, 0});
  REQUIRE(C.arcs.size() == 2);
  REQUIRE(C.removed.size() == 1);
  CHECK(C.removed[0][0].length() == Approx(0.25));
  CHECK(C.removed[0][0].lo == Approx(0.375));
  CHECK(carleson_partial(C.removed_lengths()) == Approx(0.25 * std::log(4.0)));
  CHECK(C.stats[0].carleson_through == Approx(0.25 * std::log(4.0)));
}

TEST_CASE("cantor bookkeeping") {
  for (int N : {2, 3, 5}) {
    auto C = build_cantor({N, 12});
    CHECK(C.arcs.size() == (std::size_t{1} << 13));
    double closed = 0.0, prev_carleson = 0.0;
    for (const auto& s : C.stats) {
      closed += 1.0 / ((N + s.level) * double(N + s.level));
      CHECK(std::abs(s.removed_through - closed) <= 1e-12);
      CHECK(std::abs(s.remaining + s.removed_through - 1.0) <= 1e-12);
      double bound = 0.0;
      for (int j = 0; j <= s.level; ++j) bound += std::log(2.0) * j / ((N + j) * double(N + j));
      CHECK(s.carleson_through > bound);
      CHECK(s.carleson_through > prev_carleson);
      prev_carleson = s.carleson_through;
    }
    CHECK(carleson_partial(C.removed_lengths()) == Approx(C.stats.back().carleson_through).epsilon(1e-12));
  }
}

TEST_CASE("cantor nesting and disjointness") {
  auto A = build_cantor({3, 4});
  auto B = build_cantor({3, 5});
  // Every level-5 arc lies inside the level-4 arc with index i/2.
  for (std::size_t i = 0; i < B.arcs.size(); ++i) {
    const auto& host = A.arcs[i / 2];
    CHECK(B.arcs[i].lo >= host.lo);
    CHECK(B.arcs[i].hi <= host.hi);
  }
  for (std::size_t i = 1; i < B.arcs.size(); ++i) CHECK(B.arcs[i].lo > B.arcs[i - 1].hi);
  auto E = B.as_set();
  CHECK(E.arcs().size() == B.arcs.size() - 1);  // the arcs through angle 0 join
  CHECK(E.measure() == Approx(B.remaining_measure()).epsilon(1e-12));
}

TEST_CASE("cantor endpoints and underflow") {
  auto C = build_cantor({2, 3});
  auto all = C.endpoint_angles();
  CHECK(all.size() == 31);
  auto s16 = C.endpoint_samples(16);
  CHECK(s16.size() == 16);
  std::set<double> distinct(s16.begin(), s16.end());
  CHECK(distinct.size() == 16);
  auto E = C.as_set();
  for (double t : all) CHECK(E.contains_angle(t, 1e-12));

  try {
    build_cantor({1, 3});
    FAIL("expected underflow");
  } catch (const CantorUnderflow& e) {
    CHECK(e.level() == 0);
  }
}

TEST_CASE("cantor N for measure") {
  int N = cantor_N_for_measure(0.2);
  double tail = 0.0, tail_prev = 0.0;
  for (int j = 0; j < 2000000; ++j) tail += 1.0 / ((N + j) * double(N + j)), tail_prev += 1.0 / ((N - 1 + j) * double(N - 1 + j));
  // Remaining tails beyond 2e6 terms are below 1e-6.
  CHECK(tail < 0.2);
  CHECK(tail_prev + 1e-6 >= 0.2);
  CHECK(N == 6);
}

TEST_CASE("dirichlet search on roots of unity") {
  auto R = CompactCircleSet::roots_of_unity(7);
  auto hits = dirichlet_search(R, 100, 1e-9);
  REQUIRE(hits.size() == 14);
  for (const auto& h : hits) {
    CHECK(h.n % 7 == 0);
    CHECK(h.residual == 0.0);
  }
  auto one = dirichlet_search(CompactCircleSet::from_angles({0.0}), 50, 1e-12);
  CHECK(one.size() == 50);
}

TEST_CASE("dirichlet records of the golden point") {
  CompactCircleSet E({}, {CirclePoint::from_turns((1.0L + std::sqrt(5.0L)) / 2.0L)});
  auto rec = dirichlet_records(E, 100000);
  // Continued fraction of phi is [1; 1, 1, ...]; convergent denominators
  // are the Fibonacci numbers, and q phi - p = -psi^n with psi = (1 - sqrt5)/2.
  std::vector<std::uint64_t> fib{1, 2};
  while (fib.back() + fib[fib.size() - 2] <= 100000) fib.push_back(fib.back() + fib[fib.size() - 2]);
  REQUIRE(rec.size() == fib.size());
  const double psi = std::abs(0.5 * (1.0 - std::sqrt(5.0)));
  for (std::size_t i = 0; i < fib.size(); ++i) {
    CHECK(rec[i].n == fib[i]);
    // F_k with F_1 = F_2 = 1: fib[i] = F_{i+2}, distance psi^{i+2}.
    double dist = std::pow(psi, static_cast<double>(i + 2));
    CHECK(rec[i].residual == Approx(2.0 * std::sin(pi * dist)).epsilon(1e-8));
  }
}

TEST_CASE("dirichlet residual floor with a bad point") {
  auto R = CompactCircleSet::roots_of_unity(4);
  auto E = set_union(R, CompactCircleSet({}, {CirclePoint::from_turns((1.0L + std::sqrt(5.0L)) / 2.0L)}));
  auto hits = dirichlet_search(E, 20000, 1e-3);
  for (const auto& h : hits) CHECK(h.residual > 0.0);
  auto all = dirichlet_search(E, 20000, 2.0);
  double floor = INFINITY;
  for (const auto& h : all) floor = std::min(floor, h.residual);
  CHECK(floor > 0.0);
}

TEST_CASE("dirichlet arcs guard") {
  // Short arc: qualifies only while n * length stays small.
  auto E = CompactCircleSet::arc(0.0, 1e-4);
  auto hits = dirichlet_search(E, 100, 0.05);
  for (const auto& h : hits) CHECK(h.n * 1e-4 <= 0.05);
  CHECK(!hits.empty());
  // |z^n - 1| on the arc is maximal at its far end: 2 sin(n * 1e-4 / 2).
  for (const auto& h : hits) CHECK(h.residual == Approx(2 * std::sin(h.n * 0.5e-4)).epsilon(1e-9));
  CHECK(dirichlet_search(CompactCircleSet::arc(0.0, 1.0), 100, 0.1).empty());
}

TEST_CASE("rogosinski sets") {
  auto E1 = rogosinski_set(1.0, RogosinskiVariant::E1, 2);
  std::vector<double> want{0.0, pi / 4, pi / 2, 3 * pi / 2, 7 * pi / 4};
  REQUIRE(E1.points().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(E1.points()[i].angle == Approx(want[i]).margin(1e-15));

  auto EN = rogosinski_set(1.0, RogosinskiVariant::EN, 8, 5);
  REQUIRE(EN.points().size() == 5);
  std::vector<double> wn{0.0, pi / 8, pi / 7, pi / 6, pi / 5};
  for (std::size_t i = 0; i < 5; ++i) CHECK(EN.points()[i].angle == Approx(wn[i]).margin(1e-15));

  cplx zeta = unit(2.0);
  auto R = rogosinski_set(zeta, RogosinskiVariant::E1, 50);
  // Nearest point to zeta other than zeta itself is at angle pi/100.
  double nearest = INFINITY;
  bool has_zeta = false;
  for (const auto& p : R.points()) {
    double d = std::abs(std::remainder(p.angle - 2.0, two_pi));
    if (d < 1e-14) has_zeta = true;
    else nearest = std::min(nearest, d);
  }
  CHECK(has_zeta);
  CHECK(nearest == Approx(pi / 100));
}
