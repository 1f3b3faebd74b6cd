#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shiftlab/dynamics.hpp"

using namespace shiftlab;

namespace {

const Domain& standard_domain() {
  static const Domain d = Domain::two_disk_union(0.0, 1.0, 1.0, 0.3);
  return d;
}
const Arc standard_gamma{0.9, two_pi - 0.9};

PowerSeries random_poly(std::mt19937_64& rng, std::size_t deg) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<cplx> c(deg + 1);
  for (auto& x : c) x = {N(rng), N(rng)};
  return PowerSeries(c);
}

// Points of the unit disk and the bump kept at least `gap` from the circle arc Gamma/alpha.
std::vector<cplx> test_grid(const KitaiFunction& kf, std::size_t count, double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.3, 1.3);
  std::vector<cplx> out;
  while (out.size() < count) {
    cplx z{U(rng), U(rng)};
    if (!standard_domain().contains(z)) continue;
    if (detail::dist_to_arc(kf.gamma(), kf.alpha() * z) < gap) continue;
    out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("eigenfunctions of the backward shift") {
  CHECK(gamma_eval(0.0, cplx{0.3, 0.7}) == cplx{1.0});
  CHECK(gamma_eval(0.5, 1.0) == cplx{2.0});
  CHECK_THROWS_AS(gamma_eval(0.5, 2.0), InvalidInput);
  for (cplx a : {cplx{0.9, 0.0}, cplx{-0.3, 0.6}, std::polar(0.9, 2.0), cplx{0.0}})
    CHECK(eigen_check(a, 100) <= 1e-12);
}

TEST_CASE("shift and forward shift compose on coefficients") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    PowerSeries f = random_poly(rng, 1 + t);
    CHECK(backward_shift(forward_shift(f)) == f);
    CHECK(forward_shift(backward_shift(f)) + PowerSeries{f[0]} == f);
  }
}

TEST_CASE("resolvent inverts T - alpha") {
  const Domain disk = Domain::unit_disk();
  std::vector<cplx> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(std::polar(0.05 + 0.9 * i / 40.0, 0.37 * i));

  SECTION("constant function") {
    const cplx alpha{2.0, 0.5};
    auto rep = resolvent_apply(PowerSeries{1.0}, alpha, disk, grid);
    for (cplx s : rep.values) CHECK(std::abs(s + 1.0 / alpha) <= 1e-14);
    CHECK(rep.residual <= 1e-13);
  }

  SECTION("random polynomials, 1/alpha inside the domain") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0, oracle = 0.0;
    for (int t = 0; t < 50; ++t) {
      PowerSeries g = random_poly(rng, 12);
      cplx inv = std::polar(0.9 * U(rng), two_pi * U(rng));  // 1/alpha in the disk
      cplx alpha = 1.0 / inv;
      auto rep = resolvent_apply(g, alpha, disk, grid);
      worst = std::max(worst, rep.residual / (1.0 + g.coeffs().size()));
      PowerSeries q = resolvent_series(g, alpha);
      for (std::size_t i = 0; i < grid.size(); ++i)
        oracle = std::max(oracle, std::abs(rep.values[i] - q(grid[i])) / (1.0 + std::abs(q(grid[i]))));
    }
    CHECK(worst <= 1e-8);
    CHECK(oracle <= 1e-10);
  }

  SECTION("removable point") {
    std::mt19937_64 rng(5);
    PowerSeries g = random_poly(rng, 6);
    const cplx alpha{2.0, 0.0};
    PowerSeries q = resolvent_series(g, alpha);
    cplx z = 1.0 / alpha + 1e-8;
    auto rep = resolvent_apply(g, alpha, disk, {z, 1.0 / alpha});
    CHECK(std::abs(rep.values[0] - q(z)) <= 1e-6);
    CHECK(std::abs(rep.values[1] - q(1.0 / alpha)) <= 1e-10);
  }

  SECTION("precondition") {
    CHECK_THROWS_AS(resolvent_apply(PowerSeries{1.0}, 0.5, disk, grid), InvalidInput);
    CHECK_THROWS_AS(resolvent_apply(PowerSeries{1.0}, 0.0, disk, grid), InvalidInput);
  }
}

TEST_CASE("spectrum membership") {
  const Domain disk = Domain::unit_disk();
  CHECK(spectrum_membership(disk, 0.0));
  CHECK(spectrum_membership(disk, 0.5));
  CHECK(spectrum_membership(disk, cplx{0.0, 1.0}));
  CHECK_FALSE(spectrum_membership(disk, 1.5));
  CHECK(spectrum_membership(standard_domain(), 0.0));
  CHECK_FALSE(spectrum_membership(standard_domain(), 1.0 / 1.2));
  CHECK(spectrum_membership(standard_domain(), 0.5));
  CHECK_FALSE(spectrum_membership(standard_domain(), 1.5));
}

TEST_CASE("Kitai function closed form") {
  const KitaiFunction kf(std::polar(1.0, 0.3), standard_gamma);
  CHECK(std::abs(kitai_eval(kf, 0.0) - I * standard_gamma.length()) <= 1e-14);
  CHECK(std::abs(kf.taylor()[0] - I * standard_gamma.length()) <= 1e-14);

  const KitaiFunction k0(0.0, standard_gamma);
  CHECK(std::abs(kitai_eval(k0, cplx{0.7, -0.2}) - k0.taylor()[0]) <= 1e-14);

  SECTION("quadrature oracle") {
    double worst = 0.0;
    for (cplx z : test_grid(kf, 50, 1e-3, 1))
      worst = std::max(worst, std::abs(kitai_eval(kf, z) - kitai_eval_quadrature(kf, z)));
    CHECK(worst <= 1e-8);
  }

  SECTION("single logarithm against sub-arc sum") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    double worst = 0.0;
    for (Arc G : {standard_gamma, Arc{2.0, 2.4}, Arc{0.1, 3.0}, Arc{5.0, 8.5}})
      for (int i = 0; i < 20000; ++i) {
        cplx w{U(rng), U(rng)};
        if (detail::dist_to_arc(G, w) < 1e-9) continue;
        worst = std::max(worst, std::abs(detail::arc_cauchy_log(G, w) - detail::arc_cauchy_log_subdivided(G, w)));
      }
    CHECK(worst <= 1e-12);
  }

  SECTION("Taylor coefficients") {
    cplx z{0.3, 0.35};
    CHECK(std::abs(kf.taylor()(z) - kitai_eval(kf, z)) <= 1e-12);
    CHECK(kf.cap_error(0.5) < 1e-100);
  }

  SECTION("near-singular points are flagged") {
    cplx on_arc = std::polar(1.0, 2.0) / kf.alpha();
    CHECK_THROWS_AS(kitai_eval(kf, on_arc * (1.0 + 1e-8)), NearSingular);
    CHECK_THROWS_AS(kitai_iterate(kf, 3, on_arc), NearSingular);
    CHECK_NOTHROW(kitai_eval(kf, on_arc * (1.0 - 1e-4)));
  }

  CHECK_THROWS_AS(KitaiFunction(0.5, Arc{1.0, 1.0}), InvalidInput);
}

TEST_CASE("Kitai iterates and right inverses") {
  const KitaiFunction kf(std::polar(1.0, -0.2), standard_gamma);
  const auto grid = test_grid(kf, 30, 1e-3, 7);

  SECTION("n = 0 reduces to the function") {
    for (cplx z : grid) {
      CHECK(std::abs(kitai_iterate(kf, 0, z) - kitai_eval(kf, z)) <= 1e-14);
      CHECK(std::abs(kitai_right_inverse(kf, 0, z) - kitai_eval(kf, z)) <= 1e-14);
    }
  }

  SECTION("one shift against the cached expansion") {
    const auto& c = kf.taylor().coeffs();
    PowerSeries shifted = backward_shift(PowerSeries(std::vector<cplx>(c.begin(), c.begin() + 201)));
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      cplx z = std::polar(0.5 * (i + 1) / 40.0, 0.9 * i);
      worst = std::max(worst, std::abs(kitai_iterate(kf, 1, z) - shifted(z)));
    }
    CHECK(worst <= 1e-7);
  }

  SECTION("closed forms against quadrature") {
    double worst = 0.0;
    for (std::size_t n : {1u, 7u, 40u, 200u})
      for (std::size_t i = 0; i < grid.size(); i += 3) {
        cplx z = grid[i];
        cplx t = kitai_iterate_quadrature(kf, n, z), s = kitai_right_inverse_quadrature(kf, n, z);
        worst = std::max(worst, std::abs(kitai_iterate(kf, n, z) - t) / std::max(1.0, std::abs(t)));
        worst = std::max(worst, std::abs(kitai_right_inverse(kf, n, z) - s) / std::max(1.0, std::abs(s)));
      }
    CHECK(worst <= 1e-8);
  }

  SECTION("partial integration") {
    for (cplx z : {cplx{0.4, 0.3}, cplx{-0.8, 0.1}, cplx{1.15, 0.1}}) {
      auto r = kitai_partial_integration(kf, 10, z);
      CHECK(r.residual <= 1e-7);
    }
    CHECK_THROWS_AS(kitai_partial_integration(kf, 1, 0.1), InvalidInput);
  }

  SECTION("T^n S_n is the identity on f_alpha") {
    // (S_n f - s_{n-1} S_n f) / z^n cancels about n log10(1/|z|) digits.
    std::vector<cplx> nz, outer;
    for (cplx z : grid) {
      if (std::abs(z) > 0.05) nz.push_back(z);
      if (std::abs(z) > 0.5) outer.push_back(z);
    }
    CHECK(kitai_right_inverse_check(kf, 5, nz) <= 1e-7);
    CHECK(kitai_right_inverse_check(kf, 17, outer) <= 1e-7);
  }

  CHECK_THROWS_AS(kitai_right_inverse(KitaiFunction(0.0, standard_gamma), 2, 0.3), InvalidInput);
}

TEST_CASE("Kitai norms decay along n") {
  const KitaiFunction kf(1.0, standard_gamma);
  const Domain& dom = standard_domain();
  auto f = kitai_norm(kf, KitaiPart::F, 0, dom);
  CHECK(f.converged);
  std::vector<double> T, S;
  for (std::size_t n : {10u, 40u, 200u}) {
    auto t = kitai_norm(kf, KitaiPart::Iterate, n, dom), s = kitai_norm(kf, KitaiPart::RightInverse, n, dom);
    CHECK(t.converged);
    CHECK(s.converged);
    T.push_back(t.value);
    S.push_back(s.value);
  }
  CHECK(T[1] < T[0]);
  CHECK(T[2] < T[1]);
  CHECK(T[2] <= 0.1 * T[0]);
  CHECK(S[1] < S[0]);
  CHECK(S[2] < S[1]);
  // ||S_n f_alpha|| behaves like n^{-1/2}: sqrt(10/200) = 0.224.
  CHECK(S[2] / S[0] == Catch::Approx(std::sqrt(10.0 / 200.0)).margin(0.03));
}

TEST_CASE("expansion in the Kitai span") {
  const Domain& dom = standard_domain();
  const auto A = CompactCircleSet::arc(-0.5, 0.5);
  const auto G = CompactCircleSet::arc(0.9, two_pi - 0.9);

  SECTION("a member of the span") {
    ExpansionOptions opt;
    opt.samples = 6;
    opt.ridge = 0.0;
    cplx a1 = chebyshev_alphas(A.arcs().front(), 6)[2];
    KitaiFunction k1(a1, G.arcs().front());
    auto ex = expand_in_kitai_span([&](cplx z) { return kitai_eval(k1, z); }, dom, A, G, opt);
    CHECK(ex.residual <= 1e-8);
    for (std::size_t i = 0; i < ex.coeffs.size(); ++i) CHECK(std::abs(ex.coeffs[i] - (i == 2 ? 1.0 : 0.0)) <= 1e-8);
  }

  SECTION("zero") {
    auto ex = expand_in_kitai_span(PowerSeries{}, dom, A, G, ExpansionOptions{8});
    for (cplx c : ex.coeffs) CHECK(c == cplx{0.0});
    CHECK(ex.residual == 0.0);
  }

  SECTION("identity function, regression") {
    auto ex = expand_in_kitai_span(PowerSeries{0.0, 1.0}, dom, A, G);
    CHECK(ex.alphas.size() == 48);
    CHECK(ex.residual == Catch::Approx(0.561969).epsilon(1e-4));
    CHECK(ex.residual < ex.v_norm);
  }

  SECTION("geometry failure") {
    CHECK_THROWS_AS(expand_in_kitai_span(PowerSeries{1.0}, dom, A, CompactCircleSet::arc(0.5, 2.0)), InvalidInput);
  }
}

TEST_CASE("mixing tables") {
  SECTION("unit disk fast path") {
    PowerSeries u{1.0, -0.5, 0.25}, v{0.3, cplx{0.0, 1.0}, -0.7, 0.1};
    auto tab = verify_mixing(u, v, Domain::unit_disk(), {8, 16, 32, 64, 128});
    CHECK(tab.fast_path);
    CHECK(tab.monotone);
    for (const auto& r : tab.rows) {
      CHECK(std::abs(r.err_u - r.closed_form) <= 1e-9);
      CHECK(r.err_v == 0.0);
    }
    auto zero = verify_mixing(u, PowerSeries{}, Domain::unit_disk(), {4, 8});
    for (const auto& r : zero.rows) CHECK(r.err_u + r.err_v == 0.0);
  }

  SECTION("general domain, v in the span") {
    MixingOptions opt;
    opt.expansion.samples = 6;
    opt.expansion.ridge = 0.0;
    cplx a1 = chebyshev_alphas(opt.A.arcs().front(), 6)[4];
    KitaiFunction k1(a1, opt.Gamma.arcs().front(), 0);
    auto tab = verify_mixing(PowerSeries{}, [&](cplx z) { return kitai_eval(k1, z); }, standard_domain(), {8, 16, 32},
                             opt);
    CHECK_FALSE(tab.fast_path);
    CHECK(tab.monotone);
    CHECK_FALSE(tab.inconclusive);
    CHECK(tab.expansion_residual <= 1e-6);
    for (const auto& r : tab.rows) CHECK(r.err_v <= 1e-6);
    CHECK(tab.rows.back().err_u < tab.rows.front().err_u);
  }
}

TEST_CASE("Dirichlet limit demonstration") {
  const Domain& dom = standard_domain();

  SECTION("h = f is reproduced exactly") {
    PowerSeries f{1.0, 0.5};
    auto demo = dirichlet_limit_demo(f, f, CompactCircleSet::from_angles({0.0}), dom, {2, 8});
    for (const auto& r : demo.rows) CHECK(r.residual <= 1e-15);
  }

  SECTION("rational point selects n + 1 divisible by its order") {
    PowerSeries f{0.5};
    auto E = CompactCircleSet({}, {CirclePoint{two_pi / 24.0, TurnFraction{1, 24}}});
    auto demo = dirichlet_limit_demo(f, f, E, dom, {10, 23, 47});
    REQUIRE(demo.rows.size() == 2);
    CHECK(demo.rows[0].n == 23);
    CHECK(demo.rows[1].n == 47);
    CHECK(demo.rows[0].power_residual == 0.0);
    CHECK(demo.skipped == std::vector<std::size_t>{10});
  }

  SECTION("sets with interior are rejected") {
    CHECK_THROWS_AS(dirichlet_limit_demo(PowerSeries{0.0}, PowerSeries{1.0}, CompactCircleSet::arc(-0.1, 0.1), dom, {8}),
                    InvalidInput);
  }

  SECTION("points outside the domain are rejected") {
    CHECK_THROWS_AS(dirichlet_limit_demo(PowerSeries{0.0}, PowerSeries{1.0}, CompactCircleSet::from_angles({pi}), dom, {8}),
                    InvalidInput);
  }

  SECTION("driving the partial sums at 1 towards 1") {
    auto demo = dirichlet_limit_demo(PowerSeries{}, PowerSeries{1.0}, CompactCircleSet::from_angles({0.0}), dom, {32});
    REQUIRE(demo.rows.size() == 1);
    CHECK(demo.rows[0].residual <= 0.1);
    CHECK(demo.rows[0].correction_norm < 1.0);
  }
}

TEST_CASE("partial sums on arcs") {
  SECTION("absolutely convergent coefficients") {
    auto coeff = [](std::size_t n) { return n == 0 ? cplx{0.0} : cplx{1.0 / (double(n) * double(n))}; };
    // Reference from 2e5 terms plus the integral tail estimate.
    auto ref = [&](cplx z) {
      cplx s{0.0}, p{1.0};
      for (std::size_t k = 0; k <= 200000; ++k, p *= z) s += coeff(k) * p;
      return s;
    };
    auto set = CompactCircleSet::arc(1.0, 2.0);
    auto tab = fatou_riesz_check(coeff, ref, set, {10, 100, 1000}, 8);
    for (const auto& r : tab.rows) {
      double tail = 0.0;
      for (std::size_t k = r.n + 1; k <= 200000; ++k) tail += 1.0 / (double(k) * double(k));
      CHECK(r.value <= tail + 1e-12);
    }
    CHECK(tab.converging);
  }

  SECTION("coefficients 1/n near -1") {
    auto tab = fatou_riesz_check([](std::size_t n) { return n == 0 ? cplx{0.0} : cplx{1.0 / double(n)}; },
                                 [](cplx z) { return -std::log(1.0 - z); }, CompactCircleSet::arc(pi - 0.5, pi + 0.5),
                                 {10, 100, 1000, 10000}, 64);
    CHECK(tab.monotone);
    CHECK(tab.converging);
    CHECK(tab.rows.back().value < 1e-3);
  }

  SECTION("no decay at -1") {
    auto tab = fatou_riesz_check([](std::size_t) { return cplx{1.0}; }, [](cplx z) { return 1.0 / (1.0 - z); },
                                 CompactCircleSet::from_angles({pi}), {10, 11, 100, 101});
    for (const auto& r : tab.rows) CHECK(r.value == Catch::Approx(0.5).margin(1e-12));
    CHECK_FALSE(tab.converging);
  }

  SECTION("shift iterates decay inside the disk") {
    auto tab = shift_decay_table(geometric_series(0.9, 300), 0.5, {0, 10, 50, 100});
    CHECK(tab.monotone);
    CHECK(tab.converging);
  }
}
