#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shiftlab/gauss.hpp"
#include "shiftlab/series.hpp"

using namespace shiftlab;
using Catch::Approx;

namespace {

PowerSeries random_poly(std::mt19937_64& rng, std::size_t max_deg) {
  std::uniform_int_distribution<std::size_t> deg(0, max_deg);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> c(deg(rng) + 1);
  for (auto& a : c) a = {u(rng), u(rng)};
  return PowerSeries(c);
}

std::vector<cplx> annulus_grid(double rmin, double rmax, int nr, int nt) {
  std::vector<cplx> g;
  for (int i = 0; i < nr; ++i) {
    double r = rmin + (rmax - rmin) * i / (nr - 1);
    for (int j = 0; j < nt; ++j) g.push_back(r * unit(two_pi * (j + 0.5 * (i % 2)) / nt));
  }
  return g;
}

}  // namespace

TEST_CASE("power series normalization") {
  PowerSeries f{1.0, 2.0, 0.0, 0.0};
  CHECK(f.degree() == 1);
  CHECK(PowerSeries{0.0, 0.0}.degree() == 0);
  CHECK(PowerSeries{0.0}.is_zero());
  // Exact-zero trimming only: tiny trailing coefficients stay.
  CHECK(PowerSeries{1.0, 1e-300}.degree() == 1);
}

TEST_CASE("partial sums") {
  PowerSeries f{1.0, 2.0, 3.0};
  CHECK(partial_sum(f, 1) == PowerSeries{1.0, 2.0});
  CHECK(partial_sum(f, 7) == f);
  PowerSeries ones{1.0, 1.0, 1.0, 1.0};
  CHECK(std::abs(partial_sum(ones, 3)(-1.0)) == 0.0);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    auto g = random_poly(rng, 30);
    for (std::size_t m : {0, 3, 10, 40})
      for (std::size_t n : {0, 5, 12, 35}) CHECK(partial_sum(partial_sum(g, n), m) == partial_sum(g, std::min(m, n)));
  }
}

TEST_CASE("backward shift") {
  CHECK(backward_shift(PowerSeries{1.0, 2.0, 3.0}) == PowerSeries{2.0, 3.0});
  CHECK(backward_shift(PowerSeries{5.0}).is_zero());

  const cplx alpha{0.3, -0.4};
  auto g = geometric_series(alpha, 30);
  auto tg = backward_shift(g);
  REQUIRE(tg.degree() == 29);
  for (std::size_t k = 0; k < 30; ++k) CHECK(std::abs(tg[k] - alpha * g[k]) <= 1e-15 * std::abs(g[k]));

  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    auto f = random_poly(rng, 20), h = random_poly(rng, 20);
    cplx a{1.5, -2.0}, b{0.25, 3.0};
    auto lhs = backward_shift(a * f + b * h);
    auto rhs = a * backward_shift(f) + b * backward_shift(h);
    for (std::size_t k = 0; k <= std::max(lhs.degree(), rhs.degree()); ++k) CHECK(lhs[k] == rhs[k]);
    CHECK(backward_shift(f, f.degree() + 1).is_zero());
    CHECK(backward_shift(forward_shift(f)) == f);
  }
}

TEST_CASE("shift iterate identity") {
  std::mt19937_64 rng(2024);
  auto grid = annulus_grid(0.1, 2.0, 12, 40);
  for (int t = 0; t < 200; ++t) {
    auto f = random_poly(rng, 50);
    double fmax = 0.0;
    for (cplx z : grid) fmax = std::max(fmax, std::abs(f(z)));
    for (std::size_t n : {0, 1, 7, 25, 49, 60}) CHECK(shift_iterate_residual(f, n, grid) <= 1e-10 * (1.0 + fmax));
  }

  auto f = geometric_series(0.5, 40);
  std::vector<cplx> ring;
  for (int j = 0; j < 64; ++j) ring.push_back(1.5 * unit(two_pi * j / 64));
  double fmax = 0.0;
  for (cplx z : ring) fmax = std::max(fmax, std::abs(f(z)));
  CHECK(shift_iterate_residual(f, 10, ring) <= 1e-10 * (1.0 + fmax));
  CHECK(shift_iterate_residual(f, 40, ring) == 0.0);

  std::vector<cplx> bad{0.5, 0.0};
  CHECK_THROWS_AS(shift_iterate_residual(f, 2, bad), InvalidInput);
}

TEST_CASE("cesaro means") {
  // Grandi series at z = -1: partial sums alternate 1, 0.
  auto grandi = PowerSeries(std::vector<cplx>(2001, 1.0));
  CHECK(std::abs(cesaro_mean(grandi, 2000, -1.0) - 0.5) <= 1e-3);
  // Direct oracle: average the explicitly alternating partial sums.
  double direct = 0.0;
  for (int k = 0; k <= 2000; ++k) direct += (k % 2 == 0) ? 1.0 : 0.0;
  CHECK(std::abs(cesaro_mean(grandi, 2000, -1.0) - direct / 2001.0) <= 1e-12);

  auto c = PowerSeries::constant({2.0, -1.0});
  for (std::size_t n : {0, 1, 9}) CHECK(std::abs(cesaro_mean(c, n, {0.3, 0.7}) - cplx{2.0, -1.0}) <= 1e-15);
  PowerSeries f{3.0, 1.0, 1.0};
  CHECK(cesaro_mean(f, 0, 0.9) == cplx{3.0});

  TrigPolynomial t({1.0, 0.0, 2.0, 0.0, 1.0}, -2);
  // Sections: s0 = 2, s1 = 2, s2 = 2 + z^2 + z^-2; at z = i, s2 = 0.
  CHECK(std::abs(cesaro_mean(t, 2, I) - cplx{4.0 / 3.0}) <= 1e-14);
}

TEST_CASE("cesaro regularity on convergent series") {
  // a_k = 0.5^k at z = 0.9 e^{i}: partial sums converge geometrically.
  std::vector<cplx> c(200);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::pow(0.5, static_cast<double>(k));
  PowerSeries f(c);
  cplx z = 0.9 * unit(1.0);
  cplx limit = 1.0 / (1.0 - 0.5 * z);
  // Convergence check over the last 100 indices.
  cplx s{0.0}, zk{1.0};
  std::vector<cplx> partials;
  for (std::size_t k = 0; k < c.size(); ++k, zk *= z) partials.push_back(s += c[k] * zk);
  double spread = 0.0;
  for (std::size_t k = partials.size() - 100; k < partials.size(); ++k)
    spread = std::max(spread, std::abs(partials[k] - partials.back()));
  REQUIRE(spread <= 1e-8);
  // The Cesaro error decays like sum_k |s_k - s| / (n + 1); sections past
  // the degree repeat f, so a long run reaches the 1e-6 band.
  CHECK(std::abs(cesaro_mean(f, 3000000, z) - limit) <= 1e-6);
}

TEST_CASE("trig polynomial") {
  TrigPolynomial t({2.0, 0.0, 1.0, 3.0}, -1);
  cplx z = unit(0.7);
  CHECK(std::abs(t(z) - (2.0 / z + 1.0 * z + 3.0 * z * z)) <= 1e-14);
  CHECK_FALSE(t.is_analytic());
  CHECK_THROWS_AS(t.to_power_series(), InvalidInput);
  TrigPolynomial a({0.0, 1.0, 2.0}, -1);
  CHECK(a.to_power_series() == PowerSeries{1.0, 2.0});
  auto sec = partial_sum(t, 1);
  CHECK(sec.min_index() == -1);
  CHECK(sec.max_index() == 1);
}

TEST_CASE("max modulus and B_s norm") {
  for (std::size_t k : {0, 1, 5, 20})
    for (double r : {0.0, 0.3, 0.9}) CHECK(max_modulus(PowerSeries::monomial(k), r) == Approx(std::pow(r, k)).margin(1e-15));
  CHECK(b_s_norm(PowerSeries{1.0}, 0.5) == Approx(1.0));
  // z^k (1-r)^s peaks at r = k/(k+s).
  double k = 4, s = 1.0, r = k / (k + s);
  CHECK(b_s_norm(PowerSeries::monomial(4), s) == Approx(std::pow(r, k) * std::pow(1 - r, s)).epsilon(1e-9));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto f = random_poly(rng, 15);
    double prev = 0.0;
    for (double rr = 0.0; rr < 0.99; rr += 0.07) {
      double m = max_modulus(f, rr);
      CHECK(m >= prev * (1 - 1e-12));
      prev = m;
    }
  }
  CHECK_THROWS_AS(max_modulus(PowerSeries{1.0}, 1.0), InvalidInput);
}

TEST_CASE("coefficient growth profile") {
  std::vector<cplx> c(30);
  for (std::size_t n = 1; n < c.size(); ++n) c[n] = std::sqrt(static_cast<double>(n));
  for (double v : coeff_growth_profile(PowerSeries(c), 2.0)) CHECK(v == Approx(1.0));

  auto prof = coeff_growth_profile(geometric_series(1.0, 40), 2.0);
  for (std::size_t i = 1; i < prof.size(); ++i) CHECK(prof[i] < prof[i - 1]);

  // (1 - z)^{-1.4}: a_n = Gamma(n + 1.4) / (Gamma(1.4) n!).
  std::vector<cplx> b(50);
  b[0] = 1.0;
  for (std::size_t n = 1; n < b.size(); ++n) b[n] = b[n - 1] * (n - 1 + 1.4) / static_cast<double>(n);
  auto p = coeff_growth_profile(PowerSeries(b), 1.0);
  for (std::size_t n = 1; n < b.size(); ++n) {
    double oracle = std::exp(std::lgamma(n + 1.4) - std::lgamma(1.4) - std::lgamma(n + 1.0)) / n;
    CHECK(p[n - 1] == Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("gauss legendre") {
  const auto& g = gauss_legendre(12);
  double s = 0.0;
  for (double w : g.weights) s += w;
  CHECK(s == Approx(2.0).epsilon(1e-14));
  // Exact for degree 23.
  CHECK(gauss_integrate([](double x) { return std::pow(x, 22); }, -1.0, 1.0, 12) == Approx(2.0 / 23).epsilon(1e-13));
  CHECK(gauss_integrate([](double x) { return x * x; }, 0.0, 3.0, 1) == Approx(6.75));
  double err = 0.0;
  double v = adaptive_gauss([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12, &err);
  CHECK(v == Approx(2.0 / 3.0).epsilon(1e-11));
}
