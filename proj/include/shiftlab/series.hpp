#pragma once

// Finite power series and trigonometric polynomials, Taylor sections, the
// backward shift, and a few growth / summability diagnostics.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "shiftlab/core.hpp"

namespace shiftlab {

/// Polynomial (or truncated Taylor series) a_0 + a_1 z + ... + a_d z^d.
///
/// Coefficients are stored densely. Trailing coefficients that are exactly
/// zero are trimmed on construction, keeping at least the constant term, so
/// degree() is the index of the last nonzero coefficient (or 0).
class PowerSeries {
 public:
  PowerSeries() : coeffs_{cplx{0.0}} {}
  PowerSeries(std::initializer_list<cplx> c) : coeffs_(c) { normalize(); }
  explicit PowerSeries(std::vector<cplx> c) : coeffs_(std::move(c)) { normalize(); }

  static PowerSeries constant(cplx c) { return PowerSeries(std::vector<cplx>{c}); }

  static PowerSeries monomial(std::size_t k, cplx c = 1.0) {
    std::vector<cplx> v(k + 1, cplx{0.0});
    v[k] = c;
    return PowerSeries(std::move(v));
  }

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  const std::vector<cplx>& coeff_vector() const { return coeffs_; }

  /// Coefficient a_k; zero beyond the degree.
  cplx operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : cplx{0.0}; }

  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == cplx{0.0}; }

  /// Horner evaluation.
  cplx operator()(cplx z) const {
    cplx acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
  }

  /// Multiplication by z^m.
  PowerSeries shifted_up(std::size_t m) const {
    if (is_zero()) return {};
    std::vector<cplx> v(m + coeffs_.size(), cplx{0.0});
    std::copy(coeffs_.begin(), coeffs_.end(), v.begin() + static_cast<std::ptrdiff_t>(m));
    return PowerSeries(std::move(v));
  }

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    std::vector<cplx> v(std::max(a.coeffs_.size(), b.coeffs_.size()), cplx{0.0});
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
    return PowerSeries(std::move(v));
  }
  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
    std::vector<cplx> v(std::max(a.coeffs_.size(), b.coeffs_.size()), cplx{0.0});
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] - b[k];
    return PowerSeries(std::move(v));
  }
  friend PowerSeries operator*(cplx s, const PowerSeries& a) {
    std::vector<cplx> v(a.coeffs_);
    for (auto& c : v) c *= s;
    return PowerSeries(std::move(v));
  }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    std::vector<cplx> v(a.coeffs_.size() + b.coeffs_.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return PowerSeries(std::move(v));
  }

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

 private:
  void normalize() {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == cplx{0.0}) coeffs_.pop_back();
  }

  std::vector<cplx> coeffs_;
};

/// Laurent polynomial sum_{k=min_index}^{max_index} a_k z^k, evaluated on the
/// unit circle (or any nonzero z). min_index is at most 0.
class TrigPolynomial {
 public:
  TrigPolynomial() : coeffs_{cplx{0.0}}, min_index_(0) {}
  TrigPolynomial(std::vector<cplx> c, long min_index) : coeffs_(std::move(c)), min_index_(min_index) {
    require(!coeffs_.empty(), "TrigPolynomial: empty coefficient list");
  }
  explicit TrigPolynomial(const PowerSeries& p) : coeffs_(p.coeff_vector()), min_index_(0) {}

  long min_index() const { return min_index_; }
  long max_index() const { return min_index_ + static_cast<long>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeff_vector() const { return coeffs_; }

  cplx coeff(long k) const {
    if (k < min_index_ || k > max_index()) return 0.0;
    return coeffs_[static_cast<std::size_t>(k - min_index_)];
  }

  cplx operator()(cplx z) const {
    require(z != cplx{0.0}, "TrigPolynomial: evaluation at z = 0");
    cplx acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc * std::pow(z, static_cast<double>(min_index_));
  }

  bool is_analytic() const {
    for (long k = min_index_; k < 0; ++k)
      if (coeff(k) != cplx{0.0}) return false;
    return true;
  }

  /// Drops the (vanishing) negative part. Throws if any negative-index
  /// coefficient is nonzero, since the conversion would then lose data.
  PowerSeries to_power_series() const {
    require(is_analytic(), "TrigPolynomial: negative-index coefficients are nonzero");
    std::vector<cplx> v;
    for (long k = 0; k <= max_index(); ++k) v.push_back(coeff(k));
    return PowerSeries(std::move(v));
  }

 private:
  std::vector<cplx> coeffs_;
  long min_index_;
};

/// s_n f: truncation to degree min(n, deg f).
inline PowerSeries partial_sum(const PowerSeries& f, std::size_t n) {
  if (n >= f.degree()) return f;
  auto c = f.coeffs();
  return PowerSeries(std::vector<cplx>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n + 1)));
}

/// Symmetric Fourier section sum_{|k| <= n} a_k z^k.
inline TrigPolynomial partial_sum(const TrigPolynomial& f, std::size_t n) {
  long lo = std::max(f.min_index(), -static_cast<long>(n));
  long hi = std::min(f.max_index(), static_cast<long>(n));
  if (lo > hi) return TrigPolynomial();
  std::vector<cplx> v;
  for (long k = lo; k <= hi; ++k) v.push_back(f.coeff(k));
  return TrigPolynomial(std::move(v), lo);
}

/// Taylor backward shift: (a_0, a_1, a_2, ...) -> (a_1, a_2, ...).
inline PowerSeries backward_shift(const PowerSeries& f) {
  if (f.degree() == 0) return {};
  auto c = f.coeffs();
  return PowerSeries(std::vector<cplx>(c.begin() + 1, c.end()));
}

/// T^n f, i.e. the coefficient sequence shifted left by n.
inline PowerSeries backward_shift(const PowerSeries& f, std::size_t n) {
  if (n > f.degree()) return {};
  auto c = f.coeffs();
  return PowerSeries(std::vector<cplx>(c.begin() + static_cast<std::ptrdiff_t>(n), c.end()));
}

/// Multiplication by z, the right inverse of the backward shift.
inline PowerSeries forward_shift(const PowerSeries& f, std::size_t n = 1) { return f.shifted_up(n); }

/// max over the grid of |T^{n+1} f(z) - (f(z) - s_n f(z)) / z^{n+1}|.
/// Both sides are evaluated independently: the left from the shifted
/// coefficients, the right from f and its section. The difference f - s_n f
/// is formed on coefficients (exact) before evaluation; subtracting the two
/// values instead cancels catastrophically once |z|^{n+1} is tiny.
inline double shift_iterate_residual(const PowerSeries& f, std::size_t n, std::span<const cplx> grid) {
  const PowerSeries lhs = backward_shift(f, n + 1);
  const PowerSeries tail = f - partial_sum(f, n);
  double worst = 0.0;
  for (cplx z : grid) {
    require(z != cplx{0.0}, "shift_iterate_residual: grid contains z = 0");
    cplx rhs = tail(z) / std::pow(z, static_cast<double>(n + 1));
    worst = std::max(worst, std::abs(lhs(z) - rhs));
  }
  return worst;
}

namespace detail {
template <class Term>
cplx cesaro_from_terms(std::size_t n, Term&& term) {
  cplx partial{0.0};
  cplx acc{0.0};
  for (std::size_t k = 0; k <= n; ++k) {
    partial += term(k);
    acc += partial;
  }
  return acc / static_cast<double>(n + 1);
}
}  // namespace detail

/// (1/(n+1)) * sum_{k=0}^{n} s_k f(z).
inline cplx cesaro_mean(const PowerSeries& f, std::size_t n, cplx z) {
  cplx zk{1.0};
  return detail::cesaro_from_terms(n, [&](std::size_t k) {
    if (k > 0) zk *= z;
    return f[k] * zk;
  });
}

/// Cesaro mean of the symmetric sections of a trigonometric polynomial.
inline cplx cesaro_mean(const TrigPolynomial& f, std::size_t n, cplx z) {
  require(z != cplx{0.0}, "cesaro_mean: z = 0 for a trigonometric polynomial");
  cplx zk{1.0}, zmk{1.0};
  const cplx zinv = 1.0 / z;
  return detail::cesaro_from_terms(n, [&](std::size_t k) {
    if (k == 0) return f.coeff(0);
    zk *= z;
    zmk *= zinv;
    long kk = static_cast<long>(k);
    return f.coeff(kk) * zk + f.coeff(-kk) * zmk;
  });
}

namespace detail {

// Golden-section maximisation of a unimodal-near-the-peak function on [a, b].
template <class Fn>
std::pair<double, double> golden_max(Fn&& fn, double a, double b, int iters = 80) {
  constexpr double g = 0.6180339887498949;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int i = 0; i < iters && (b - a) > 1e-15; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = fn(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = fn(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// f(r e^{2 pi i j / n}) for j < n by one FFT; coefficients beyond n fold
// onto their residue class, so the samples are exact for any degree.
inline std::vector<cplx> circle_samples(const PowerSeries& f, double r, std::size_t n) {
  std::vector<cplx> b(n, cplx{0.0});
  double rk = 1.0;
  for (std::size_t k = 0; k < f.coeffs().size(); ++k, rk *= r) b[k % n] += f[k] * rk;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> out;
  fft.inv(out, b);
  return out;
}

// Samples max over |z| = r on a grid that doubles until the (polished)
// maximum moves by less than rel_tol. Allows r = 1.
inline double max_on_circle(const PowerSeries& f, double r, double rel_tol = 1e-9) {
  if (f.degree() == 0) return std::abs(f[0]);
  auto mod = [&](double t) { return std::abs(f(r * unit(t))); };
  std::size_t n = std::bit_ceil(8 * (f.degree() + 1));
  double prev = -1.0;
  for (int round = 0; round < 20; ++round, n *= 2) {
    auto v = circle_samples(f, r, n);
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(v[i]) > best) best = std::abs(v[i]), arg = i;
    double h = two_pi / static_cast<double>(n);
    double t0 = two_pi * static_cast<double>(arg) / static_cast<double>(n);
    best = std::max(best, golden_max(mod, t0 - h, t0 + h).second);
    if (prev >= 0.0 && std::abs(best - prev) <= rel_tol * std::max(best, 1e-300)) return best;
    prev = best;
  }
  return prev;
}

}  // namespace detail

/// M(r, f) = max_{|z| <= r} |f(z)|, sampled on |z| = r (maximum principle).
inline double max_modulus(const PowerSeries& f, double r) {
  require(r >= 0.0 && r < 1.0, "max_modulus: r must lie in [0, 1)");
  return detail::max_on_circle(f, r);
}

/// ||f||_{B_s} = max_{0 <= r < 1} M(r, f) (1 - r)^s, on an r-grid that
/// doubles until the polished maximum is stable to 1e-9.
inline double b_s_norm(const PowerSeries& f, double s) {
  require(s > 0.0, "b_s_norm: s must be positive");
  auto phi = [&](double r) {
    r = std::clamp(r, 0.0, 1.0 - 1e-15);
    return detail::max_on_circle(f, r) * std::pow(1.0 - r, s);
  };
  std::size_t k = 64;
  double prev = -1.0;
  for (int round = 0; round < 12; ++round, k *= 2) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double v = phi(static_cast<double>(i) / static_cast<double>(k));
      if (v > best) best = v, arg = i;
    }
    double h = 1.0 / static_cast<double>(k);
    double r0 = static_cast<double>(arg) * h;
    best = std::max(best, detail::golden_max(phi, std::max(0.0, r0 - h), std::min(1.0, r0 + h), 60).second);
    if (prev >= 0.0 && std::abs(best - prev) <= 1e-9 * std::max(best, 1e-300)) return best;
    prev = best;
  }
  return prev;
}

/// |a_n| / n^{1/p} for n = 1..deg f (index 0 of the result is n = 1).
inline std::vector<double> coeff_growth_profile(const PowerSeries& f, double p) {
  require(p >= 1.0, "coeff_growth_profile: p must be >= 1");
  std::vector<double> out;
  for (std::size_t n = 1; n <= f.degree(); ++n)
    out.push_back(std::abs(f[n]) / std::pow(static_cast<double>(n), 1.0 / p));
  return out;
}

/// Degree-d truncation of the geometric series 1 / (1 - alpha z).
inline PowerSeries geometric_series(cplx alpha, std::size_t d) {
  std::vector<cplx> v(d + 1);
  cplx a{1.0};
  for (std::size_t k = 0; k <= d; ++k, a *= alpha) v[k] = a;
  return PowerSeries(std::move(v));
}

}  // namespace shiftlab
