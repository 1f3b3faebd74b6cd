#pragma once

// Common vocabulary for the shiftlab headers: complex scalar, error types and
// a deterministic parallel map used by the quadrature and sweep code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace shiftlab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Largest degree any construction is allowed to produce unless a caller
// raises it explicitly.
inline constexpr std::size_t default_degree_cap = 4096;

/// Thrown when an operation's precondition is violated by its inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot reach its requested tolerance.
/// Carries the achieved and requested values so callers can report both.
class ToleranceFailure : public std::runtime_error {
 public:
  ToleranceFailure(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}

  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

/// Point on the unit circle at angle theta, with the angle reduced first so
/// that large multiples keep full relative precision in the trig calls.
inline cplx unit(double theta) { return std::polar(1.0, std::remainder(theta, two_pi)); }

/// Maps an angle into [0, 2*pi).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, two_pi);
  if (t < 0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

/// Pairwise summation in index order. The tree shape depends only on the
/// length, so the result is independent of how the terms were produced.
template <class T>
T pairwise_sum(const T* data, std::size_t n) {
  if (n == 0) return T{};
  if (n <= 8) {
    T s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(data, h) + pairwise_sum(data + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

/// Worker threads used by the quadrature and sweep loops. Set once by the
/// coordinating program before any computation; results do not depend on it.
inline unsigned& worker_count() {
  static unsigned w = 1;
  return w;
}

/// Evaluates fn(i) for i in [0, n) into out[i]. Work is split into
/// contiguous chunks over `workers` threads; each slot is written by exactly
/// one thread, so the output does not depend on the worker count.
template <class T, class Fn>
void parallel_map(std::size_t n, std::vector<T>& out, Fn&& fn, unsigned workers = worker_count()) {
  out.resize(n);
  if (workers <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n / 512 + 1));
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace shiftlab
