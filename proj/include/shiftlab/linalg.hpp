#pragma once

// Hermitian positive-definite solves with condition reporting (Eigen).

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "shiftlab/core.hpp"

namespace shiftlab {

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// Raised when a Gram system is too ill-conditioned to trust.
class IllConditioned : public ToleranceFailure {
 public:
  IllConditioned(const std::string& what, double cond, double limit) : ToleranceFailure(what, cond, limit) {}
  double condition() const noexcept { return achieved(); }
};

/// 2-norm condition number of a Hermitian positive semi-definite matrix
/// (infinite when the smallest eigenvalue is not positive).
inline double hermitian_condition(const CMatrix& G) {
  if (G.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return INFINITY;
  return hi / lo;
}

struct HermitianSolve {
  CVector x;
  double condition;
};

/// Solves G x = b for Hermitian positive-definite G by Cholesky, after
/// checking the condition number against `cond_limit`.
inline HermitianSolve solve_hermitian(const CMatrix& G, const CVector& b, double cond_limit, const std::string& who) {
  double cond = hermitian_condition(G);
  if (!(cond <= cond_limit))
    throw IllConditioned(who + ": Gram condition " + std::to_string(cond) +
                             " exceeds limit; raise the degree or separate the points",
                         cond, cond_limit);
  Eigen::LLT<CMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw IllConditioned(who + ": Cholesky factorization failed", cond, cond_limit);
  return {llt.solve(b), cond};
}

inline CVector to_eigen(const std::vector<cplx>& v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

inline std::vector<cplx> from_eigen(const CVector& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); }

}  // namespace shiftlab
