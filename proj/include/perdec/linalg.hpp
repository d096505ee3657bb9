#pragma once

#include <algorithm>
#include <vector>

#include "perdec/errors.hpp"
#include "perdec/types.hpp"

namespace perdec {

/// Default relative rank tolerance: singular values below
/// dim * eps * sigma_max are treated as zero.
inline double default_rank_tol(Index dim) {
  return static_cast<double>(dim) * machine_eps();
}

/// Operator 2-norm (largest singular value). Accepts any dense expression.
template <typename Derived>
double opnorm(const Eigen::MatrixBase<Derived>& expr) {
  Matrix m = expr.template cast<Complex>();
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (m.rows() != m.cols())
    throw InvalidInput(std::string(who) + ": matrix must be square");
  if (!m.allFinite())
    throw InvalidInput(std::string(who) + ": non-finite entries");
}

/// A subspace of C^n held as an orthonormal column basis.
struct Subspace {
  Index ambient_dim = 0;
  Matrix basis;  // ambient_dim x k, orthonormal columns
  double tol = 0.0;

  Index dim() const { return basis.cols(); }

  /// || B^H B - I ||_2; the class invariant keeps this below 10*tol.
  double orthonormality_defect() const {
    if (dim() == 0) return 0.0;
    Matrix g = basis.adjoint() * basis;
    g -= Matrix::Identity(dim(), dim());
    return opnorm(g);
  }

  /// Orthogonal projector onto the subspace.
  Matrix projector() const {
    if (dim() == 0) return Matrix::Zero(ambient_dim, ambient_dim);
    return basis * basis.adjoint();
  }
};

/// Orthonormal basis of the numerical null space of a square matrix.
/// Singular values <= tol * sigma_max count as zero; tol < 0 selects the
/// default dim*eps.
template <typename Derived>
Subspace kernel_basis(const Eigen::MatrixBase<Derived>& expr, double tol = -1.0) {
  Matrix m = expr.template cast<Complex>();
  require_square_finite(m, "kernel_basis");
  const Index n = m.rows();
  const double rel = tol < 0 ? default_rank_tol(n) : tol;

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * smax) ++rank;

  Subspace s;
  s.ambient_dim = n;
  s.basis = svd.matrixV().rightCols(n - rank);
  s.tol = std::max(rel, default_rank_tol(n));
  return s;
}

/// Null space with an absolute singular-value threshold. Used where the
/// relevant zero scale is not sigma_max(M) itself (fixed spaces of T are
/// kernels of T - I, whose scale is ||T||, degenerate when T is close to I).
template <typename Derived>
Subspace kernel_basis_abs(const Eigen::MatrixBase<Derived>& expr, double abs_tol) {
  Matrix m = expr.template cast<Complex>();
  require_square_finite(m, "kernel_basis_abs");
  const Index n = m.rows();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > abs_tol) ++rank;
  Subspace s;
  s.ambient_dim = n;
  s.basis = svd.matrixV().rightCols(n - rank);
  s.tol = default_rank_tol(n);
  return s;
}

/// || M * basis ||_2, the null-space residual the kernel contract bounds by
/// dim * tol * sigma_max.
template <typename Derived>
double kernel_residual(const Eigen::MatrixBase<Derived>& m, const Subspace& s) {
  if (s.dim() == 0) return 0.0;
  return opnorm(m.template cast<Complex>() * s.basis);
}

/// Orthonormal basis of the column space of a (not necessarily square)
/// matrix, by the same singular value threshold rule as kernel_basis.
template <typename Derived>
Subspace range_basis(const Eigen::MatrixBase<Derived>& expr, double tol = -1.0) {
  Matrix m = expr.template cast<Complex>();
  if (!m.allFinite()) throw InvalidInput("range_basis: non-finite entries");
  const Index n = m.rows();
  const double rel = tol < 0 ? default_rank_tol(std::max(n, m.cols())) : tol;

  Subspace s;
  s.ambient_dim = n;
  s.tol = std::max(rel, default_rank_tol(std::max<Index>(n, 1)));
  if (m.cols() == 0) {
    s.basis = Matrix::Zero(n, 0);
    return s;
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * smax) ++rank;
  s.basis = svd.matrixU().leftCols(rank);
  return s;
}

/// Orthonormal basis of the (non-direct) sum of subspaces, via
/// rank-revealing orthogonalization of the concatenated bases.
inline Subspace subspace_sum(const std::vector<Subspace>& parts) {
  if (parts.empty()) throw InvalidInput("subspace_sum: empty part list");
  const Index n = parts.front().ambient_dim;
  Index total = 0;
  for (const auto& p : parts) {
    if (p.ambient_dim != n)
      throw InvalidInput("subspace_sum: mismatched ambient dimensions");
    total += p.dim();
  }
  Matrix concat(n, total);
  Index col = 0;
  for (const auto& p : parts) {
    concat.middleCols(col, p.dim()) = p.basis;
    col += p.dim();
  }
  Subspace s = range_basis(concat);
  s.ambient_dim = n;
  return s;
}

struct MembershipResult {
  bool member = false;
  double residual = 0.0;
};

/// Projection distance of x from S; membership is relative to ||x||, and the
/// zero vector belongs to every subspace.
inline MembershipResult subspace_membership(const Subspace& s, const Vector& x,
                                            double tol) {
  if (x.size() != s.ambient_dim)
    throw InvalidInput("subspace_membership: dimension mismatch");
  Vector r = x;
  if (s.dim() > 0) r -= s.basis * (s.basis.adjoint() * x);
  MembershipResult out;
  out.residual = r.norm();
  out.member = out.residual <= tol * x.norm();
  return out;
}

/// Distance between subspaces as the gap between orthogonal projectors.
inline double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("subspace_distance: mismatched ambient dimensions");
  return opnorm(a.projector() - b.projector());
}

}  // namespace perdec
