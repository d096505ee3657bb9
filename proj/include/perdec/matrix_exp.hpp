#pragma once

#include <cmath>

#include "perdec/linalg.hpp"

namespace perdec {

namespace detail {

// Pade approximants for expm, diagonal orders 3/5/7/9/13 with the classic
// scaling thresholds on the 1-norm.
inline void expm_pade3(const Matrix& a, Matrix& u, Matrix& v) {
  const double b[] = {120., 60., 12., 1.};
  const Index n = a.rows();
  const Matrix a2 = a * a;
  u.noalias() = a * (b[3] * a2 + b[1] * Matrix::Identity(n, n));
  v = b[2] * a2 + b[0] * Matrix::Identity(n, n);
}

inline void expm_pade5(const Matrix& a, Matrix& u, Matrix& v) {
  const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  const Index n = a.rows();
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  u.noalias() = a * (b[5] * a4 + b[3] * a2 + b[1] * Matrix::Identity(n, n));
  v = b[4] * a4 + b[2] * a2 + b[0] * Matrix::Identity(n, n);
}

inline void expm_pade7(const Matrix& a, Matrix& u, Matrix& v) {
  const double b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  const Index n = a.rows();
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  u.noalias() =
      a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * Matrix::Identity(n, n));
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * Matrix::Identity(n, n);
}

inline void expm_pade9(const Matrix& a, Matrix& u, Matrix& v) {
  const double b[] = {17643225600., 8821612800., 2075673600., 302702400.,
                      30270240.,    2162160.,    110880.,     3960.,
                      90.,          1.};
  const Index n = a.rows();
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix a8 = a6 * a2;
  u.noalias() = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 +
                     b[1] * Matrix::Identity(n, n));
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 +
      b[0] * Matrix::Identity(n, n);
}

inline void expm_pade13(const Matrix& a, Matrix& u, Matrix& v) {
  const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                      1187353796428800.,  129060195264000.,   10559470521600.,
                      670442572800.,      33522128640.,       1323241920.,
                      40840800.,          960960.,            16380.,
                      182.,               1.};
  const Index n = a.rows();
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  v = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix tmp = a6 * v;
  tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * Matrix::Identity(n, n);
  u.noalias() = a * tmp;
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v.noalias() = a6 * tmp;
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * Matrix::Identity(n, n);
}

}  // namespace detail

/// exp(t*A) by Pade approximation with scaling and squaring.
/// Relative accuracy is a modest multiple of machine epsilon for the norm
/// ranges this library works at (the documented exp_tol is 1e-13).
inline constexpr double kExpTol = 1e-13;

template <typename Derived>
Matrix matrix_exp(const Eigen::MatrixBase<Derived>& expr, double t = 1.0) {
  Matrix a = expr.template cast<Complex>();
  require_square_finite(a, "matrix_exp");
  if (!std::isfinite(t)) throw InvalidInput("matrix_exp: non-finite time");
  a *= Complex(t, 0.0);

  const Index n = a.rows();
  const double eta = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  Matrix u(n, n), v(n, n);
  int squarings = 0;

  if (eta < 1.495585217958292e-2) {
    detail::expm_pade3(a, u, v);
  } else if (eta < 2.539398330063230e-1) {
    detail::expm_pade5(a, u, v);
  } else if (eta < 9.504178996162932e-1) {
    detail::expm_pade7(a, u, v);
  } else if (eta < 2.097847961257068) {
    detail::expm_pade9(a, u, v);
  } else {
    const double theta13 = 5.371920351148152;
    if (eta > theta13) {
      squarings = static_cast<int>(std::ceil(std::log2(eta / theta13)));
      if (squarings > 60)
        throw ScaleLimit("matrix_exp: ||tA|| too large for the scaling budget (1-norm " +
                         std::to_string(eta) + ")");
      a *= std::pow(2.0, -squarings);
    }
    detail::expm_pade13(a, u, v);
  }

  Matrix numer = u + v;
  Matrix denom = v - u;
  Matrix result = denom.partialPivLu().solve(numer);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// || exp(sA) exp(tA) - exp((s+t)A) ||, the semigroup-law defect.
template <typename Derived>
double semigroup_law_defect(const Eigen::MatrixBase<Derived>& a, double s, double t) {
  Matrix lhs = matrix_exp(a, s) * matrix_exp(a, t);
  return opnorm(lhs - matrix_exp(a, s + t));
}

}  // namespace perdec
