#pragma once

#include <optional>
#include <vector>

#include "perdec/spectrum.hpp"

namespace perdec {

/// Finite-dimensional power-boundedness criterion: spectral radius at most 1
/// and semisimple spectrum on the peripheral circle |lambda| = r(T).
struct PowerBoundVerdict {
  bool bounded = false;
  double spectral_radius = 0.0;
  int peripheral_defect = 0;   // sum of (algebraic - geometric) on |l| = r(T)
  double empirical_bound = 0.0;  // max ||T^N|| over N in {1,2,4,...,1024}
};

template <typename Derived>
PowerBoundVerdict power_bounded_verdict(const Eigen::MatrixBase<Derived>& expr,
                                        double cluster_tol = -1.0) {
  Matrix t = expr.template cast<Complex>();
  require_square_finite(t, "power_bounded_verdict");
  SpectrumReport rep = spectrum(t, cluster_tol);

  PowerBoundVerdict v;
  v.spectral_radius = rep.spectral_radius();
  for (const auto& c : rep.clusters)
    if (std::abs(std::abs(c.value) - v.spectral_radius) <= rep.cluster_tol)
      v.peripheral_defect += c.algebraic - c.geometric;
  v.bounded = v.spectral_radius <= 1.0 + rep.cluster_tol && v.peripheral_defect == 0;

  Matrix p = t;  // powers T^(2^k), k = 0..10
  v.empirical_bound = opnorm(p);
  for (int k = 1; k <= 10; ++k) {
    p = p * p;
    if (!p.allFinite()) {
      v.empirical_bound = std::numeric_limits<double>::infinity();
      break;
    }
    v.empirical_bound = std::max(v.empirical_bound, opnorm(p));
  }
  return v;
}

struct ProjectionMethod {
  enum class Kind { algebraic, cesaro };
  Kind kind = Kind::algebraic;
  long cesaro_n = 4096;
  double divergence_threshold = 1e-6;

  static ProjectionMethod algebraic() { return {}; }
  static ProjectionMethod cesaro(long n, double threshold = 1e-6) {
    ProjectionMethod m;
    m.kind = Kind::cesaro;
    m.cesaro_n = n;
    m.divergence_threshold = threshold;
    return m;
  }
};

inline double default_proj_tol(double op_norm) { return 1e-9 * (1.0 + op_norm); }

struct ProjectionReport {
  Matrix P;
  double idempotency_defect = 0.0;   // ||P^2 - P||
  double zero_element_defect = 0.0;  // max(||PT - P||, ||TP - P||)
  Subspace range;
  ProjectionMethod::Kind method = ProjectionMethod::Kind::algebraic;
  double tol = 0.0;                 // accuracy bound the invariants hold at
  double cesaro_certificate = 0.0;  // ||A_N - A_2N|| (zero for algebraic)
  long cesaro_n = 0;
};

/// Plain Cesaro average A_N = (1/N) sum_{k<N} T^k, fixed summation order.
template <typename Derived>
Matrix cesaro_average(const Eigen::MatrixBase<Derived>& expr, long n) {
  Matrix t = expr.template cast<Complex>();
  require_square_finite(t, "cesaro_average");
  if (n < 1) throw InvalidInput("cesaro_average: N must be positive");
  Matrix acc = Matrix::Identity(t.rows(), t.cols());
  Matrix pow = Matrix::Identity(t.rows(), t.cols());
  for (long k = 1; k < n; ++k) {
    pow = pow * t;
    if (!pow.allFinite() || pow.cwiseAbs().maxCoeff() > 1e12)
      throw DivergenceError("cesaro_average: iterates blow up at k=" +
                            std::to_string(k));
    acc += pow;
  }
  return acc / static_cast<double>(n);
}

namespace detail {

/// Range basis of an (approximate) idempotent. Nonzero singular values of a
/// projection are >= 1, so the absolute cut at 1/2 is unambiguous.
inline Subspace projection_range(const Matrix& p) {
  Subspace s;
  s.ambient_dim = p.rows();
  s.tol = default_rank_tol(p.rows());
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 0.5) ++rank;
  s.basis = svd.matrixU().leftCols(rank);
  return s;
}

}  // namespace detail

/// Mean ergodic projection of the cyclic semigroup {T^k}.
///
/// algebraic: projects onto ker(T-I) along ran(T-I) from one SVD of T-I;
/// throws SplittingNotDirect when the two do not span (1 not semisimple).
/// cesaro:    A_N with convergence certificate ||A_N - A_2N||; throws
/// DivergenceError past the method's threshold. The Cesaro rate is O(1/N),
/// so the report's accuracy bound scales with the certificate.
template <typename Derived>
ProjectionReport mean_ergodic_projection(
    const Eigen::MatrixBase<Derived>& expr,
    ProjectionMethod method = ProjectionMethod::algebraic(),
    double rank_tol = -1.0) {
  Matrix t = expr.template cast<Complex>();
  require_square_finite(t, "mean_ergodic_projection");
  const Index n = t.rows();
  const double tnorm = opnorm(t);
  const double rtol = rank_tol < 0 ? default_rank_tol(n) : rank_tol;

  ProjectionReport rep;
  rep.method = method.kind;

  if (method.kind == ProjectionMethod::Kind::algebraic) {
    Matrix shifted = t - Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Fixed-space cut at operator scale: ||(T - I)v|| <= tau * ||v|| means
    // v is fixed up to noise. sigma_max(T - I) is the wrong scale when T
    // is near the identity.
    const double tau = rtol * (1.0 + tnorm);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tau) ++rank;

    Matrix splitting(n, n);  // [kernel basis | range basis]
    const Index k = n - rank;
    splitting.leftCols(k) = svd.matrixV().rightCols(k);
    splitting.rightCols(rank) = svd.matrixU().leftCols(rank);

    Eigen::JacobiSVD<Matrix> wsvd(splitting);
    const auto& wsv = wsvd.singularValues();
    if (wsv(n - 1) <= 100.0 * default_rank_tol(n) * wsv(0))
      throw SplittingNotDirect(
          "mean_ergodic_projection: ker(T-I) and ran(T-I) do not split the "
          "space; T is not power-bounded");

    // P = W diag(I_k, 0) W^{-1}
    Matrix winv = splitting.partialPivLu().solve(Matrix::Identity(n, n));
    rep.P = splitting.leftCols(k) * winv.topRows(k);
    rep.range.ambient_dim = n;
    rep.range.basis = splitting.leftCols(k);
    rep.range.tol = std::max(default_rank_tol(n), 0.0);
    rep.tol = default_proj_tol(tnorm);
  } else {
    const long big_n = method.cesaro_n;
    Matrix a_n = cesaro_average(t, big_n);
    Matrix a_2n = cesaro_average(t, 2 * big_n);
    rep.cesaro_certificate = opnorm(a_n - a_2n);
    rep.cesaro_n = big_n;
    if (rep.cesaro_certificate > method.divergence_threshold)
      throw DivergenceError("mean_ergodic_projection: Cesaro certificate " +
                            std::to_string(rep.cesaro_certificate) +
                            " exceeds threshold " +
                            std::to_string(method.divergence_threshold));
    rep.P = a_2n;
    rep.range = detail::projection_range(rep.P);
    rep.tol = std::max(default_proj_tol(tnorm), 100.0 * rep.cesaro_certificate);
  }

  rep.idempotency_defect = opnorm(rep.P * rep.P - rep.P);
  rep.zero_element_defect =
      std::max(opnorm(rep.P * t - rep.P), opnorm(t * rep.P - rep.P));
  return rep;
}

struct ZeroElementReport {
  double defect = 0.0;
  bool pass = false;
};

/// max over the family of max(||PT - P||, ||TP - P||); the zero-element
/// property of a mean ergodic projection.
inline ZeroElementReport zero_element_check(const Matrix& p,
                                            const std::vector<Matrix>& family,
                                            double tol) {
  ZeroElementReport rep;
  for (const auto& t : family) {
    if (t.rows() != p.rows() || t.cols() != p.cols())
      throw InvalidInput("zero_element_check: dimension mismatch");
    rep.defect = std::max(rep.defect, opnorm(p * t - p));
    rep.defect = std::max(rep.defect, opnorm(t * p - p));
  }
  rep.pass = rep.defect <= tol;
  return rep;
}

struct KernelCollapseReport {
  Index dim_ker_pow = 0;
  Index dim_ker = 0;
  bool collapsed = false;
};

/// Compares ker((T-I)^n) with ker(T-I): equal for power-bounded T.
template <typename Derived>
KernelCollapseReport kernel_power_collapse(const Eigen::MatrixBase<Derived>& expr,
                                           int n, double tol) {
  Matrix t = expr.template cast<Complex>();
  require_square_finite(t, "kernel_power_collapse");
  if (n < 1) throw InvalidInput("kernel_power_collapse: n must be >= 1");

  Matrix shifted = t - Matrix::Identity(t.rows(), t.cols());
  Matrix power = Matrix::Identity(t.rows(), t.cols());
  for (int i = 0; i < n; ++i) power = power * shifted;

  Subspace ker1 = kernel_basis(shifted);
  Subspace kern = kernel_basis(power);

  KernelCollapseReport rep;
  rep.dim_ker = ker1.dim();
  rep.dim_ker_pow = kern.dim();
  rep.collapsed =
      rep.dim_ker == rep.dim_ker_pow && subspace_distance(ker1, kern) <= tol;
  return rep;
}

struct JdlgSplit {
  Subspace reversible;  // span of eigenvectors with |lambda| = 1
  Subspace stable;      // generalized eigenvectors with |lambda| < 1
  double kappa = 1.0;   // conditioning of the combined splitting basis
};

/// The finite-dimensional Jacobs-de Leeuw-Glicksberg split of a
/// power-bounded operator: reversible (unimodular, semisimple) part plus a
/// stable part on which iterates decay.
template <typename Derived>
JdlgSplit jdlg_split(const Eigen::MatrixBase<Derived>& expr) {
  Matrix t = expr.template cast<Complex>();
  require_square_finite(t, "jdlg_split");
  const Index n = t.rows();

  PowerBoundVerdict verdict = power_bounded_verdict(t);
  if (!verdict.bounded)
    throw HypothesisViolation(
        "jdlg_split: operator is not power-bounded (radius " +
        std::to_string(verdict.spectral_radius) + ", peripheral defect " +
        std::to_string(verdict.peripheral_defect) + ")");

  SpectrumReport rep = spectrum(t);
  // Sum of the spectral projections at the unimodular eigenvalues; each one
  // is the algebraic mean ergodic projection of conj(lambda) * T.
  Matrix p_rev = Matrix::Zero(n, n);
  for (const auto& c : rep.clusters) {
    if (std::abs(std::abs(c.value) - 1.0) > rep.cluster_tol) continue;
    Complex unimodular = c.value / std::abs(c.value);
    ProjectionReport proj = mean_ergodic_projection(std::conj(unimodular) * t);
    p_rev += proj.P;
  }

  JdlgSplit split;
  split.reversible = detail::projection_range(p_rev);
  split.stable = detail::projection_range(Matrix::Identity(n, n) - p_rev);

  Matrix combined(n, split.reversible.dim() + split.stable.dim());
  combined.leftCols(split.reversible.dim()) = split.reversible.basis;
  combined.rightCols(split.stable.dim()) = split.stable.basis;
  if (combined.cols() != n)
    throw NumericalFailure("jdlg_split: split dimensions do not sum to dim");
  Eigen::JacobiSVD<Matrix> svd(combined);
  split.kappa = svd.singularValues()(0) / svd.singularValues()(n - 1);
  return split;
}

}  // namespace perdec
