#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perdec/ergodic.hpp"

namespace perdec {

inline double default_comm_tol(double max_norm) {
  return 1e-10 * std::max(1.0, max_norm * max_norm);
}

inline constexpr double kDefaultDecompTol = 1e-8;

/// n commuting operators T_1..T_n on a common space. Construction measures
/// the commutation defect and rejects families above comm_tol.
struct OperatorFamily {
  Index dim = 0;
  std::vector<Matrix> ops;
  double commutation_defect = 0.0;
  double comm_tol = 0.0;

  Index size() const { return static_cast<Index>(ops.size()); }

  static OperatorFamily create(std::vector<Matrix> operators,
                               double comm_tol = -1.0) {
    if (operators.empty())
      throw InvalidInput("OperatorFamily: at least one operator required");
    OperatorFamily fam;
    fam.dim = operators.front().rows();
    double max_norm = 0.0;
    for (const auto& t : operators) {
      require_square_finite(t, "OperatorFamily");
      if (t.rows() != fam.dim)
        throw InvalidInput("OperatorFamily: operators must share one dimension");
      max_norm = std::max(max_norm, opnorm(t));
    }
    for (std::size_t i = 0; i < operators.size(); ++i)
      for (std::size_t j = i + 1; j < operators.size(); ++j)
        fam.commutation_defect =
            std::max(fam.commutation_defect,
                     opnorm(operators[i] * operators[j] - operators[j] * operators[i]));
    fam.comm_tol = comm_tol < 0 ? default_comm_tol(max_norm) : comm_tol;
    if (fam.commutation_defect > fam.comm_tol)
      throw InvalidInput("OperatorFamily: commutation defect " +
                         std::to_string(fam.commutation_defect) +
                         " exceeds tolerance " + std::to_string(fam.comm_tol));
    fam.ops = std::move(operators);
    return fam;
  }
};

/// A sign pattern epsilon in {0,1}^n from the inclusion-exclusion sums.
struct EpsilonMask {
  std::uint32_t bits = 0;
  int n = 0;

  int weight() const { return std::popcount(bits); }
  int last_set() const {
    return bits == 0 ? 0 : 32 - std::countl_zero(bits);  // 1-based index
  }
  bool test(int j) const { return (bits >> (j - 1)) & 1u; }  // j in 1..n
  double sign() const { return weight() % 2 == 0 ? 1.0 : -1.0; }
};

/// All masks with epsilon_j = 1 and epsilon_k = 0 for k > j (the paper's
/// grouping of the 2^n terms by their largest set index).
inline std::vector<EpsilonMask> masks_with_top_index(int n, int j) {
  std::vector<EpsilonMask> out;
  const std::uint32_t top = 1u << (j - 1);
  for (std::uint32_t r = 0; r < top; ++r)
    out.push_back(EpsilonMask{top | r, n});
  return out;
}

enum class DecompMethod { inclusion_exclusion, oracle };

inline const char* to_string(DecompMethod m) {
  return m == DecompMethod::inclusion_exclusion ? "inclusion_exclusion" : "oracle";
}

struct DecompositionResult {
  std::vector<Vector> components;
  double sum_residual = 0.0;
  std::vector<double> invariance_defects;  // ||(T_j - I) x_j||
  DecompMethod method = DecompMethod::inclusion_exclusion;
  bool accepted = false;
  double tol = 0.0;
  double input_norm = 0.0;
  // Certificate that x lies in ker (P_1 - I)...(P_n - I); absent for oracle.
  std::optional<double> projection_product_defect;
  std::optional<double> projection_commutation_defect;
};

/// ||(T_1 - I)(T_2 - I)...(T_n - I) x||, applying the rightmost factor first.
inline double difference_defect(const OperatorFamily& family, const Vector& x) {
  if (x.size() != family.dim)
    throw InvalidInput("difference_defect: vector dimension mismatch");
  Vector y = x;
  for (Index j = family.size(); j-- > 0;) y = family.ops[j] * y - y;
  return y.norm();
}

namespace detail {

inline void finalize_result(const OperatorFamily& family, const Vector& x,
                            double tol, DecompositionResult& res) {
  const Index n = family.size();
  Vector sum = Vector::Zero(family.dim);
  for (const auto& c : res.components) sum += c;
  res.sum_residual = (x - sum).norm();
  res.invariance_defects.resize(n);
  for (Index j = 0; j < n; ++j)
    res.invariance_defects[j] =
        (family.ops[j] * res.components[j] - res.components[j]).norm();
  res.tol = tol;
  res.input_norm = x.norm();
  const double budget = tol * res.input_norm;
  res.accepted = res.sum_residual <= budget;
  for (double d : res.invariance_defects) res.accepted = res.accepted && d <= budget;
}

}  // namespace detail

/// Inclusion-exclusion decomposition with caller-supplied projections
/// (P_j must be the mean ergodic projection of T_j, or an exact substitute
/// such as a cyclic orbit average).
///
///   x_j = - sum_{eps: eps_j = 1, eps_k = 0 for k > j}
///             (-1)^{|eps|} (prod_{i: eps_i = 1} P_i) x
inline DecompositionResult decompose_with_projections(
    const OperatorFamily& family, const std::vector<Matrix>& projections,
    const Vector& x, double tol) {
  const int n = static_cast<int>(family.size());
  if (static_cast<int>(projections.size()) != n)
    throw InvalidInput("decompose_with_projections: one projection per operator");

  const double diff = difference_defect(family, x);
  if (diff > tol * x.norm())
    throw PreconditionViolation(
        "decompose_vector: difference defect " + std::to_string(diff) +
            " exceeds tol * ||x|| = " + std::to_string(tol * x.norm()),
        diff);

  double proj_comm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      proj_comm = std::max(
          proj_comm, opnorm(projections[i] * projections[j] -
                            projections[j] * projections[i]));
  double max_pnorm = 0.0;
  for (const auto& p : projections) max_pnorm = std::max(max_pnorm, opnorm(p));
  if (proj_comm > 1e-8 * std::max(1.0, max_pnorm * max_pnorm))
    throw NumericalFailure(
        "decompose_vector: projections fail to commute (defect " +
        std::to_string(proj_comm) + ")");

  DecompositionResult res;
  res.method = DecompMethod::inclusion_exclusion;
  res.projection_commutation_defect = proj_comm;
  res.components.assign(n, Vector::Zero(family.dim));

  for (int j = 1; j <= n; ++j) {
    Vector acc = Vector::Zero(family.dim);
    for (const EpsilonMask& eps : masks_with_top_index(n, j)) {
      Vector term = x;
      for (int i = 1; i <= j; ++i)
        if (eps.test(i)) term = projections[i - 1] * term;
      acc -= eps.sign() * term;
    }
    res.components[j - 1] = acc;
  }

  Vector cert = x;
  for (int j = n; j >= 1; --j) cert = projections[j - 1] * cert - cert;
  res.projection_product_defect = cert.norm();

  detail::finalize_result(family, x, tol, res);
  return res;
}

/// The decomposition theorem realized for operator families: computes the
/// mean ergodic projection of every T_j and applies the inclusion-exclusion
/// formula. Requires the difference equation within tol * ||x|| and every
/// operator to pass the power-boundedness verdict.
inline DecompositionResult decompose_vector(
    const OperatorFamily& family, const Vector& x, double tol = kDefaultDecompTol,
    ProjectionMethod method = ProjectionMethod::algebraic(),
    double rank_tol = -1.0) {
  if (x.size() != family.dim)
    throw InvalidInput("decompose_vector: vector dimension mismatch");
  for (Index j = 0; j < family.size(); ++j) {
    PowerBoundVerdict v = power_bounded_verdict(family.ops[j]);
    if (!v.bounded)
      throw HypothesisViolation(
          "decompose_vector: operator " + std::to_string(j + 1) +
          " is not power-bounded (radius " + std::to_string(v.spectral_radius) +
          ", peripheral defect " + std::to_string(v.peripheral_defect) + ")");
  }
  std::vector<Matrix> projections;
  projections.reserve(family.size());
  for (const auto& t : family.ops)
    projections.push_back(mean_ergodic_projection(t, method, rank_tol).P);
  return decompose_with_projections(family, projections, x, tol);
}

/// Independent least-squares oracle: minimizes ||x - sum_j B_j c_j|| over the
/// concatenated kernel bases B_j = ker(T_j - I). Certifies membership in the
/// kernel sum without touching the projection path.
inline DecompositionResult decompose_oracle(const OperatorFamily& family,
                                            const Vector& x,
                                            double tol = kDefaultDecompTol,
                                            double rank_tol = -1.0) {
  if (x.size() != family.dim)
    throw InvalidInput("decompose_oracle: vector dimension mismatch");
  const Index n = family.size();
  const double rtol = rank_tol < 0 ? default_rank_tol(family.dim) : rank_tol;
  std::vector<Subspace> kernels;
  kernels.reserve(n);
  Index total = 0;
  for (const auto& t : family.ops) {
    kernels.push_back(kernel_basis_abs(t - Matrix::Identity(family.dim, family.dim),
                                       rtol * (1.0 + opnorm(t))));
    total += kernels.back().dim();
  }

  DecompositionResult res;
  res.method = DecompMethod::oracle;
  res.components.assign(n, Vector::Zero(family.dim));

  if (total > 0) {
    Matrix concat(family.dim, total);
    Index col = 0;
    for (const auto& k : kernels) {
      concat.middleCols(col, k.dim()) = k.basis;
      col += k.dim();
    }
    Vector coeffs = concat.completeOrthogonalDecomposition().solve(x);
    col = 0;
    for (Index j = 0; j < n; ++j) {
      if (kernels[j].dim() > 0)
        res.components[j] = kernels[j].basis * coeffs.segment(col, kernels[j].dim());
      col += kernels[j].dim();
    }
  }

  detail::finalize_result(family, x, tol, res);
  return res;
}

}  // namespace perdec
