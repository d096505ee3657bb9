#pragma once

#include <numeric>
#include <vector>

#include "perdec/decomp.hpp"

namespace perdec {

/// Complex samples over the cyclic group Z_N, acted on by the shifts
/// f -> f(. + a_j). Shift 0 is legal (its Koopman operator is the identity).
struct GridFunction {
  int N = 0;
  Vector values;
  std::vector<int> shifts;  // reduced mod N

  static GridFunction create(int n, Vector vals, std::vector<int> shift_list) {
    if (n <= 0) throw InvalidInput("GridFunction: N must be positive");
    if (vals.size() != n)
      throw InvalidInput("GridFunction: expected N sample values");
    if (!vals.allFinite())
      throw InvalidInput("GridFunction: non-finite sample values");
    if (shift_list.empty())
      throw InvalidInput("GridFunction: at least one shift required");
    for (auto& a : shift_list) a = ((a % n) + n) % n;
    return GridFunction{n, std::move(vals), std::move(shift_list)};
  }
};

/// Koopman operator of the shift x -> x + a on Z_N as a permutation matrix:
/// (S_a f)(x) = f(x + a).
inline Matrix koopman_shift_matrix(int n, int a) {
  a = ((a % n) + n) % n;
  Matrix s = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) s(x, (x + a) % n) = 1.0;
  return s;
}

/// Elements of the subgroup <a> of Z_N (the multiples of gcd(a, N)).
inline std::vector<int> cyclic_subgroup(int n, int a) {
  a = ((a % n) + n) % n;
  const int g = std::gcd(a, n);  // gcd(0, n) = n, so <0> = {0}
  std::vector<int> elems;
  for (int s = 0; s < n; s += g) elems.push_back(s);
  return elems;
}

/// Exact invariant mean over <a>: replaces each sample with the average of
/// its orbit (the coset x + <a>). This is the mean ergodic projection of the
/// shift semigroup, computed exactly.
inline Vector orbit_average(const Vector& values, int n, int a) {
  a = ((a % n) + n) % n;
  const int g = std::gcd(a, n);
  const int m = n / g;  // orbit length
  Vector coset_mean = Vector::Zero(g);
  for (int x = 0; x < n; ++x) coset_mean(x % g) += values(x);
  coset_mean /= static_cast<double>(m);
  Vector out(n);
  for (int x = 0; x < n; ++x) out(x) = coset_mean(x % g);
  return out;
}

/// Orbit-average projections as matrices (small N only; used to tie the grid
/// path to the operator path).
inline Matrix orbit_average_matrix(int n, int a) {
  const auto elems = cyclic_subgroup(n, a);
  Matrix p = Matrix::Zero(n, n);
  for (int s : elems) p += koopman_shift_matrix(n, s);
  return p / static_cast<double>(elems.size());
}

/// Worst-case difference-equation defect over all group points and all
/// subgroup elements:
///   max_{x, s_j in <a_j>} | ((S_{s_1} - I)...(S_{s_n} - I) f)(x) |.
/// Zero exactly when the difference equation holds for every power of every
/// generator. Cost N * prod |<a_j>| * n.
inline double grid_difference_defect(const GridFunction& f) {
  const int n = static_cast<int>(f.shifts.size());
  std::vector<std::vector<int>> subgroups;
  for (int a : f.shifts) subgroups.push_back(cyclic_subgroup(f.N, a));

  std::vector<std::size_t> idx(n, 0);
  double worst = 0.0;
  while (true) {
    Vector g = f.values;
    for (int j = 0; j < n; ++j) {
      const int s = subgroups[j][idx[j]];
      Vector shifted(f.N);
      for (int x = 0; x < f.N; ++x) shifted(x) = g((x + s) % f.N);
      g = shifted - g;
    }
    worst = std::max(worst, g.cwiseAbs().maxCoeff());

    int j = 0;
    while (j < n && ++idx[j] == subgroups[j].size()) idx[j++] = 0;
    if (j == n) break;
  }
  return worst;
}

/// The decomposition theorem on Z_N with exact cyclic means: splits f into
/// components f_j invariant under the shift by a_j. The precondition
/// compares the grid difference defect against tol directly.
inline DecompositionResult decompose_grid_function(const GridFunction& f,
                                                   double tol = kDefaultDecompTol) {
  const int n = static_cast<int>(f.shifts.size());
  const double defect = grid_difference_defect(f);
  if (defect > tol)
    throw PreconditionViolation(
        "decompose_grid_function: grid difference defect " +
            std::to_string(defect) + " exceeds tol " + std::to_string(tol),
        defect);

  DecompositionResult res;
  res.method = DecompMethod::inclusion_exclusion;
  res.components.assign(n, Vector::Zero(f.N));

  for (int j = 1; j <= n; ++j) {
    Vector acc = Vector::Zero(f.N);
    for (const EpsilonMask& eps : masks_with_top_index(n, j)) {
      Vector term = f.values;
      for (int i = 1; i <= j; ++i)
        if (eps.test(i)) term = orbit_average(term, f.N, f.shifts[i - 1]);
      acc -= eps.sign() * term;
    }
    res.components[j - 1] = acc;
  }

  Vector cert = f.values;
  for (int j = n; j >= 1; --j)
    cert = orbit_average(cert, f.N, f.shifts[j - 1]) - cert;
  res.projection_product_defect = cert.norm();
  res.projection_commutation_defect = 0.0;  // exact means commute

  Vector sum = Vector::Zero(f.N);
  for (const auto& c : res.components) sum += c;
  res.sum_residual = (f.values - sum).norm();
  res.invariance_defects.resize(n);
  for (int j = 0; j < n; ++j) {
    Vector shifted(f.N);
    for (int x = 0; x < f.N; ++x)
      shifted(x) = res.components[j]((x + f.shifts[j]) % f.N);
    res.invariance_defects[j] = (shifted - res.components[j]).norm();
  }
  res.tol = tol;
  res.input_norm = f.values.norm();
  const double budget = tol * res.input_norm;
  res.accepted = res.sum_residual <= budget;
  for (double d : res.invariance_defects) res.accepted = res.accepted && d <= budget;
  return res;
}

/// Modulus of continuity at cyclic distance <= delta.
inline double grid_modulus(const Vector& values, int n, int delta) {
  double w = 0.0;
  for (int d = 1; d <= delta; ++d)
    for (int x = 0; x < n; ++x)
      w = std::max(w, std::abs(values(x) - values((x + d) % n)));
  return w;
}

/// max_j omega_{f_j}(delta) / omega_f(delta). Shifts are isometries of the
/// cyclic metric, so the ratio is bounded by 2^n (the decomposition formula
/// for f_j has at most 2^{n-1} unit-coefficient terms).
inline double continuity_defect(const GridFunction& f,
                                const DecompositionResult& result, int delta) {
  if (delta < 0) throw InvalidInput("continuity_defect: delta must be >= 0");
  const double omega_f = grid_modulus(f.values, f.N, delta);
  double omega_max = 0.0;
  for (const auto& c : result.components)
    omega_max = std::max(omega_max, grid_modulus(c, f.N, delta));
  if (omega_f == 0.0)
    return omega_max == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return omega_max / omega_f;
}

}  // namespace perdec
