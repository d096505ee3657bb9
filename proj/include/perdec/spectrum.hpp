#pragma once

#include <numeric>
#include <vector>

#include "perdec/linalg.hpp"

namespace perdec {

struct EigenvalueCluster {
  Complex value;  // cluster representative (mean of members)
  int algebraic = 0;
  int geometric = 0;
};

struct SpectrumReport {
  Index dim = 0;
  std::vector<EigenvalueCluster> clusters;  // sorted by (re, im)
  double residual = 0.0;     // ||M V - V D|| / max(1, ||M||)
  double cluster_tol = 0.0;  // absolute clustering distance used

  double spectral_radius() const {
    double r = 0.0;
    for (const auto& c : clusters) r = std::max(r, std::abs(c.value));
    return r;
  }
  int total_algebraic() const {
    int s = 0;
    for (const auto& c : clusters) s += c.algebraic;
    return s;
  }
};

inline double default_cluster_tol(double norm) { return 1e-8 * norm; }

/// Eigenvalues with algebraic multiplicities (clustered at cluster_tol) and
/// geometric multiplicities (numerical kernel dimension at the cluster
/// representative). cluster_tol < 0 selects the default 1e-8 * ||M||.
template <typename Derived>
SpectrumReport spectrum(const Eigen::MatrixBase<Derived>& expr,
                        double cluster_tol = -1.0) {
  Matrix m = expr.template cast<Complex>();
  require_square_finite(m, "spectrum");
  const Index n = m.rows();

  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("spectrum: eigenvalue iteration did not converge (dim=" +
                           std::to_string(n) + ")");

  const double norm = opnorm(m);
  const double ct = cluster_tol < 0 ? default_cluster_tol(norm) : cluster_tol;
  const auto& ev = solver.eigenvalues();

  // Single-linkage clustering at distance ct.
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= ct) parent[find(i)] = find(j);

  SpectrumReport rep;
  rep.dim = n;
  rep.cluster_tol = ct;
  std::vector<std::vector<Index>> groups(n);
  for (Index i = 0; i < n; ++i) groups[find(i)].push_back(i);

  for (const auto& g : groups) {
    if (g.empty()) continue;
    EigenvalueCluster c;
    Complex mean = 0;
    for (Index i : g) mean += ev(i);
    c.value = mean / static_cast<double>(g.size());
    c.algebraic = static_cast<int>(g.size());

    // Geometric multiplicity: numerical nullity of M - lambda I at the
    // cluster representative; the threshold mirrors the clustering distance
    // so separate clusters cannot leak into each other's kernels.
    Matrix shifted = m - c.value * Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double thresh = std::max(ct, default_rank_tol(n) * smax);
    int nullity = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) <= thresh) ++nullity;
    c.geometric = nullity;
    rep.clusters.push_back(c);
  }

  std::sort(rep.clusters.begin(), rep.clusters.end(),
            [](const EigenvalueCluster& a, const EigenvalueCluster& b) {
              if (a.value.real() != b.value.real())
                return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });

  Matrix resid = m * solver.eigenvectors() -
                 solver.eigenvectors() * ev.asDiagonal();
  rep.residual = opnorm(resid) / std::max(1.0, norm);
  return rep;
}

/// max |lambda|, straight from the eigensolver (no clustering needed).
template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& expr) {
  return spectrum(expr).spectral_radius();
}

}  // namespace perdec
