#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "perdec/decomp.hpp"
#include "perdec/matrix_exp.hpp"
#include "perdec/rational.hpp"

namespace perdec {

/// Named irrational units for period tags. Commensurability is decided by
/// tag identity, never by floating-point comparison.
class UnitRegistry {
 public:
  UnitRegistry() {
    units_["one"] = 1.0;
    units_["sqrt2"] = std::sqrt(2.0);
    units_["sqrt3"] = std::sqrt(3.0);
    units_["pi"] = 3.14159265358979323846;
    units_["e"] = 2.71828182845904523536;
  }

  double value(const std::string& tag) const {
    auto it = units_.find(tag);
    if (it == units_.end())
      throw InvalidInput("UnitRegistry: unknown unit tag '" + tag + "'");
    return it->second;
  }

  void define(const std::string& tag, double v) {
    if (!(v > 0) || !std::isfinite(v))
      throw InvalidInput("UnitRegistry: unit value must be positive finite");
    units_[tag] = v;
  }

  bool known(const std::string& tag) const { return units_.count(tag) > 0; }

 private:
  std::map<std::string, double> units_;
};

/// A time t = (p/q) * unit(tag). Two periods are commensurable exactly when
/// they carry the same tag.
struct PeriodSpec {
  Fraction rational;  // p/q, positive
  std::string tag = "one";
  double numeric = 0.0;

  static PeriodSpec create(std::int64_t p, std::int64_t q, const std::string& tag,
                           const UnitRegistry& units = UnitRegistry{}) {
    if (p <= 0 || q <= 0)
      throw InvalidInput("PeriodSpec: p, q must be positive");
    PeriodSpec spec;
    spec.rational = Fraction(p, q);
    spec.tag = tag;
    spec.numeric = spec.rational.value() * units.value(tag);
    return spec;
  }

  bool commensurable_with(const PeriodSpec& other) const {
    return tag == other.tag;
  }
};

/// Growth bound of the semigroup generated by A: max Re sigma(A). In finite
/// dimension this equals (1/t) log r(exp(tA)) for every t > 0.
template <typename Derived>
double growth_bound(const Eigen::MatrixBase<Derived>& a) {
  SpectrumReport rep = spectrum(a);
  double w = -std::numeric_limits<double>::infinity();
  for (const auto& c : rep.clusters) w = std::max(w, c.value.real());
  return w;
}

/// Generator A with its cached growth bound and a spectral boundedness
/// verdict: sup_t ||exp(tA)|| < infinity iff max Re sigma(A) <= 0 and the
/// imaginary-axis eigenvalues are semisimple.
struct SemigroupSpec {
  Matrix A;
  double growth_bound = 0.0;
  bool bounded_flag = false;

  static SemigroupSpec create(Matrix generator) {
    require_square_finite(generator, "SemigroupSpec");
    SemigroupSpec s;
    SpectrumReport rep = spectrum(generator);
    double w = -std::numeric_limits<double>::infinity();
    bool bounded = true;
    const double axis_tol = std::max(rep.cluster_tol, 1e-12);
    for (const auto& c : rep.clusters) {
      w = std::max(w, c.value.real());
      if (c.value.real() > axis_tol) bounded = false;
      if (std::abs(c.value.real()) <= axis_tol && c.geometric < c.algebraic)
        bounded = false;
    }
    s.A = std::move(generator);
    s.growth_bound = w;
    s.bounded_flag = bounded;
    return s;
  }

  Matrix at(double t) const { return matrix_exp(A, t); }
};

/// One commensurability class: member indices, the common period
/// s = lcm of the member fractions (times the shared unit), and the integer
/// multipliers m_j with m_j * t_j = s exactly.
struct CommensurabilityClass {
  std::vector<int> members;
  PeriodSpec common;
  std::vector<std::int64_t> multipliers;
};

struct ReductionPlan {
  std::vector<CommensurabilityClass> classes;  // ordered by first occurrence
  std::vector<PeriodSpec> reduced_times;       // one common period per class
};

/// Partitions periods into commensurability classes by tag and computes the
/// exact common period of each class in rational arithmetic.
inline ReductionPlan reduce_periods(const std::vector<PeriodSpec>& times,
                                    const UnitRegistry& units = UnitRegistry{}) {
  if (times.empty()) throw InvalidInput("reduce_periods: empty time list");
  for (const auto& t : times)
    if (!(t.numeric > 0) || t.rational.num <= 0)
      throw InvalidInput("reduce_periods: periods must be positive");

  ReductionPlan plan;
  for (int i = 0; i < static_cast<int>(times.size()); ++i) {
    CommensurabilityClass* cls = nullptr;
    for (auto& c : plan.classes)
      if (times[c.members.front()].commensurable_with(times[i])) cls = &c;
    if (cls == nullptr) {
      plan.classes.emplace_back();
      cls = &plan.classes.back();
    }
    cls->members.push_back(i);
  }

  for (auto& c : plan.classes) {
    Fraction s = times[c.members.front()].rational;
    for (std::size_t k = 1; k < c.members.size(); ++k)
      s = fraction_lcm(s, times[c.members[k]].rational);
    c.common = PeriodSpec::create(s.num, s.den, times[c.members.front()].tag, units);
    for (int idx : c.members)
      c.multipliers.push_back(fraction_ratio_integer(s, times[idx].rational));
    plan.reduced_times.push_back(c.common);
  }
  return plan;
}

/// Builds the reduced family {T(s_c)} for the classes of a reduction plan.
/// Lemma-style kernel collapse ker(T(s)-I)^k = ker(T(s)-I) needs T(s) to be
/// power-bounded, which is verified here.
inline OperatorFamily collapse_powers(const SemigroupSpec& sg,
                                      const ReductionPlan& plan) {
  std::vector<Matrix> ops;
  ops.reserve(plan.classes.size());
  for (const auto& c : plan.classes) {
    Matrix t = sg.at(c.common.numeric);
    PowerBoundVerdict v = power_bounded_verdict(t);
    if (!v.bounded)
      throw HypothesisViolation(
          "collapse_powers: T(s) for s = " + std::to_string(c.common.numeric) +
          " is not power-bounded; kernel collapse is inapplicable");
    ops.push_back(std::move(t));
  }
  return OperatorFamily::create(std::move(ops));
}

/// Decomposition of a semigroup snapshot problem. The certified result lives
/// on the reduced (pairwise incommensurable) family; per-original-time
/// defects are informational, since a class component is invariant under
/// T(s) but need not be invariant under each merged T(t_j).
struct SemigroupDecomposition {
  DecompositionResult reduced;
  ReductionPlan plan;
  double difference_defect = 0.0;       // over the unreduced family
  std::vector<double> original_time_defects;  // ||(T(t_j) - I) x_{class(j)}||
};

/// Rank tolerance for kernels of semigroup snapshots: exp(tA) carries a
/// backward error of order 1e-13, so the dim*eps default would miss kernel
/// directions.
inline constexpr double kSnapshotRankTol = 1e-12;

inline SemigroupDecomposition semigroup_decompose(
    const SemigroupSpec& sg, const std::vector<PeriodSpec>& times, const Vector& x,
    double tol = kDefaultDecompTol, const UnitRegistry& units = UnitRegistry{},
    double rank_tol = kSnapshotRankTol) {
  if (!sg.bounded_flag)
    throw HypothesisViolation(
        "semigroup_decompose: semigroup is not bounded (growth bound " +
        std::to_string(sg.growth_bound) + " or defective imaginary spectrum)");
  if (x.size() != sg.A.rows())
    throw InvalidInput("semigroup_decompose: vector dimension mismatch");

  std::vector<Matrix> original;
  original.reserve(times.size());
  for (const auto& t : times) original.push_back(sg.at(t.numeric));
  OperatorFamily unreduced = OperatorFamily::create(original);

  SemigroupDecomposition out;
  out.difference_defect = difference_defect(unreduced, x);
  if (out.difference_defect > tol * x.norm())
    throw PreconditionViolation(
        "semigroup_decompose: difference defect " +
            std::to_string(out.difference_defect) + " exceeds tol * ||x||",
        out.difference_defect);

  out.plan = reduce_periods(times, units);
  OperatorFamily reduced = collapse_powers(sg, out.plan);
  out.reduced = decompose_vector(reduced, x, tol, ProjectionMethod::algebraic(),
                                 rank_tol);

  out.original_time_defects.assign(times.size(), 0.0);
  for (std::size_t c = 0; c < out.plan.classes.size(); ++c)
    for (int idx : out.plan.classes[c].members)
      out.original_time_defects[idx] =
          (unreduced.ops[idx] * out.reduced.components[c] -
           out.reduced.components[c])
              .norm();
  return out;
}

struct PeriodicSpectrumReport {
  bool pass = false;
  double periodicity_defect = 0.0;  // ||exp(alpha A) - I||
  struct Offender {
    Complex eigenvalue;
    double distance = 0.0;  // to (2 pi i / alpha) Z
    bool semisimple = true;
  };
  std::vector<Offender> offenders;
  std::vector<Complex> eigenvalues;
};

/// For an alpha-periodic semigroup (T(alpha) = I) the generator spectrum
/// lies on (2 pi i / alpha) Z and consists of semisimple eigenvalues.
template <typename Derived>
PeriodicSpectrumReport periodic_spectrum_check(const Eigen::MatrixBase<Derived>& a,
                                               double alpha, double tol) {
  if (!(alpha > 0)) throw InvalidInput("periodic_spectrum_check: alpha > 0 required");
  Matrix gen = a.template cast<Complex>();
  require_square_finite(gen, "periodic_spectrum_check");

  PeriodicSpectrumReport rep;
  rep.periodicity_defect =
      opnorm(matrix_exp(gen, alpha) - Matrix::Identity(gen.rows(), gen.cols()));
  if (rep.periodicity_defect > tol)
    throw NotPeriodic("periodic_spectrum_check: ||exp(alpha A) - I|| = " +
                      std::to_string(rep.periodicity_defect) +
                      " exceeds tol; semigroup is not alpha-periodic");

  const double step = 2.0 * 3.14159265358979323846 / alpha;
  SpectrumReport spec = spectrum(gen);
  rep.pass = true;
  for (const auto& c : spec.clusters) {
    rep.eigenvalues.push_back(c.value);
    const double k = std::round(c.value.imag() / step);
    const double dist = std::abs(c.value - Complex(0.0, k * step));
    const bool semisimple = c.geometric >= c.algebraic;
    if (dist > tol || !semisimple) {
      rep.offenders.push_back({c.value, dist, semisimple});
      rep.pass = false;
    }
  }
  return rep;
}

struct PeripheralSmtReport {
  double spectral_radius = 0.0;       // r(T(t))
  std::vector<Complex> semigroup_side;  // peripheral sigma(T(t))
  std::vector<Complex> generator_side;  // peripheral exp(t sigma(A))
  double hausdorff = 0.0;
  bool pass = false;
};

namespace detail {

inline double hausdorff_distance(const std::vector<Complex>& a,
                                 const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double h = 0.0;
  for (const auto& p : a) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& q : b) d = std::min(d, std::abs(p - q));
    h = std::max(h, d);
  }
  for (const auto& q : b) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : a) d = std::min(d, std::abs(p - q));
    h = std::max(h, d);
  }
  return h;
}

}  // namespace detail

/// Spectral mapping on the peripheral circle: compares
/// sigma(T(t)) and exp(t sigma(A)) restricted to |lambda| = r(T(t)).
template <typename Derived>
PeripheralSmtReport peripheral_smt_check(const Eigen::MatrixBase<Derived>& a,
                                         double t, double tol) {
  if (!(t > 0)) throw InvalidInput("peripheral_smt_check: t > 0 required");
  Matrix gen = a.template cast<Complex>();
  require_square_finite(gen, "peripheral_smt_check");

  Matrix tt = matrix_exp(gen, t);
  SpectrumReport sg_side = spectrum(tt);
  SpectrumReport gen_side = spectrum(gen);

  std::vector<Complex> mapped;
  for (const auto& c : gen_side.clusters)
    mapped.push_back(std::exp(t * c.value));

  double r = 0.0;
  for (const auto& c : sg_side.clusters) r = std::max(r, std::abs(c.value));
  for (const auto& v : mapped) r = std::max(r, std::abs(v));

  // Same relative band on both sides keeps the selection symmetric.
  const double band = std::max(1e-9 * (1.0 + r), tol * 0.1);
  PeripheralSmtReport rep;
  rep.spectral_radius = r;
  for (const auto& c : sg_side.clusters)
    if (std::abs(c.value) >= r - band) rep.semigroup_side.push_back(c.value);
  for (const auto& v : mapped)
    if (std::abs(v) >= r - band) rep.generator_side.push_back(v);
  rep.hausdorff = detail::hausdorff_distance(rep.semigroup_side, rep.generator_side);
  rep.pass = rep.hausdorff <= tol;
  return rep;
}

/// Norm-continuity-at-infinity diagnostic:
///   D(t) = max_h || e^{-w0 t} T(t) (I - e^{-w0 h} T(h)) ||.
/// Every matrix semigroup is uniformly norm continuous, so D(t) stays of
/// order min(h_grid); the curve documents that the hypothesis of the
/// decomposition theorem holds at desk scale.
struct NormContinuityPoint {
  double t = 0.0;
  double defect = 0.0;
};

inline std::vector<NormContinuityPoint> norm_continuity_defect(
    const SemigroupSpec& sg, std::vector<double> t_grid = {},
    std::vector<double> h_grid = {}) {
  if (t_grid.empty()) t_grid = {1, 2, 4, 8, 16, 32, 64};
  if (h_grid.empty()) h_grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  for (double t : t_grid)
    if (!(t > 0)) throw InvalidInput("norm_continuity_defect: t grid must be positive");
  for (double h : h_grid)
    if (!(h > 0)) throw InvalidInput("norm_continuity_defect: h grid must be positive");

  const double w0 = sg.growth_bound;
  const Index n = sg.A.rows();
  std::vector<NormContinuityPoint> curve;
  for (double t : t_grid) {
    Matrix left = std::exp(-w0 * t) * sg.at(t);
    double worst = 0.0;
    for (double h : h_grid) {
      Matrix right = Matrix::Identity(n, n) - std::exp(-w0 * h) * sg.at(h);
      worst = std::max(worst, opnorm(left * right));
    }
    curve.push_back({t, worst});
  }
  return curve;
}

/// Greedy sequential epsilon-net size of a point cloud.
inline int greedy_net_size(const std::vector<Vector>& points, double eps) {
  std::vector<const Vector*> centers;
  for (const auto& p : points) {
    bool covered = false;
    for (const auto* c : centers)
      if ((p - *c).norm() <= eps) {
        covered = true;
        break;
      }
    if (!covered) centers.push_back(&p);
  }
  return static_cast<int>(centers.size());
}

struct AapOrbitReport {
  bool orbit_bounded = true;
  double max_norm = 0.0;
  int discrete_net = 0;    // net of {T(n t_step) x : n t_step <= horizon}
  int continuous_net = 0;  // net of the finely sampled orbit on [0, horizon]
  int window_net = 0;      // net of {T(s) x : s in [0, t_step]}
  double ratio = 0.0;      // continuous_net / max(1, discrete_net)
  bool product_bound_holds = false;  // continuous <= discrete * window
};

/// Relative-compactness diagnostic for the orbit of x: compares epsilon-net
/// sizes of the discrete orbit and the sampled continuous orbit. An orbit
/// norm above 1e6 * ||x|| is reported as evidence against asymptotic almost
/// periodicity instead of a net count.
inline AapOrbitReport aap_orbit_diagnostic(const SemigroupSpec& sg, const Vector& x,
                                           double t_step, double horizon,
                                           double eps) {
  if (!(t_step > 0)) throw InvalidInput("aap_orbit_diagnostic: t_step > 0 required");
  if (!(horizon >= t_step))
    throw InvalidInput("aap_orbit_diagnostic: horizon >= t_step required");
  if (!(eps > 0)) throw InvalidInput("aap_orbit_diagnostic: eps > 0 required");
  if (x.size() != sg.A.rows())
    throw InvalidInput("aap_orbit_diagnostic: vector dimension mismatch");

  AapOrbitReport rep;
  const double xnorm = x.norm();
  const double blowup = 1e6 * std::max(xnorm, 1e-300);

  // Fine sampling: small enough that consecutive orbit points move by about
  // eps/4, clamped to keep the sample count moderate.
  const double anorm = opnorm(sg.A);
  double dt = t_step;
  if (anorm > 0 && xnorm > 0) dt = std::min(dt, eps / (4.0 * anorm * xnorm));
  dt = std::max(dt, horizon / 200000.0);

  std::vector<Vector> continuous, discrete, window;
  Matrix step = sg.at(dt);
  Vector v = x;
  for (double t = 0.0; t <= horizon + 0.5 * dt; t += dt) {
    rep.max_norm = std::max(rep.max_norm, v.norm());
    if (v.norm() > blowup) {
      rep.orbit_bounded = false;
      return rep;
    }
    continuous.push_back(v);
    if (t <= t_step + 0.5 * dt) window.push_back(v);
    v = step * v;
  }
  Matrix big_step = sg.at(t_step);
  v = x;
  for (double t = 0.0; t <= horizon + 0.5 * t_step; t += t_step) {
    discrete.push_back(v);
    v = big_step * v;
  }

  rep.discrete_net = greedy_net_size(discrete, eps);
  rep.continuous_net = greedy_net_size(continuous, eps);
  rep.window_net = greedy_net_size(window, eps);
  rep.ratio = static_cast<double>(rep.continuous_net) /
              std::max(1, rep.discrete_net);
  rep.product_bound_holds =
      rep.continuous_net <= rep.discrete_net * std::max(1, rep.window_net);
  return rep;
}

}  // namespace perdec
