#include <doctest.h>

#include "generators.hpp"
#include "perdec/ergodic.hpp"

using namespace perdec;

namespace {

Matrix jordan_one() {
  Matrix j(2, 2);
  j << 1, 1, 0, 1;
  return j;
}

}  // namespace

TEST_CASE("power_bounded_verdict on a unitary diagonal") {
  Vector d(2);
  d << Complex(1, 0), Complex(0, 1);
  PowerBoundVerdict v = power_bounded_verdict(Matrix(d.asDiagonal()));
  CHECK(v.bounded);
  CHECK(v.spectral_radius == doctest::Approx(1.0));
  CHECK(v.peripheral_defect == 0);
  CHECK(v.empirical_bound == doctest::Approx(1.0));
}

TEST_CASE("power_bounded_verdict flags the Jordan block") {
  PowerBoundVerdict v = power_bounded_verdict(jordan_one());
  CHECK_FALSE(v.bounded);
  CHECK(v.peripheral_defect == 1);
  // T^N = [[1, N], [0, 1]] grows linearly; the largest sampled N is 1024.
  CHECK(v.empirical_bound >= 1024.0 / 2.0);
}

TEST_CASE("power_bounded_verdict on a strict contraction") {
  Vector d(2);
  d << Complex(0.5, 0), Complex(-0.9, 0);
  PowerBoundVerdict v = power_bounded_verdict(Matrix(d.asDiagonal()));
  CHECK(v.bounded);
  CHECK(v.spectral_radius == doctest::Approx(0.9));
}

TEST_CASE("mean ergodic projection of the swap operator") {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;

  ProjectionReport alg = mean_ergodic_projection(swap);
  CHECK(opnorm(alg.P - expected) <= 1e-12);
  CHECK(alg.idempotency_defect <= alg.tol);
  CHECK(alg.zero_element_defect <= alg.tol);

  // The order-2 Cesaro average is already exact.
  ProjectionReport ces = mean_ergodic_projection(swap, ProjectionMethod::cesaro(2));
  CHECK(opnorm(ces.P - expected) <= 1e-14);
  CHECK(ces.cesaro_certificate <= 1e-14);
}

TEST_CASE("rotation by 2pi/3 has no fixed vectors") {
  const double th = 2.0 * 3.14159265358979323846 / 3.0;
  Matrix rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  ProjectionReport rep = mean_ergodic_projection(rot);
  CHECK(opnorm(rep.P) <= 1e-12);
  CHECK(rep.range.dim() == 0);
}

TEST_CASE("mean ergodic projection of diag(1, 0.5)") {
  Vector d(2);
  d << Complex(1, 0), Complex(0.5, 0);
  ProjectionReport rep = mean_ergodic_projection(Matrix(d.asDiagonal()));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(opnorm(rep.P - expected) <= 1e-12);
}

TEST_CASE("algebraic projection rejects a non-direct splitting") {
  CHECK_THROWS_AS(mean_ergodic_projection(jordan_one()), SplittingNotDirect);
}

TEST_CASE("Cesaro averages of an expanding operator diverge") {
  CHECK_THROWS_AS(
      mean_ergodic_projection(Matrix(2.0 * Matrix::Identity(2, 2)),
                              ProjectionMethod::cesaro(64)),
      DivergenceError);
}

TEST_CASE("range of the algebraic projection is ker(T - I)") {
  auto rng = testgen::make_rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    Matrix t = testgen::random_power_bounded(rng, 6, 1 + trial % 3);
    ProjectionReport rep = mean_ergodic_projection(t);
    Subspace ker = kernel_basis(t - Matrix::Identity(6, 6));
    CHECK(subspace_distance(rep.range, ker) <= 1e-10);
    CHECK(rep.idempotency_defect <= rep.tol);
    CHECK(rep.zero_element_defect <= rep.tol);
  }
}

TEST_CASE("algebraic and Cesaro projections agree at the Cesaro rate") {
  auto rng = testgen::make_rng(42);
  const long n = 4096;
  for (int trial = 0; trial < 10; ++trial) {
    // Unitary with peripheral gap |1 - lambda| >= 0.5 away from 1.
    Matrix q = testgen::random_unitary(rng, 5);
    Vector d(5);
    d(0) = 1.0;
    d(1) = 1.0;
    for (int i = 2; i < 5; ++i)
      d(i) = testgen::random_peripheral_away_from_one(rng, 0.5);
    Matrix t = q * d.asDiagonal() * q.adjoint();

    ProjectionReport alg = mean_ergodic_projection(t);
    ProjectionReport ces =
        mean_ergodic_projection(t, ProjectionMethod::cesaro(n, 1.0));
    CHECK(opnorm(alg.P - ces.P) <= 2.0 / (static_cast<double>(n) * 0.5) + 1e-12);
    CHECK(opnorm(alg.P - ces.P) <= 1e-3);
  }
}

TEST_CASE("without peripheral spectrum the iterates converge geometrically") {
  // Plain Cesaro converges only at rate 1/N; the geometric statement lives
  // in the powers T^N, which settle to P well below 1e-8.
  auto rng = testgen::make_rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix q = testgen::random_unitary(rng, 5);
    Vector d(5);
    d(0) = 1.0;
    std::uniform_real_distribution<double> u(0.0, 0.8);
    for (int i = 1; i < 5; ++i) d(i) = u(rng) * testgen::random_unit_complex(rng);
    Matrix t = q * d.asDiagonal() * q.adjoint();

    ProjectionReport alg = mean_ergodic_projection(t);
    Matrix pow = t;
    for (int k = 0; k < 12; ++k) pow = pow * pow;  // T^4096
    CHECK(opnorm(pow - alg.P) <= 1e-8);

    Matrix ces = cesaro_average(t, 4096);
    CHECK(opnorm(ces - alg.P) <= 4.0 / 4096.0 * 10.0);
  }
}

TEST_CASE("zero_element_check examples") {
  std::vector<Matrix> family;
  Vector d(2);
  d << Complex(1, 0), Complex(0.5, 0);
  family.push_back(Matrix(d.asDiagonal()));

  CHECK(zero_element_check(Matrix::Zero(2, 2), family, 1e-12).defect ==
        doctest::Approx(0.0));

  Matrix p = Matrix::Zero(2, 2);
  p(0, 0) = 1.0;
  auto rep = zero_element_check(p, family, 1e-12);
  CHECK(rep.pass);
  CHECK(rep.defect == doctest::Approx(0.0));

  auto bad = zero_element_check(Matrix::Identity(2, 2), family, 1e-12);
  CHECK_FALSE(bad.pass);
  CHECK(bad.defect ==
        doctest::Approx(opnorm(family[0] - Matrix::Identity(2, 2))));
}

TEST_CASE("kernel_power_collapse examples") {
  Vector d(2);
  d << Complex(1, 0), Complex(0.5, 0);
  auto ok = kernel_power_collapse(Matrix(d.asDiagonal()), 3, 1e-8);
  CHECK(ok.dim_ker == 1);
  CHECK(ok.dim_ker_pow == 1);
  CHECK(ok.collapsed);

  auto bad = kernel_power_collapse(jordan_one(), 2, 1e-8);
  CHECK(bad.dim_ker == 1);
  CHECK(bad.dim_ker_pow == 2);
  CHECK_FALSE(bad.collapsed);
}

TEST_CASE("kernel_power_collapse on a unitary with a double fixed space") {
  auto rng = testgen::make_rng(44);
  Matrix q = testgen::random_unitary(rng, 6);
  Vector d(6);
  d(0) = d(1) = 1.0;
  for (int i = 2; i < 6; ++i)
    d(i) = testgen::random_peripheral_away_from_one(rng, 0.3);
  Matrix t = q * d.asDiagonal() * q.adjoint();

  auto rep = kernel_power_collapse(t, 4, 1e-8);
  CHECK(rep.dim_ker == 2);
  CHECK(rep.dim_ker_pow == 2);
  CHECK(rep.collapsed);

  // Independent oracle: singular-value rank count of (T-I)^4 vs (T-I).
  Matrix shifted = t - Matrix::Identity(6, 6);
  Matrix power = shifted * shifted * shifted * shifted;
  auto rank_of = [](const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-8 * sv(0)) ++r;
    return r;
  };
  CHECK(rank_of(shifted) == 4);
  CHECK(rank_of(power) == 4);
}

TEST_CASE("kernel power collapse holds for random power-bounded operators") {
  auto rng = testgen::make_rng(45);
  for (int trial = 0; trial < 60; ++trial) {
    Matrix t = testgen::random_power_bounded(rng, 5, trial % 3);
    for (int n : {2, 3, 4}) CHECK(kernel_power_collapse(t, n, 1e-8).collapsed);
  }
}

TEST_CASE("jdlg_split reads a diagonal off") {
  Vector d(2);
  d << std::polar(1.0, 0.7), Complex(0.5, 0);
  JdlgSplit split = jdlg_split(Matrix(d.asDiagonal()));
  REQUIRE(split.reversible.dim() == 1);
  REQUIRE(split.stable.dim() == 1);
  CHECK(std::abs(split.reversible.basis(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(split.stable.basis(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("jdlg_split of a unitary has no stable part") {
  auto rng = testgen::make_rng(46);
  Matrix u = testgen::random_unitary(rng, 5);
  JdlgSplit split = jdlg_split(u);
  CHECK(split.reversible.dim() == 5);
  CHECK(split.stable.dim() == 0);
}

TEST_CASE("jdlg_split dimensions on a mixed diagonal") {
  Vector d(4);
  d << Complex(1, 0), Complex(0, 1), Complex(0.9, 0), Complex(0, 0);
  JdlgSplit split = jdlg_split(Matrix(d.asDiagonal()));
  CHECK(split.reversible.dim() == 2);
  CHECK(split.stable.dim() == 2);
}

TEST_CASE("jdlg_split refuses non-power-bounded input") {
  CHECK_THROWS_AS(jdlg_split(jordan_one()), HypothesisViolation);
}

TEST_CASE("stable vectors decay under iteration") {
  auto rng = testgen::make_rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix t = testgen::random_power_bounded(rng, 6, 1);
    JdlgSplit split = jdlg_split(t);
    CHECK(split.reversible.dim() + split.stable.dim() == 6);
    if (split.stable.dim() == 0) continue;

    double rho = 0.0;
    for (const auto& c : spectrum(t).clusters)
      if (std::abs(c.value) < 1.0 - 1e-8) rho = std::max(rho, std::abs(c.value));

    Vector y = split.stable.basis * testgen::random_vector(rng, split.stable.dim());
    Matrix pow = t;
    for (int k = 0; k < 8; ++k) pow = pow * pow;  // T^256
    const double bound =
        std::max(std::pow(rho + 0.05, 256.0), 1e-12) * split.kappa * y.norm();
    CHECK((pow * y).norm() <= bound);
  }
}
