#include <doctest.h>

#include "generators.hpp"
#include "perdec/decomp.hpp"

using namespace perdec;

namespace {

Complex root_of_unity(int k) {
  const double th = 2.0 * 3.14159265358979323846 / k;
  return {std::cos(th), std::sin(th)};
}

// The family {diag(1, w3), diag(w5, 1)}: the operator product
// (T1 - I)(T2 - I) is the zero matrix, so everything is decomposable.
OperatorFamily omega_family() {
  Vector d1(2), d2(2);
  d1 << Complex(1, 0), root_of_unity(3);
  d2 << root_of_unity(5), Complex(1, 0);
  return OperatorFamily::create({Matrix(d1.asDiagonal()), Matrix(d2.asDiagonal())});
}

}  // namespace

TEST_CASE("epsilon masks enumerate the paper's grouping") {
  auto masks = masks_with_top_index(3, 2);
  REQUIRE(masks.size() == 2);
  for (const auto& m : masks) {
    CHECK(m.test(2));
    CHECK(m.last_set() == 2);
  }
  CHECK(masks[0].weight() + masks[1].weight() == 3);  // {010, 110}

  EpsilonMask zero{0, 3};
  CHECK(zero.weight() == 0);
  CHECK(zero.last_set() == 0);
  CHECK(zero.sign() == 1.0);
}

TEST_CASE("OperatorFamily rejects non-commuting operators") {
  Matrix a(2, 2), b(2, 2);
  a << 0, 1, 0, 0;
  b << 0, 0, 1, 0;
  CHECK_THROWS_AS(OperatorFamily::create({a, b}), InvalidInput);
}

TEST_CASE("difference_defect examples") {
  SUBCASE("fixed vector of a single operator") {
    Vector d(2);
    d << Complex(1, 0), Complex(0.3, 0);
    OperatorFamily fam = OperatorFamily::create({Matrix(d.asDiagonal())});
    Vector x = Vector::Zero(2);
    x(0) = 1.0;
    CHECK(difference_defect(fam, x) <= 1e-14);
  }
  SUBCASE("zero operator product annihilates everything") {
    OperatorFamily fam = omega_family();
    // Oracle: multiply the two diagonal factors.
    Matrix prod = (fam.ops[0] - Matrix::Identity(2, 2)) *
                  (fam.ops[1] - Matrix::Identity(2, 2));
    CHECK(opnorm(prod) <= 1e-15);
    auto rng = testgen::make_rng(51);
    for (int i = 0; i < 5; ++i)
      CHECK(difference_defect(fam, testgen::random_vector(rng, 2)) <= 1e-14);
  }
  SUBCASE("T = 2I on a unit vector") {
    OperatorFamily fam = OperatorFamily::create({Matrix(2.0 * Matrix::Identity(2, 2))});
    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    CHECK(difference_defect(fam, e1) == doctest::Approx(1.0));
  }
}

TEST_CASE("decompose_vector returns a fixed vector unchanged (n = 1)") {
  Vector d(3);
  d << Complex(1, 0), Complex(0.4, 0.2), Complex(-0.8, 0);
  OperatorFamily fam = OperatorFamily::create({Matrix(d.asDiagonal())});
  Vector x = Vector::Zero(3);
  x(0) = Complex(2.0, -1.0);
  DecompositionResult res = decompose_vector(fam, x);
  REQUIRE(res.accepted);
  REQUIRE(res.components.size() == 1);
  CHECK((res.components[0] - x).norm() <= 1e-14 * x.norm());
}

TEST_CASE("diagonal case forces the components") {
  OperatorFamily fam = omega_family();
  Vector x(2);
  x << 1.0, 1.0;
  DecompositionResult res = decompose_vector(fam, x);
  REQUIRE(res.accepted);
  CHECK(std::abs(res.components[0](0) - Complex(1, 0)) <= 1e-13);
  CHECK(std::abs(res.components[0](1)) <= 1e-13);
  CHECK(std::abs(res.components[1](0)) <= 1e-13);
  CHECK(std::abs(res.components[1](1) - Complex(1, 0)) <= 1e-13);
  CHECK(*res.projection_product_defect <= 1e-13);
}

TEST_CASE("random diagonalizable pair with overlapping kernels") {
  auto rng = testgen::make_rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 8;
    Matrix q = testgen::random_unitary(rng, n);
    Vector d1(n), d2(n);
    // dim ker(T1 - I) = 3 (indices 0..2), dim ker(T2 - I) = 3 (indices 2..4).
    for (Index i = 0; i < n; ++i) {
      d1(i) = i < 3 ? Complex(1, 0) : testgen::random_peripheral_away_from_one(rng, 0.2);
      d2(i) = (i >= 2 && i < 5) ? Complex(1, 0)
                                : testgen::random_peripheral_away_from_one(rng, 0.2);
    }
    Matrix t1 = q * d1.asDiagonal() * q.adjoint();
    Matrix t2 = q * d2.asDiagonal() * q.adjoint();
    OperatorFamily fam = OperatorFamily::create({t1, t2});

    // x built inside ker (T1 - I)(T2 - I): coordinates 0..4 in the q-basis.
    Vector coeffs = testgen::random_vector(rng, 5);
    Vector x = q.leftCols(5) * coeffs;

    DecompositionResult res = decompose_vector(fam, x);
    REQUIRE(res.accepted);
    CHECK(res.sum_residual <= 1e-10 * x.norm());
    for (double defect : res.invariance_defects) CHECK(defect <= 1e-10 * x.norm());

    DecompositionResult oracle = decompose_oracle(fam, x);
    CHECK(oracle.sum_residual <= 1e-8 * x.norm());
    CHECK(std::abs(oracle.sum_residual - res.sum_residual) <= 1e-8 * x.norm());
  }
}

TEST_CASE("decompose_oracle examples") {
  OperatorFamily fam = omega_family();

  SUBCASE("zero vector") {
    DecompositionResult res = decompose_oracle(fam, Vector::Zero(2));
    CHECK(res.accepted);
    CHECK(res.sum_residual == doctest::Approx(0.0));
    for (const auto& c : res.components) CHECK(c.norm() == doctest::Approx(0.0));
  }
  SUBCASE("agreement with the projection route") {
    Vector x(2);
    x << 1.0, 1.0;
    DecompositionResult res = decompose_oracle(fam, x);
    DecompositionResult via_proj = decompose_vector(fam, x);
    CHECK(res.sum_residual <= 1e-13);
    // Kernel overlap is trivial here, so the components are unique.
    for (int j = 0; j < 2; ++j)
      CHECK((res.components[j] - via_proj.components[j]).norm() <= 1e-12);
  }
  SUBCASE("vector outside the kernel sum") {
    Vector d(2);
    d << Complex(1, 0), root_of_unity(3);
    OperatorFamily single = OperatorFamily::create({Matrix(d.asDiagonal())});
    Vector e2 = Vector::Zero(2);
    e2(1) = 1.0;
    DecompositionResult res = decompose_oracle(single, e2);
    CHECK_FALSE(res.accepted);
    CHECK(res.sum_residual == doctest::Approx(1.0));
  }
}

TEST_CASE("difference-equation precondition is enforced") {
  Vector d(2);
  d << Complex(1, 0), root_of_unity(3);
  OperatorFamily fam = OperatorFamily::create({Matrix(d.asDiagonal())});
  Vector e2 = Vector::Zero(2);
  e2(1) = 1.0;
  CHECK_THROWS_AS(decompose_vector(fam, e2), PreconditionViolation);
  try {
    decompose_vector(fam, e2);
  } catch (const PreconditionViolation& e) {
    CHECK(e.defect == doctest::Approx(std::abs(root_of_unity(3) - Complex(1, 0))));
  }
}

TEST_CASE("non-power-bounded operators are refused") {
  OperatorFamily fam = OperatorFamily::create({Matrix(2.0 * Matrix::Identity(2, 2))});
  Vector x = Vector::Zero(2);
  CHECK_THROWS_AS(decompose_vector(fam, x), HypothesisViolation);
}

TEST_CASE("family permutation leaves the certified quantities invariant") {
  auto rng = testgen::make_rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 6;
    Matrix q = testgen::random_unitary(rng, n);
    Vector d1(n), d2(n), d3(n);
    for (Index i = 0; i < n; ++i) {
      d1(i) = i < 2 ? Complex(1, 0) : testgen::random_peripheral_away_from_one(rng, 0.2);
      d2(i) = (i == 2 || i == 3) ? Complex(1, 0)
                                 : testgen::random_peripheral_away_from_one(rng, 0.2);
      d3(i) = i >= 4 ? Complex(1, 0) : testgen::random_peripheral_away_from_one(rng, 0.2);
    }
    auto diag = [&](const Vector& d) { return Matrix(q * d.asDiagonal() * q.adjoint()); };
    OperatorFamily fam = OperatorFamily::create({diag(d1), diag(d2), diag(d3)});
    OperatorFamily permuted = OperatorFamily::create({diag(d3), diag(d1), diag(d2)});

    Vector x = q * testgen::random_vector(rng, n);
    DecompositionResult a = decompose_vector(fam, x);
    DecompositionResult b = decompose_vector(permuted, x);
    CHECK(a.accepted);
    CHECK(b.accepted);
    CHECK(a.sum_residual <= a.tol * x.norm());
    CHECK(b.sum_residual <= b.tol * x.norm());
  }
}
