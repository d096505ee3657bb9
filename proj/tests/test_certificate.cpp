#include <doctest.h>

#include "generators.hpp"
#include "perdec/certificate.hpp"

using namespace perdec;
using perdec::io::json;

namespace {

json family_problem() {
  Vector d1(2), d2(2);
  d1 << Complex(1, 0), std::polar(1.0, 2.0);
  d2 << std::polar(1.0, 1.2), Complex(1, 0);
  return json{{"schema_version", 1},
              {"kind", "operator_family"},
              {"payload",
               {{"ops", {io::to_json(Matrix(d1.asDiagonal())),
                         io::to_json(Matrix(d2.asDiagonal()))}}}}};
}

}  // namespace

TEST_CASE("digests are deterministic and input-sensitive") {
  json p = family_problem();
  json x = io::to_json(Vector(Vector::Ones(2)));
  CHECK(io::input_digest(p, &x) == io::input_digest(p, &x));
  json p2 = p;
  p2["payload"]["ops"][0]["re"][0][0] = 0.9999;
  CHECK(io::input_digest(p, &x) != io::input_digest(p2, &x));
}

TEST_CASE("family certificates verify end to end") {
  json problem_json = family_problem();
  json x_json = io::to_json(Vector(Vector::Ones(2)));

  OperatorFamily fam = io::family_from_payload(problem_json["payload"]);
  Vector x = io::vector_from(io::Cursor(x_json));
  DecompositionResult res = decompose_vector(fam, x);
  REQUIRE(res.accepted);

  io::Certificate cert =
      io::make_family_certificate(problem_json, x_json, fam, x, res);
  json doc = io::certificate_document(cert, io::to_json(res));

  auto rep = io::verify_certificate(doc, problem_json, &x_json);
  CHECK(rep.verified);

  SUBCASE("zeroing a component breaks the sum residual") {
    json tampered = doc;
    for (auto& v : tampered["result"]["components"][0]["re"]) v = 0.0;
    for (auto& v : tampered["result"]["components"][0]["im"]) v = 0.0;
    auto bad = io::verify_certificate(tampered, problem_json, &x_json);
    CHECK_FALSE(bad.verified);
  }
  SUBCASE("flipping the acceptance flag is caught") {
    json tampered = doc;
    tampered["result"]["accepted"] = false;
    auto bad = io::verify_certificate(tampered, problem_json, &x_json);
    CHECK_FALSE(bad.verified);
  }
  SUBCASE("perturbing a stored defect is caught") {
    json tampered = doc;
    tampered["certificate"]["defects"]["sum_residual"] = 0.25;
    auto bad = io::verify_certificate(tampered, problem_json, &x_json);
    CHECK_FALSE(bad.verified);
  }
  SUBCASE("changing the inputs trips the digest") {
    json other_x = io::to_json(Vector(2.0 * Vector::Ones(2)));
    CHECK_THROWS_AS(io::verify_certificate(doc, problem_json, &other_x),
                    TamperError);
  }
}

TEST_CASE("oracle-method certificates verify against recomputation") {
  json problem_json = family_problem();
  json x_json = io::to_json(Vector(Vector::Ones(2)));
  OperatorFamily fam = io::family_from_payload(problem_json["payload"]);
  Vector x = io::vector_from(io::Cursor(x_json));
  DecompositionResult res = decompose_oracle(fam, x);
  io::Certificate cert =
      io::make_family_certificate(problem_json, x_json, fam, x, res);
  json doc = io::certificate_document(cert, io::to_json(res));
  CHECK(io::verify_certificate(doc, problem_json, &x_json).verified);
}

TEST_CASE("grid certificates verify without a separate vector") {
  Vector v(6);
  v << 1, 1, 3, 0, 2, 2;
  GridFunction f = GridFunction::create(6, v, {2, 3});
  json problem_json{{"schema_version", 1},
                    {"kind", "grid_function"},
                    {"payload", io::to_json(f)}};
  DecompositionResult res = decompose_grid_function(f, 1e-8);
  io::Certificate cert = io::make_grid_certificate(problem_json, f, res);
  json doc = io::certificate_document(cert, io::to_json(res));
  CHECK(io::verify_certificate(doc, problem_json).verified);

  json tampered = doc;
  tampered["result"]["components"][1]["re"][0] = 7.5;
  CHECK_FALSE(io::verify_certificate(tampered, problem_json).verified);
}

TEST_CASE("semigroup certificates verify with plan recomputation") {
  Vector d(2);
  const double pi = 3.14159265358979323846;
  d << Complex(0, 2 * pi), Complex(0, std::sqrt(2.0) * pi);
  json problem_json{
      {"schema_version", 1},
      {"kind", "semigroup"},
      {"payload",
       {{"A", io::to_json(Matrix(d.asDiagonal()))},
        {"times", {{{"p", 1}, {"q", 1}, {"tag", "one"}},
                   {{"p", 1}, {"q", 1}, {"tag", "sqrt2"}}}}}}};
  json x_json = io::to_json(Vector(Vector::Ones(2)));

  io::SemigroupProblem sp = io::semigroup_from_payload(problem_json["payload"]);
  Vector x = io::vector_from(io::Cursor(x_json));
  SemigroupDecomposition out = semigroup_decompose(sp.spec, sp.times, x);
  io::Certificate cert =
      io::make_semigroup_certificate(problem_json, x_json, out);
  json doc = io::certificate_document(cert, io::to_json(out.reduced));
  CHECK(io::verify_certificate(doc, problem_json, &x_json).verified);
}
