#pragma once

#include <string_view>

#include "perdec/json_io.hpp"

namespace perdec::io {

/// FNV-1a 64-bit over the canonical (parsed and re-dumped) input text.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

/// Canonical digest of a problem plus an optional separate input vector.
inline std::string input_digest(const json& problem, const json* x = nullptr) {
  std::string text = problem.dump();
  if (x != nullptr) {
    text += '\n';
    text += x->dump();
  }
  return digest_hex(text);
}

/// Machine-checkable acceptance record: every defect the acceptance logic
/// consumed, the tolerances it was compared against, and a digest binding it
/// to the inputs. A verifier recomputes everything from scratch.
struct Certificate {
  bool accepted = false;
  json defects;     // named defect values
  std::string method;
  std::string tool_version = kToolVersion;
  std::string digest;
  json tolerances;  // named tolerance values

  json to_json() const {
    return json{{"accepted", accepted},       {"defects", defects},
                {"method", method},           {"tool_version", tool_version},
                {"input_digest", digest},     {"tolerances", tolerances}};
  }
};

inline json certificate_document(const Certificate& cert, const json& result,
                                 const json& extra = json::object()) {
  json doc{{"schema_version", kSchemaVersion},
           {"certificate", cert.to_json()},
           {"result", result}};
  for (const auto& [k, v] : extra.items()) doc[k] = v;
  return doc;
}

// --- certificate construction ---------------------------------------------

inline Certificate make_family_certificate(const json& problem, const json& x_json,
                                           const OperatorFamily& family,
                                           const Vector& x,
                                           const DecompositionResult& res) {
  Certificate cert;
  cert.accepted = res.accepted;
  cert.method = perdec::to_string(res.method);
  cert.digest = input_digest(problem, &x_json);
  cert.defects = json{{"difference", difference_defect(family, x)},
                      {"commutation", family.commutation_defect},
                      {"sum_residual", res.sum_residual},
                      {"invariance", res.invariance_defects}};
  if (res.projection_product_defect)
    cert.defects["projection_product"] = *res.projection_product_defect;
  if (res.projection_commutation_defect)
    cert.defects["projection_commutation"] = *res.projection_commutation_defect;
  cert.tolerances = json{{"tol", res.tol}, {"comm_tol", family.comm_tol}};
  return cert;
}

inline Certificate make_grid_certificate(const json& problem, const GridFunction& f,
                                         const DecompositionResult& res) {
  Certificate cert;
  cert.accepted = res.accepted;
  cert.method = perdec::to_string(res.method);
  cert.digest = input_digest(problem);
  cert.defects = json{{"difference", grid_difference_defect(f)},
                      {"sum_residual", res.sum_residual},
                      {"invariance", res.invariance_defects}};
  cert.tolerances = json{{"tol", res.tol}};
  return cert;
}

inline Certificate make_semigroup_certificate(const json& problem, const json& x_json,
                                              const SemigroupDecomposition& out) {
  Certificate cert;
  cert.accepted = out.reduced.accepted;
  cert.method = perdec::to_string(out.reduced.method);
  cert.digest = input_digest(problem, &x_json);
  cert.defects = json{{"difference", out.difference_defect},
                      {"sum_residual", out.reduced.sum_residual},
                      {"invariance", out.reduced.invariance_defects},
                      {"original_time", out.original_time_defects}};
  if (out.reduced.projection_product_defect)
    cert.defects["projection_product"] = *out.reduced.projection_product_defect;
  cert.tolerances = json{{"tol", out.reduced.tol}};
  return cert;
}

// --- verification -----------------------------------------------------------

/// Defect recomputation agreement: absolute for small values, relative for
/// large ones.
inline bool defect_matches(double recomputed, double stored) {
  return std::abs(recomputed - stored) <= 1e-12 * (1.0 + std::abs(stored));
}

struct VerificationReport {
  bool verified = false;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

namespace detail {

inline void verify_decomposition_defects(const std::vector<Matrix>& ops,
                                         const Vector& x,
                                         const DecompositionResult& res,
                                         const json& stored_defects,
                                         VerificationReport& rep) {
  Cursor defects(stored_defects, "$.certificate.defects");
  Vector sum = Vector::Zero(x.size());
  for (const auto& c : res.components) sum += c;
  rep.require(defect_matches((x - sum).norm(), defects.at("sum_residual").number()),
              "sum_residual mismatch");

  Cursor inv = defects.at("invariance");
  if (inv.array_size() != res.components.size())
    rep.require(false, "invariance defect count mismatch");
  for (std::size_t j = 0; j < res.components.size() && j < inv.array_size(); ++j) {
    const double d = (ops[j] * res.components[j] - res.components[j]).norm();
    rep.require(defect_matches(d, inv.item(j).number()),
                "invariance defect mismatch at component " + std::to_string(j));
  }

  // Acceptance logic must be recomputable from the stored defects.
  const double budget = res.tol * x.norm();
  bool accepted = defects.at("sum_residual").number() <= budget;
  for (std::size_t j = 0; j < inv.array_size(); ++j)
    accepted = accepted && inv.item(j).number() <= budget;
  rep.require(accepted == res.accepted, "acceptance flag does not follow from defects");
}

}  // namespace detail

/// Recomputes every defect in a certificate document from the original
/// inputs and the certified components, and checks the acceptance logic.
/// Digest mismatch throws TamperError.
inline VerificationReport verify_certificate(const json& certificate_doc,
                                             const json& problem_json,
                                             const json* x_json = nullptr) {
  Cursor doc(certificate_doc);
  Cursor cert = doc.at("certificate");
  VerificationReport rep;

  const std::string expected = cert.at("input_digest").string();
  if (expected != input_digest(problem_json, x_json))
    throw TamperError("verify_certificate: input digest mismatch (certificate "
                      "claims " + expected + ")");

  ProblemFile problem = problem_from(problem_json);
  DecompositionResult res = result_from(doc.at("result"));
  const json& defects = cert.at("defects").raw();

  switch (problem.kind) {
    case ProblemKind::operator_family: {
      if (x_json == nullptr)
        throw InvalidInput("verify_certificate: operator_family needs the input vector");
      OperatorFamily fam = family_from_payload(problem.payload);
      Vector x = vector_from(Cursor(*x_json, "$x"));
      rep.require(defect_matches(difference_defect(fam, x),
                                 Cursor(defects, "$.certificate.defects")
                                     .at("difference")
                                     .number()),
                  "difference defect mismatch");
      detail::verify_decomposition_defects(fam.ops, x, res, defects, rep);
      break;
    }
    case ProblemKind::grid_function: {
      GridFunction f = grid_function_from(Cursor(problem.payload, "$.payload"));
      rep.require(defect_matches(grid_difference_defect(f),
                                 Cursor(defects, "$.certificate.defects")
                                     .at("difference")
                                     .number()),
                  "difference defect mismatch");
      std::vector<Matrix> shifts;
      for (int a : f.shifts) shifts.push_back(koopman_shift_matrix(f.N, a));
      detail::verify_decomposition_defects(shifts, f.values, res, defects, rep);
      break;
    }
    case ProblemKind::semigroup: {
      if (x_json == nullptr)
        throw InvalidInput("verify_certificate: semigroup needs the input vector");
      SemigroupProblem sp = semigroup_from_payload(problem.payload);
      Vector x = vector_from(Cursor(*x_json, "$x"));
      std::vector<Matrix> originals;
      for (const auto& t : sp.times) originals.push_back(sp.spec.at(t.numeric));
      OperatorFamily unreduced = OperatorFamily::create(originals);
      rep.require(defect_matches(difference_defect(unreduced, x),
                                 Cursor(defects, "$.certificate.defects")
                                     .at("difference")
                                     .number()),
                  "difference defect mismatch");
      ReductionPlan plan = reduce_periods(sp.times, sp.units);
      std::vector<Matrix> reduced;
      for (const auto& c : plan.classes) reduced.push_back(sp.spec.at(c.common.numeric));
      detail::verify_decomposition_defects(reduced, x, res, defects, rep);
      break;
    }
  }

  rep.verified = rep.failures.empty();
  return rep;
}

}  // namespace perdec::io
