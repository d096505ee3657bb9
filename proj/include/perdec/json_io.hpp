#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "perdec/grid.hpp"
#include "perdec/onepar.hpp"
#include "perdec/version.hpp"

namespace perdec::io {

using nlohmann::json;

/// Structural JSON accessor that tracks its path and reports the first
/// violation as "$.payload.N: expected ...".
class Cursor {
 public:
  Cursor(const json& j, std::string path = "$") : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError(path_, msg);
  }

  Cursor at(const std::string& key) const {
    if (!j_->is_object()) fail("expected object");
    auto it = j_->find(key);
    if (it == j_->end()) fail("missing required key '" + key + "'");
    return Cursor(*it, path_ + "." + key);
  }

  std::optional<Cursor> maybe(const std::string& key) const {
    if (!j_->is_object()) fail("expected object");
    auto it = j_->find(key);
    if (it == j_->end()) return std::nullopt;
    return Cursor(*it, path_ + "." + key);
  }

  std::size_t array_size() const {
    if (!j_->is_array()) fail("expected array");
    return j_->size();
  }

  Cursor item(std::size_t i) const {
    if (!j_->is_array()) fail("expected array");
    if (i >= j_->size()) fail("missing array element " + std::to_string(i));
    return Cursor((*j_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  double number() const {
    if (!j_->is_number()) fail("expected number");
    return j_->get<double>();
  }

  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail("expected integer");
    return j_->get<std::int64_t>();
  }

  std::int64_t positive_integer() const {
    const auto v = integer();
    if (v <= 0) fail("expected positive integer");
    return v;
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected string");
    return j_->get<std::string>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected boolean");
    return j_->get<bool>();
  }

 private:
  const json* j_;
  std::string path_;
};

// --- matrices and vectors ---------------------------------------------------
// Matrix: {"dim": n, "re": [[...]], "im": [[...]]} row-major.
// Vector: {"re": [...], "im": [...]}.

inline json to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from(const Cursor& c) {
  const auto dim = c.at("dim").positive_integer();
  Cursor re = c.at("re"), im = c.at("im");
  if (static_cast<std::int64_t>(re.array_size()) != dim)
    re.fail("expected " + std::to_string(dim) + " rows");
  if (static_cast<std::int64_t>(im.array_size()) != dim)
    im.fail("expected " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    Cursor row_re = re.item(i), row_im = im.item(i);
    if (static_cast<std::int64_t>(row_re.array_size()) != dim)
      row_re.fail("expected " + std::to_string(dim) + " columns");
    if (static_cast<std::int64_t>(row_im.array_size()) != dim)
      row_im.fail("expected " + std::to_string(dim) + " columns");
    for (std::int64_t j = 0; j < dim; ++j)
      m(i, j) = Complex(row_re.item(j).number(), row_im.item(j).number());
  }
  if (!m.allFinite()) c.fail("matrix entries must be finite");
  return m;
}

inline json to_json(const Vector& v) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Vector vector_from(const Cursor& c) {
  Cursor re = c.at("re"), im = c.at("im");
  if (re.array_size() != im.array_size()) im.fail("re/im length mismatch");
  Vector v(static_cast<Index>(re.array_size()));
  for (std::size_t i = 0; i < re.array_size(); ++i)
    v(static_cast<Index>(i)) = Complex(re.item(i).number(), im.item(i).number());
  if (!v.allFinite()) c.fail("vector entries must be finite");
  return v;
}

// --- domain payloads ---------------------------------------------------------

inline json to_json(const GridFunction& f) {
  json re = json::array(), im = json::array(), shifts = json::array();
  for (Index i = 0; i < f.values.size(); ++i) {
    re.push_back(f.values(i).real());
    im.push_back(f.values(i).imag());
  }
  for (int a : f.shifts) shifts.push_back(a);
  return json{{"N", f.N},
              {"values_re", std::move(re)},
              {"values_im", std::move(im)},
              {"shifts", std::move(shifts)}};
}

inline GridFunction grid_function_from(const Cursor& c) {
  const auto n = c.at("N").positive_integer();
  Cursor re = c.at("values_re"), im = c.at("values_im"), sh = c.at("shifts");
  if (static_cast<std::int64_t>(re.array_size()) != n)
    re.fail("expected N sample values");
  if (static_cast<std::int64_t>(im.array_size()) != n)
    im.fail("expected N sample values");
  Vector v(n);
  for (std::int64_t i = 0; i < n; ++i)
    v(i) = Complex(re.item(i).number(), im.item(i).number());
  std::vector<int> shifts;
  for (std::size_t i = 0; i < sh.array_size(); ++i)
    shifts.push_back(static_cast<int>(sh.item(i).integer()));
  if (shifts.empty()) sh.fail("at least one shift required");
  return GridFunction::create(static_cast<int>(n), std::move(v), std::move(shifts));
}

inline json to_json(const PeriodSpec& t) {
  return json{{"p", t.rational.num}, {"q", t.rational.den}, {"tag", t.tag}};
}

inline PeriodSpec period_from(const Cursor& c, const UnitRegistry& units) {
  return PeriodSpec::create(c.at("p").positive_integer(),
                            c.at("q").positive_integer(), c.at("tag").string(),
                            units);
}

inline UnitRegistry units_from(const std::optional<Cursor>& c) {
  UnitRegistry units;
  if (!c) return units;
  if (!c->raw().is_object()) c->fail("expected object of unit values");
  for (const auto& [tag, value] : c->raw().items()) {
    if (!value.is_number())
      throw SchemaError(c->path() + "." + tag, "expected number");
    units.define(tag, value.get<double>());
  }
  return units;
}

// --- problem files ------------------------------------------------------------

enum class ProblemKind { operator_family, grid_function, semigroup };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::operator_family: return "operator_family";
    case ProblemKind::grid_function: return "grid_function";
    default: return "semigroup";
  }
}

struct Tolerances {
  std::optional<double> tol;
  std::optional<double> comm_tol;
  std::optional<double> cluster_tol;
  std::optional<double> rank_tol;
};

struct ProblemFile {
  int schema_version = kSchemaVersion;
  ProblemKind kind = ProblemKind::operator_family;
  json payload;
  Tolerances tolerances;
};

inline ProblemFile problem_from(const json& j) {
  Cursor root(j);
  ProblemFile p;
  p.schema_version = static_cast<int>(root.at("schema_version").positive_integer());
  if (p.schema_version != kSchemaVersion)
    root.at("schema_version").fail("unsupported schema version");
  const std::string kind = root.at("kind").string();
  if (kind == "operator_family") p.kind = ProblemKind::operator_family;
  else if (kind == "grid_function") p.kind = ProblemKind::grid_function;
  else if (kind == "semigroup") p.kind = ProblemKind::semigroup;
  else root.at("kind").fail("expected one of operator_family|grid_function|semigroup");
  p.payload = root.at("payload").raw();
  if (auto t = root.maybe("tolerances")) {
    if (auto v = t->maybe("tol")) p.tolerances.tol = v->number();
    if (auto v = t->maybe("comm_tol")) p.tolerances.comm_tol = v->number();
    if (auto v = t->maybe("cluster_tol")) p.tolerances.cluster_tol = v->number();
    if (auto v = t->maybe("rank_tol")) p.tolerances.rank_tol = v->number();
  }
  return p;
}

inline OperatorFamily family_from_payload(const json& payload, double comm_tol = -1.0) {
  Cursor c(payload, "$.payload");
  Cursor ops = c.at("ops");
  std::vector<Matrix> members;
  for (std::size_t i = 0; i < ops.array_size(); ++i)
    members.push_back(matrix_from(ops.item(i)));
  if (members.empty()) ops.fail("at least one operator required");
  if (auto d = c.maybe("dim")) {
    const auto dim = d->positive_integer();
    if (dim != members.front().rows()) d->fail("dim does not match operators");
  }
  return OperatorFamily::create(std::move(members), comm_tol);
}

struct SemigroupProblem {
  SemigroupSpec spec;
  std::vector<PeriodSpec> times;
  UnitRegistry units;
};

inline SemigroupProblem semigroup_from_payload(const json& payload) {
  Cursor c(payload, "$.payload");
  SemigroupProblem p;
  p.units = units_from(c.maybe("units"));
  p.spec = SemigroupSpec::create(matrix_from(c.at("A")));
  Cursor times = c.at("times");
  for (std::size_t i = 0; i < times.array_size(); ++i)
    p.times.push_back(period_from(times.item(i), p.units));
  if (p.times.empty()) times.fail("at least one time required");
  return p;
}

// --- results -------------------------------------------------------------------

inline json to_json(const DecompositionResult& r) {
  json components = json::array();
  for (const auto& c : r.components) components.push_back(to_json(c));
  json defects{{"sum_residual", r.sum_residual},
               {"invariance", r.invariance_defects}};
  if (r.projection_product_defect)
    defects["projection_product"] = *r.projection_product_defect;
  if (r.projection_commutation_defect)
    defects["projection_commutation"] = *r.projection_commutation_defect;
  return json{{"components", std::move(components)},
              {"defects", std::move(defects)},
              {"method", perdec::to_string(r.method)},
              {"accepted", r.accepted},
              {"tol", r.tol},
              {"input_norm", r.input_norm}};
}

inline DecompositionResult result_from(const Cursor& c) {
  DecompositionResult r;
  Cursor comps = c.at("components");
  for (std::size_t i = 0; i < comps.array_size(); ++i)
    r.components.push_back(vector_from(comps.item(i)));
  Cursor defects = c.at("defects");
  r.sum_residual = defects.at("sum_residual").number();
  Cursor inv = defects.at("invariance");
  for (std::size_t i = 0; i < inv.array_size(); ++i)
    r.invariance_defects.push_back(inv.item(i).number());
  if (auto d = defects.maybe("projection_product"))
    r.projection_product_defect = d->number();
  if (auto d = defects.maybe("projection_commutation"))
    r.projection_commutation_defect = d->number();
  const std::string method = c.at("method").string();
  if (method == "inclusion_exclusion") r.method = DecompMethod::inclusion_exclusion;
  else if (method == "oracle") r.method = DecompMethod::oracle;
  else c.at("method").fail("unknown method tag");
  r.accepted = c.at("accepted").boolean();
  r.tol = c.at("tol").number();
  r.input_norm = c.at("input_norm").number();
  return r;
}

inline json to_json(const ReductionPlan& plan) {
  json classes = json::array();
  for (const auto& c : plan.classes) {
    json members = json::array(), mult = json::array();
    for (int m : c.members) members.push_back(m);
    for (auto m : c.multipliers) mult.push_back(m);
    classes.push_back(json{{"members", std::move(members)},
                           {"common", to_json(c.common)},
                           {"common_numeric", c.common.numeric},
                           {"multipliers", std::move(mult)}});
  }
  json reduced = json::array();
  for (const auto& t : plan.reduced_times) reduced.push_back(to_json(t));
  return json{{"classes", std::move(classes)}, {"reduced_times", std::move(reduced)}};
}

inline json to_json(const SemigroupDecomposition& s) {
  return json{{"result", to_json(s.reduced)},
              {"plan", to_json(s.plan)},
              {"difference_defect", s.difference_defect},
              {"original_time_defects", s.original_time_defects}};
}

inline json to_json(const ProjectionReport& p) {
  return json{{"P", to_json(p.P)},
              {"idempotency_defect", p.idempotency_defect},
              {"zero_element_defect", p.zero_element_defect},
              {"range_dim", p.range.dim()},
              {"method", p.method == ProjectionMethod::Kind::algebraic
                             ? "algebraic"
                             : "cesaro"},
              {"tol", p.tol},
              {"cesaro_certificate", p.cesaro_certificate},
              {"cesaro_N", p.cesaro_n}};
}

}  // namespace perdec::io
