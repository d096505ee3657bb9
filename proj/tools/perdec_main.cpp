// perdec: periodic decompositions of vectors, grid functions, and semigroup
// snapshots, with machine-checkable certificates.
//
// Exit codes: 0 accepted/verified, 2 rejected (precondition, hypothesis, or
// certificate failure), 1 usage/IO/schema error.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "perdec/certificate.hpp"

namespace {

using namespace perdec;
using perdec::io::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << doc.dump(2) << "\n";
}

double resolve_tol(const CLI::Option* flag, double flag_value,
                   const std::optional<double>& file_tol) {
  if (flag->count() > 0) return flag_value;
  if (file_tol) return *file_tol;
  if (const char* env = std::getenv("PERDEC_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return kDefaultDecompTol;
}

ProjectionMethod parse_mean(const std::string& mean) {
  if (mean == "exact") return ProjectionMethod::algebraic();
  if (mean.rfind("cesaro:", 0) == 0) {
    const long n = std::strtol(mean.c_str() + 7, nullptr, 10);
    if (n < 1) throw InvalidInput("--mean cesaro:N requires N >= 1");
    // Slow Cesaro convergence is expected in operator mode; acceptance is
    // decided by the produced defects, not the certificate threshold.
    return ProjectionMethod::cesaro(n, 1.0);
  }
  throw InvalidInput("--mean must be 'exact' or 'cesaro:N'");
}

void print_result_summary(const DecompositionResult& res) {
  std::cout << (res.accepted ? "ACCEPTED" : "REJECTED")
            << "  method=" << to_string(res.method) << "  tol=" << res.tol
            << "\n  sum_residual = " << res.sum_residual << "\n";
  for (std::size_t j = 0; j < res.invariance_defects.size(); ++j)
    std::cout << "  invariance[" << j + 1 << "] = " << res.invariance_defects[j]
              << "\n";
  if (res.projection_product_defect)
    std::cout << "  projection_product = " << *res.projection_product_defect
              << "\n";
}

int cmd_decompose(const std::string& problem_path, const std::string& x_path,
                  const CLI::Option* tol_flag, double tol_value,
                  const std::string& mean, const std::string& json_out,
                  bool use_oracle) {
  json problem_json = load_json(problem_path);
  json x_json = load_json(x_path);
  io::ProblemFile problem = io::problem_from(problem_json);
  if (problem.kind != io::ProblemKind::operator_family)
    throw InvalidInput("decompose expects kind=operator_family");

  OperatorFamily family = io::family_from_payload(
      problem.payload, problem.tolerances.comm_tol.value_or(-1.0));
  Vector x = io::vector_from(io::Cursor(x_json, "$x"));
  const double tol = resolve_tol(tol_flag, tol_value, problem.tolerances.tol);
  const double rank_tol = problem.tolerances.rank_tol.value_or(-1.0);

  DecompositionResult res =
      use_oracle ? decompose_oracle(family, x, tol, rank_tol)
                 : decompose_vector(family, x, tol, parse_mean(mean), rank_tol);
  print_result_summary(res);

  if (!json_out.empty()) {
    io::Certificate cert =
        io::make_family_certificate(problem_json, x_json, family, x, res);
    write_json(json_out, io::certificate_document(cert, io::to_json(res)));
  }
  return res.accepted ? 0 : 2;
}

int cmd_grid_decompose(const std::string& problem_path, const CLI::Option* tol_flag,
                       double tol_value, const std::string& json_out) {
  json problem_json = load_json(problem_path);
  io::ProblemFile problem = io::problem_from(problem_json);
  if (problem.kind != io::ProblemKind::grid_function)
    throw InvalidInput("grid-decompose expects kind=grid_function");

  GridFunction f = io::grid_function_from(io::Cursor(problem.payload, "$.payload"));
  const double tol = resolve_tol(tol_flag, tol_value, problem.tolerances.tol);
  DecompositionResult res = decompose_grid_function(f, tol);
  print_result_summary(res);
  std::cout << "  continuity_ratio(delta=1) = " << continuity_defect(f, res, 1)
            << "\n";

  if (!json_out.empty()) {
    io::Certificate cert = io::make_grid_certificate(problem_json, f, res);
    write_json(json_out, io::certificate_document(cert, io::to_json(res)));
  }
  return res.accepted ? 0 : 2;
}

int cmd_sg_decompose(const std::string& problem_path, const std::string& x_path,
                     const CLI::Option* tol_flag, double tol_value,
                     const std::string& json_out) {
  json problem_json = load_json(problem_path);
  json x_json = load_json(x_path);
  io::ProblemFile problem = io::problem_from(problem_json);
  if (problem.kind != io::ProblemKind::semigroup)
    throw InvalidInput("sg-decompose expects kind=semigroup");

  io::SemigroupProblem sp = io::semigroup_from_payload(problem.payload);
  Vector x = io::vector_from(io::Cursor(x_json, "$x"));
  const double tol = resolve_tol(tol_flag, tol_value, problem.tolerances.tol);
  const double rank_tol = problem.tolerances.rank_tol.value_or(kSnapshotRankTol);

  SemigroupDecomposition out =
      semigroup_decompose(sp.spec, sp.times, x, tol, sp.units, rank_tol);
  std::cout << "growth_bound = " << sp.spec.growth_bound
            << ", classes = " << out.plan.classes.size() << "\n";
  for (std::size_t c = 0; c < out.plan.classes.size(); ++c) {
    const auto& cls = out.plan.classes[c];
    std::cout << "  class " << c + 1 << ": s = " << cls.common.rational.str()
              << " * " << cls.common.tag << " = " << cls.common.numeric
              << ", merges times";
    for (std::size_t k = 0; k < cls.members.size(); ++k)
      std::cout << " t" << cls.members[k] + 1 << " (m=" << cls.multipliers[k]
                << ")";
    std::cout << "\n";
  }
  print_result_summary(out.reduced);

  if (!json_out.empty()) {
    io::Certificate cert =
        io::make_semigroup_certificate(problem_json, x_json, out);
    write_json(json_out,
               io::certificate_document(cert, io::to_json(out.reduced),
                                        json{{"plan", io::to_json(out.plan)},
                                             {"original_time_defects",
                                              out.original_time_defects}}));
  }
  return out.reduced.accepted ? 0 : 2;
}

int cmd_check(const std::string& problem_path, const std::string& x_path,
              const CLI::Option* tol_flag, double tol_value) {
  json problem_json = load_json(problem_path);
  io::ProblemFile problem = io::problem_from(problem_json);
  const double tol = resolve_tol(tol_flag, tol_value, problem.tolerances.tol);

  if (problem.kind == io::ProblemKind::grid_function) {
    GridFunction f = io::grid_function_from(io::Cursor(problem.payload, "$.payload"));
    const double defect = grid_difference_defect(f);
    std::cout << "grid difference defect = " << defect << " (tol " << tol << ")\n";
    return defect <= tol ? 0 : 2;
  }

  if (x_path.empty()) throw InvalidInput("check: this problem kind needs X.json");
  json x_json = load_json(x_path);
  Vector x = io::vector_from(io::Cursor(x_json, "$x"));

  OperatorFamily family =
      problem.kind == io::ProblemKind::operator_family
          ? io::family_from_payload(problem.payload,
                                    problem.tolerances.comm_tol.value_or(-1.0))
          : [&] {
              io::SemigroupProblem sp = io::semigroup_from_payload(problem.payload);
              std::vector<Matrix> ops;
              for (const auto& t : sp.times) ops.push_back(sp.spec.at(t.numeric));
              return OperatorFamily::create(std::move(ops));
            }();

  const double defect = difference_defect(family, x);
  std::cout << "difference defect = " << defect << " (budget "
            << tol * x.norm() << ")\n"
            << "commutation defect = " << family.commutation_defect << "\n";
  return defect <= tol * x.norm() ? 0 : 2;
}

int cmd_reduce_periods(const std::string& arg, const std::string& json_out) {
  json j;
  if (!arg.empty() && arg.front() == '[') {
    try {
      j = json::parse(arg);
    } catch (const json::parse_error& e) {
      throw InvalidInput(std::string("malformed inline JSON: ") + e.what());
    }
  } else {
    j = load_json(arg);
  }
  UnitRegistry units;
  std::vector<PeriodSpec> times;
  io::Cursor list(j, "$");
  for (std::size_t i = 0; i < list.array_size(); ++i)
    times.push_back(io::period_from(list.item(i), units));

  ReductionPlan plan = reduce_periods(times, units);
  for (std::size_t c = 0; c < plan.classes.size(); ++c) {
    const auto& cls = plan.classes[c];
    std::cout << "class " << c + 1 << ": s = " << cls.common.rational.str()
              << " * " << cls.common.tag << " = " << cls.common.numeric << "\n";
    for (std::size_t k = 0; k < cls.members.size(); ++k)
      std::cout << "  t" << cls.members[k] + 1 << " * " << cls.multipliers[k]
                << " = s\n";
  }
  if (!json_out.empty()) write_json(json_out, io::to_json(plan));
  return 0;
}

int cmd_diagnose(const std::string& problem_path, const std::string& x_path,
                 double t_step, double horizon, double eps, double alpha,
                 double smt_t, const std::string& json_out) {
  json problem_json = load_json(problem_path);
  io::ProblemFile problem = io::problem_from(problem_json);
  if (problem.kind != io::ProblemKind::semigroup)
    throw InvalidInput("diagnose expects kind=semigroup");
  io::SemigroupProblem sp = io::semigroup_from_payload(problem.payload);

  json doc{{"schema_version", kSchemaVersion}};
  std::cout << "growth_bound = " << sp.spec.growth_bound
            << ", bounded = " << (sp.spec.bounded_flag ? "yes" : "no") << "\n";
  doc["growth_bound"] = sp.spec.growth_bound;
  doc["bounded"] = sp.spec.bounded_flag;

  auto curve = norm_continuity_defect(sp.spec);
  json curve_json = json::array();
  std::cout << "norm continuity defect curve:\n";
  for (const auto& p : curve) {
    std::cout << "  t = " << p.t << "  D = " << p.defect << "\n";
    curve_json.push_back(json{{"t", p.t}, {"D", p.defect}});
  }
  doc["norm_continuity"] = curve_json;

  if (smt_t > 0) {
    auto rep = peripheral_smt_check(sp.spec.A, smt_t, 1e-8);
    std::cout << "peripheral spectral mapping at t = " << smt_t << ": "
              << (rep.pass ? "pass" : "FAIL") << " (Hausdorff " << rep.hausdorff
              << ")\n";
    doc["peripheral_smt"] = json{{"t", smt_t},
                                 {"pass", rep.pass},
                                 {"hausdorff", rep.hausdorff},
                                 {"spectral_radius", rep.spectral_radius}};
  }

  if (alpha > 0) {
    auto rep = periodic_spectrum_check(sp.spec.A, alpha, 1e-8);
    std::cout << "periodic spectrum at alpha = " << alpha << ": "
              << (rep.pass ? "pass" : "FAIL") << "\n";
    doc["periodic_spectrum"] =
        json{{"alpha", alpha},
             {"pass", rep.pass},
             {"periodicity_defect", rep.periodicity_defect},
             {"offenders", rep.offenders.size()}};
  }

  if (!x_path.empty()) {
    Vector x = io::vector_from(io::Cursor(load_json(x_path), "$x"));
    auto rep = aap_orbit_diagnostic(sp.spec, x, t_step, horizon, eps);
    if (!rep.orbit_bounded) {
      std::cout << "orbit UNBOUNDED (max norm " << rep.max_norm
                << "); not asymptotically almost periodic\n";
    } else {
      std::cout << "orbit nets (eps = " << eps << "): discrete = "
                << rep.discrete_net << ", continuous = " << rep.continuous_net
                << ", window = " << rep.window_net << ", ratio = " << rep.ratio
                << "\n";
    }
    doc["aap_orbit"] = json{{"orbit_bounded", rep.orbit_bounded},
                            {"max_norm", rep.max_norm},
                            {"discrete_net", rep.discrete_net},
                            {"continuous_net", rep.continuous_net},
                            {"window_net", rep.window_net},
                            {"ratio", rep.ratio},
                            {"product_bound_holds", rep.product_bound_holds}};
  }

  if (!json_out.empty()) write_json(json_out, doc);
  return 0;
}

int cmd_verify_certificate(const std::string& cert_path,
                           const std::string& problem_path,
                           const std::string& x_path) {
  json cert = load_json(cert_path);
  json problem = load_json(problem_path);
  std::optional<json> x;
  if (!x_path.empty()) x = load_json(x_path);

  io::VerificationReport rep =
      io::verify_certificate(cert, problem, x ? &*x : nullptr);
  if (rep.verified) {
    std::cout << "certificate VERIFIED\n";
    return 0;
  }
  std::cout << "certificate verification FAILED:\n";
  for (const auto& f : rep.failures) std::cout << "  " << f << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic decompositions under commuting difference operators"};
  app.require_subcommand(1);

  std::string problem_path, x_path, json_out, mean = "exact", periods_arg;
  std::string cert_path;
  double tol_value = kDefaultDecompTol;
  bool use_oracle = false;
  double t_step = 1.0, horizon = 32.0, eps = 0.25, alpha = 0.0, smt_t = 0.0;

  auto* dec = app.add_subcommand("decompose", "decompose x under an operator family");
  dec->add_option("family", problem_path, "problem JSON (kind=operator_family)")
      ->required();
  dec->add_option("x", x_path, "input vector JSON")->required();
  auto* dec_tol = dec->add_option("--tol", tol_value, "acceptance tolerance");
  dec->add_option("--mean", mean, "projection method: exact | cesaro:N");
  dec->add_flag("--oracle", use_oracle, "use the least-squares oracle instead");
  dec->add_option("--json-out", json_out, "write certificate + result JSON");

  auto* grid = app.add_subcommand("grid-decompose",
                                  "decompose a sampled function on Z_N");
  grid->add_option("f", problem_path, "problem JSON (kind=grid_function)")
      ->required();
  auto* grid_tol = grid->add_option("--tol", tol_value, "acceptance tolerance");
  grid->add_option("--json-out", json_out, "write certificate + result JSON");

  auto* sg = app.add_subcommand("sg-decompose",
                                "decompose x under semigroup snapshots T(t_j)");
  sg->add_option("sg", problem_path, "problem JSON (kind=semigroup)")->required();
  sg->add_option("x", x_path, "input vector JSON")->required();
  auto* sg_tol = sg->add_option("--tol", tol_value, "acceptance tolerance");
  sg->add_option("--json-out", json_out, "write certificate + result JSON");

  auto* check = app.add_subcommand("check", "verify the difference equation only");
  check->add_option("problem", problem_path, "problem JSON")->required();
  check->add_option("x", x_path, "input vector JSON (not for grid problems)");
  auto* check_tol = check->add_option("--tol", tol_value, "tolerance");

  auto* reduce = app.add_subcommand("reduce-periods",
                                    "reduce times to pairwise incommensurable ones");
  reduce->add_option("periods", periods_arg, "inline JSON array or file path")
      ->required();
  reduce->add_option("--json-out", json_out, "write the reduction plan JSON");

  auto* diag = app.add_subcommand("diagnose", "semigroup diagnostics");
  diag->alias("sg-diagnose");
  diag->add_option("sg", problem_path, "problem JSON (kind=semigroup)")->required();
  diag->add_option("--x", x_path, "vector JSON for the orbit diagnostic");
  diag->add_option("--t-step", t_step, "discrete orbit step");
  diag->add_option("--horizon", horizon, "orbit horizon");
  diag->add_option("--eps", eps, "net radius");
  diag->add_option("--alpha", alpha, "run the periodic-spectrum check at alpha");
  diag->add_option("--smt-t", smt_t, "run the peripheral spectral-mapping check at t");
  diag->add_option("--json-out", json_out, "write diagnostics JSON");

  auto* verify = app.add_subcommand("verify-certificate",
                                    "recompute a certificate from the inputs");
  verify->add_option("certificate", cert_path, "certificate JSON")->required();
  verify->add_option("problem", problem_path, "original problem JSON")->required();
  verify->add_option("x", x_path, "original vector JSON (if the problem had one)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dec->parsed())
      return cmd_decompose(problem_path, x_path, dec_tol, tol_value, mean,
                           json_out, use_oracle);
    if (grid->parsed())
      return cmd_grid_decompose(problem_path, grid_tol, tol_value, json_out);
    if (sg->parsed())
      return cmd_sg_decompose(problem_path, x_path, sg_tol, tol_value, json_out);
    if (check->parsed())
      return cmd_check(problem_path, x_path, check_tol, tol_value);
    if (reduce->parsed()) return cmd_reduce_periods(periods_arg, json_out);
    if (diag->parsed())
      return cmd_diagnose(problem_path, x_path, t_step, horizon, eps, alpha,
                          smt_t, json_out);
    if (verify->parsed())
      return cmd_verify_certificate(cert_path, problem_path, x_path);
  } catch (const SchemaError& e) {
    std::cerr << "schema violation at " << e.what() << "\n";
    return 1;
  } catch (const PreconditionViolation& e) {
    std::cout << "REJECTED: " << e.what() << "\n  defect = " << e.defect << "\n";
    return 2;
  } catch (const TamperError& e) {
    std::cout << "REJECTED: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisViolation& e) {
    std::cout << "REJECTED: " << e.what() << "\n";
    return 2;
  } catch (const NotPeriodic& e) {
    std::cout << "REJECTED: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cout << "REJECTED: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
