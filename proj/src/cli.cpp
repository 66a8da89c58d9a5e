#include "nilgeom/cli.hpp"

#include "nilgeom/connections.hpp"
#include "nilgeom/errors.hpp"
#include "nilgeom/model_io.hpp"
#include "nilgeom/report.hpp"
#include "nilgeom/symmetrize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace nilgeom::cli {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string catalog;
  std::string file;
  std::optional<double> s, t;
  std::optional<int> dim;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int restarts = 100;
  std::string json_path;
};

struct ScanArgs {
  std::string family;
  std::string which;
  std::string s_range = "1";
  std::string t_range = "1";
};

struct DemoArgs {
  std::string model = "iwasawa";
  int grid = 16;
  std::string perturbation = "trig";
};

void add_model_options(CLI::App *sub, Common &c) {
  auto *cat = sub->add_option("--catalog", c.catalog, "Catalog model (n3, gt, gst, complex_heisenberg, abelian)");
  auto *file = sub->add_option("--file", c.file, "Model file (JSON)");
  cat->excludes(file);
  sub->add_option("--s", c.s, "Parameter s of gst");
  sub->add_option("--t", c.t, "Parameter t of gt / gst");
  sub->add_option("--dim", c.dim, "Dimension of the abelian model");
}

void add_run_options(CLI::App *sub, Common &c) {
  sub->add_option("--tol", c.tol, "Tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Seed for randomized searches");
  sub->add_option("--restarts", c.restarts, "Multi-start restarts")->check(CLI::NonNegativeNumber);
  sub->add_option("--json", c.json_path, "Write the JSON report to this path ('-' for stdout)");
}

Model resolve_model(const Common &c) {
  if (c.catalog.empty() == c.file.empty())
    throw UsageError("exactly one of --catalog or --file is required");
  if (!c.file.empty())
    return load_model(c.file);
  std::map<std::string, double> params;
  if (c.s)
    params["s"] = *c.s;
  if (c.t)
    params["t"] = *c.t;
  if (c.dim)
    params["dim"] = *c.dim;
  try {
    return catalog(c.catalog, params);
  } catch (const MalformedInput &e) {
    throw UsageError(e.what());
  }
}

nlohmann::json model_summary(const Model &m) {
  nlohmann::json doc;
  doc["name"] = m.name;
  doc["params"] = m.params;
  doc["dim"] = m.algebra.dim();
  return doc;
}

FeasibilityOptions feasibility_options(const Common &c) {
  FeasibilityOptions o;
  o.restarts = c.restarts;
  o.tol = c.tol;
  o.seed = c.seed;
  return o;
}

double d_squared_residual(const LieAlgebra &alg) {
  double worst = 0.0;
  const int n = alg.dim();
  for (int k = 0; k + 2 <= n; ++k)
    worst = std::max(worst, (d_matrix(alg, k + 1) * d_matrix(alg, k)).cwiseAbs().maxCoeff());
  return worst;
}

nlohmann::json run_check(const Model &m, const Common &c) {
  nlohmann::json doc;
  const auto rep = validate(m.algebra);
  const double d2 = d_squared_residual(m.algebra);
  doc["jacobi_residual"] = rep.jacobi_residual;
  doc["d_squared_residual"] = d2;
  doc["nilpotency_step"] = rep.nilpotency_step ? nlohmann::json(*rep.nilpotency_step) : nlohmann::json(nullptr);
  doc["unimodular"] = rep.unimodular;
  doc["betti1"] = rep.betti1;
  doc["lower_central_series"] = rep.lower_central_series;
  nlohmann::json checks;
  checks["jacobi"] = rep.jacobi_residual < 1e-12;
  checks["d_squared"] = d2 < 1e-12;

  if (m.j) {
    nlohmann::json cx;
    const double sq = ((*m.j) * (*m.j) + Endomorphism::Identity(m.algebra.dim(), m.algebra.dim()))
                          .cwiseAbs()
                          .maxCoeff();
    cx["square_residual"] = sq;
    if (sq <= 1e-9) {
      const double nij = nijenhuis(m.algebra, *m.j).max_abs;
      cx["nijenhuis"] = nij;
      checks["integrable"] = nij < 1e-12;
      if (nij < 1e-9) {
        const auto hv = holomorphic_volume_check(m.algebra, *m.j, c.tol);
        cx["holomorphic_volume_residual"] = hv.residual;
        cx["holomorphic_volume_closed"] = hv.closed;
      }
    } else {
      checks["integrable"] = false;
    }
    doc["complex_structure"] = cx;
  }
  if (m.has_triple()) {
    nlohmann::json hc;
    const auto h = hypercomplex_check(m.algebra, *m.j, *m.j2);
    hc["quaternion_residual"] = h.quaternion_residual;
    hc["integrability"] = h.integrability;
    checks["hypercomplex"] = h.max_residual() < 1e-12;
    if (h.max_residual() < 1e-9) {
      const auto ab = is_abelian(m.algebra, m.triple(), c.tol);
      hc["abelian"] = ab.abelian;
      hc["abelian_residual"] = ab.max_residual;
    }
    doc["hypercomplex"] = hc;
  }
  if (m.metric) {
    const Metric g(*m.metric);
    nlohmann::json mt;
    mt["min_eigenvalue"] = g.min_eigenvalue();
    if (m.j)
      mt["compatibility_residual"] = g.compatibility_residual(*m.j);
    checks["metric_positive"] = g.is_positive_definite();
    doc["metric"] = mt;
  }
  doc["checks"] = checks;
  return doc;
}

nlohmann::json run_ricci(const Model &m, bool eq2_only, double tol, const Common &c, int samples) {
  if (!m.j)
    throw PreconditionError("model has no complex structure");
  const Metric g(m.metric_or_identity());
  const auto rel = verify_ricci_relation(m.algebra, g, *m.j);
  nlohmann::json doc;
  doc["residual"] = rel.residual;
  if (!eq2_only) {
    doc["ricci_bismut"] = form_to_json(rel.ricci_bismut);
    doc["ricci_chern"] = form_to_json(rel.ricci_chern);
    doc["d_delta_f"] = form_to_json(rel.d_delta_f);
  }
  double worst = rel.residual;
  if (samples > 0) {
    std::mt19937_64 rng(c.seed);
    const std::vector<Endomorphism> js{*m.j};
    auto rs = nlohmann::json::array();
    for (int i = 0; i < samples; ++i) {
      const Metric gi(random_compatible_metric(js, m.algebra.dim(), rng));
      const double r = verify_ricci_relation(m.algebra, gi, *m.j).residual;
      rs.push_back(r);
      worst = std::max(worst, r);
    }
    doc["random_residuals"] = rs;
  }
  doc["max_residual"] = worst;
  doc["tolerance"] = tol;
  if (eq2_only && !(worst < tol))
    throw IntegrityError("Ricci relation violated", worst);
  return doc;
}

double clean(double v) {
  const double r = std::round(v * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

nlohmann::json run_scan(const ScanArgs &a, const Common &c) {
  ScanKind kind;
  if (a.which == "hkt")
    kind = ScanKind::hkt;
  else if (a.which == "balanced")
    kind = ScanKind::balanced;
  else
    throw UsageError("--which must be hkt or balanced");
  if (a.family != "gt" && a.family != "gst")
    throw UsageError("--family must be gt or gst");
  std::vector<std::map<std::string, double>> grid;
  const auto ts = parse_range(a.t_range);
  if (a.family == "gt") {
    for (double t : ts)
      grid.push_back({{"t", t}});
  } else {
    for (double s : parse_range(a.s_range))
      for (double t : ts)
        grid.push_back({{"s", s}, {"t", t}});
  }
  const auto rows = family_scan(a.family, grid, kind, feasibility_options(c));
  nlohmann::json doc;
  doc["family"] = a.family;
  doc["which"] = a.which;
  auto out = nlohmann::json::array();
  for (const auto &r : rows) {
    nlohmann::json row = verdict_to_json(r.verdict);
    row["params"] = r.params;
    out.push_back(row);
  }
  doc["rows"] = out;
  return doc;
}

nlohmann::json run_demo(const DemoArgs &a) {
  if (a.perturbation != "trig" && a.perturbation != "none")
    throw UsageError("--perturbation must be trig or none");
  if (a.grid < 1)
    throw UsageError("--grid must be positive");
  const Model m = catalog(a.model, a.model == "abelian" ? std::map<std::string, double>{{"dim", 6}}
                                                        : std::map<std::string, double>{});
  const NilmanifoldChart chart(m.algebra);
  const int n = chart.dim();
  const bool trig = a.perturbation == "trig";
  constexpr double tp = 2.0 * std::numbers::pi;

  // omega = (1 + p_0) e^{n-1} + p_1 e^1 + p_2 e^n with smooth periodic p_i.
  FieldForm omega;
  omega.dim = n;
  omega.degree = 1;
  omega.coefficients = [n, trig](const Eigen::VectorXd &x) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(n - 2) = 1.0;
    if (trig) {
      c(n - 2) += 0.3 * std::exp(std::cos(tp * x(0) + 0.3)) * std::sin(tp * x(2 % n));
      c(0) += 0.2 * std::exp(std::sin(tp * x(1 % n) + 0.7) + std::cos(tp * x(n - 2)));
      c(n - 1) += 0.1 * std::cos(tp * x(3 % n)) * std::exp(std::cos(tp * x(n - 1) + 1.1));
    }
    return c;
  };
  FieldMetric g;
  g.dim = n;
  g.g = [n, trig](const Eigen::VectorXd &x) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    if (trig) {
      m *= 1.0 + 0.5 * std::sin(tp * x(1 % n));
      m(0, 1) = m(1, 0) = 0.2 * std::cos(tp * x(0));
    }
    return m;
  };

  QuadratureSpec q;
  q.points_per_axis = a.grid;
  const auto commute = check_average_commutes_d(chart, omega, q);
  const Metric avg_g = average_metric(chart, g, q);

  nlohmann::json doc;
  doc["grid"] = a.grid;
  doc["nodes"] = std::pow(static_cast<double>(a.grid), n);
  doc["perturbation"] = a.perturbation;
  doc["average_form"] = form_to_json(average_form(chart, omega, q));
  doc["d_of_average"] = form_to_json(commute.d_of_average);
  doc["average_of_d"] = form_to_json(commute.average_of_d);
  doc["commute_residual"] = commute.residual;
  doc["average_metric"] = matrix_to_json(avg_g.matrix());
  doc["average_metric_min_eigenvalue"] = avg_g.min_eigenvalue();
  return doc;
}

void print_value(std::ostream &out, const nlohmann::json &v, int indent);

void print_object(std::ostream &out, const nlohmann::json &obj, int indent) {
  for (const auto &[key, v] : obj.items()) {
    out << std::string(static_cast<std::size_t>(indent), ' ') << key << ":";
    if (v.is_object()) {
      out << "\n";
      print_object(out, v, indent + 2);
    } else {
      out << " ";
      print_value(out, v, indent);
      out << "\n";
    }
  }
}

void print_value(std::ostream &out, const nlohmann::json &v, int) {
  if (v.is_string())
    out << v.get<std::string>();
  else
    out << v.dump();
}

void print_human(std::ostream &out, const Report &r) {
  const auto &b = r.body;
  out << "nilgeom " << r.version << " " << r.subcommand << "\n";
  if (r.subcommand == "scan") {
    out << std::left << std::setw(28) << "params" << std::setw(26) << "status" << "evidence\n";
    for (const auto &row : b["rows"]) {
      std::ostringstream p;
      for (const auto &[k, v] : row["params"].items())
        p << k << "=" << v.get<double>() << " ";
      const bool bal = b["which"] == "balanced";
      std::ostringstream ev;
      if (bal)
        ev << "objective=" << row["best_objective"].get<double>();
      else
        ev << "lambda_min=" << row["best_lambda_min"].get<double>();
      out << std::setw(28) << p.str() << std::setw(26) << row["status"].get<std::string>() << ev.str()
          << "\n";
    }
    return;
  }
  nlohmann::json shown = b;
  shown.erase("witness");
  print_object(out, shown, 0);
  if (b.contains("witness") && !b["witness"].is_null())
    out << "witness: " << b["witness"].dump() << "\n";
  if (b.contains("status") && b["status"] == "NUMERICALLY_INFEASIBLE")
    out << "note: numerical semi-decision, not a proof of infeasibility\n";
}

} // namespace

std::vector<double> parse_range(const std::string &spec) {
  auto num = [&](const std::string &s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v))
        throw std::invalid_argument(s);
      return v;
    } catch (const std::exception &) {
      throw UsageError("cannot parse number '" + s + "' in range '" + spec + "'");
    }
  };
  std::vector<double> out;
  if (spec.empty())
    return out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');)
      parts.push_back(p);
    if (parts.size() != 3)
      throw UsageError("range must be a:b:step");
    const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0))
      throw UsageError("range step must be positive");
    if (b < a)
      return out;
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i)
      out.push_back(clean(a + static_cast<double>(i) * step));
    return out;
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');)
    out.push_back(num(p));
  return out;
}

int run(std::span<const std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Invariant Hermitian and hypercomplex geometry on nilpotent Lie algebras", "nilgeom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common c;
  ScanArgs scan;
  DemoArgs demo;
  int samples = 0;

  auto *check = app.add_subcommand("check", "Structure checks: Jacobi, d^2, integrability, abelian");
  auto *hkt = app.add_subcommand("hkt-feasible", "Search for an invariant HKT metric");
  auto *bal = app.add_subcommand("balanced-feasible", "Search for an invariant balanced metric");
  auto *ricci = app.add_subcommand("ricci", "Bismut and Chern Ricci forms");
  auto *eq2 = app.add_subcommand("verify-eq2", "Check Ric^B = Ric^C + d delta F");
  auto *scn = app.add_subcommand("scan", "Feasibility verdicts across a family");
  auto *sym = app.add_subcommand("symmetrize-demo", "Averaging over a nilmanifold chart");
  for (auto *s : {check, hkt, bal, ricci, eq2})
    add_model_options(s, c);
  for (auto *s : {check, hkt, bal, ricci, eq2, scn, sym})
    add_run_options(s, c);
  for (auto *s : {ricci, eq2})
    s->add_option("--samples", samples, "Also test this many random compatible metrics")
        ->check(CLI::NonNegativeNumber);
  scn->add_option("--family", scan.family, "gt or gst")->required();
  scn->add_option("--which", scan.which, "hkt or balanced")->required();
  scn->add_option("--s", scan.s_range, "s values (a:b:step, list, or number)");
  scn->add_option("--t", scan.t_range, "t values (a:b:step, list, or number)");
  sym->add_option("--model", demo.model, "2-step catalog model");
  sym->add_option("--grid", demo.grid, "Quadrature points per axis");
  sym->add_option("--perturbation", demo.perturbation, "trig or none");

  std::vector<const char *> argv{"nilgeom"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.seed = c.seed;
  try {
    if (check->parsed()) {
      report.subcommand = "check";
      const Model m = resolve_model(c);
      report.body = run_check(m, c);
      report.body["model"] = model_summary(m);
    } else if (hkt->parsed()) {
      report.subcommand = "hkt-feasible";
      const Model m = resolve_model(c);
      if (!m.has_triple())
        throw PreconditionError("model has no hypercomplex structure");
      report.body = verdict_to_json(hkt_feasibility(m.algebra, m.triple(), feasibility_options(c)));
      report.body["model"] = model_summary(m);
    } else if (bal->parsed()) {
      report.subcommand = "balanced-feasible";
      const Model m = resolve_model(c);
      if (!m.j)
        throw PreconditionError("model has no complex structure");
      report.body = verdict_to_json(balanced_feasibility(m.algebra, *m.j, feasibility_options(c)));
      report.body["model"] = model_summary(m);
    } else if (ricci->parsed() || eq2->parsed()) {
      const bool only = eq2->parsed();
      report.subcommand = only ? "verify-eq2" : "ricci";
      const Model m = resolve_model(c);
      report.body = run_ricci(m, only, only ? std::max(c.tol, 1e-9) : c.tol, c, samples);
      report.body["model"] = model_summary(m);
    } else if (scn->parsed()) {
      report.subcommand = "scan";
      report.body = run_scan(scan, c);
    } else if (sym->parsed()) {
      report.subcommand = "symmetrize-demo";
      report.body = run_demo(demo);
    }
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const MalformedInput &e) {
    err << "input error: " << e.what() << "\n";
    return kMalformedInput;
  } catch (const PreconditionError &e) {
    err << "input error: " << e.what() << "\n";
    return kMalformedInput;
  } catch (const IntegrityError &e) {
    err << "integrity error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kIntegrity;
  } catch (const ConvergenceError &e) {
    err << "integrity error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kIntegrity;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  report.timing_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string text = report.to_json().dump(2) + "\n";
  if (c.json_path == "-") {
    out << text;
  } else {
    print_human(out, report);
    if (!c.json_path.empty()) {
      std::ofstream f(c.json_path);
      if (!f) {
        err << "error: cannot write " << c.json_path << "\n";
        return kRuntimeFailure;
      }
      f << text;
    }
  }
  return kOk;
}

int run(int argc, const char *const *argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

} // namespace nilgeom::cli
