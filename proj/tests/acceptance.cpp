// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "oracles.hpp"
#include "printed.hpp"

#include "nilgeom/catalog.hpp"
#include "nilgeom/cli.hpp"
#include "nilgeom/connections.hpp"
#include "nilgeom/feasibility.hpp"
#include "nilgeom/symmetrize.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

using namespace nilgeom;

namespace {

// Collects the first few failed expectations of one criterion.
class Tally {
public:
  void expect(bool ok, const std::string &what) {
    if (ok)
      return;
    if (failures_++ < 3)
      detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void note(const std::string &s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok())
      return notes_;
    return std::to_string(failures_) + " failed: " + detail_;
  }

private:
  int failures_ = 0;
  std::string detail_, notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<Endomorphism> triple_of(const Model &m) { return {*m.j, *m.j2, *m.j3}; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// --- criteria ---------------------------------------------------------------

void structure_integrity(Tally &t) {
  std::vector<Model> models{catalog("n3"), catalog("gt", {{"t", 0.3}}), catalog("gst", {{"s", 1.0}, {"t", 1.0}}),
                            catalog("complex_heisenberg"), catalog("abelian", {{"dim", 6}})};
  double jac = 0.0, d2 = 0.0;
  for (const auto &m : models) {
    jac = std::max(jac, validate(m.algebra).jacobi_residual);
    const int n = m.algebra.dim();
    for (int k = 0; k + 2 <= n; ++k) {
      KForm all(n, k);
      for (std::size_t r = 0; r < all.masks().size(); ++r) {
        KForm e(n, k);
        e.coeffs()[static_cast<Eigen::Index>(r)] = 1.0;
        d2 = std::max(d2, ce_d(m.algebra, ce_d(m.algebra, e)).max_abs());
      }
    }
  }
  t.expect(jac < 1e-12, "Jacobi residual " + fmt(jac));
  t.expect(d2 == 0.0, "d^2 residual " + fmt(d2));

  auto against = [&](const LieAlgebra &alg, const std::vector<oracle::Printed> &rel, const std::string &name) {
    const int n = alg.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          t.expect(alg.c(i, j, k) == oracle::printed_constant(rel, i + 1, j + 1, k + 1), name + " bracket");
  };
  against(catalog("n3").algebra, printed::n3(), "n3");
  for (int i = 0; i <= 10; ++i)
    against(catalog("gt", {{"t", i / 10.0}}).algebra, printed::gt(i / 10.0), "gt");
  for (double s : {-1.0, 0.0, 1.0})
    for (double tt : {0.5, 1.0, 2.0}) {
      const auto alg = catalog("gst", {{"s", s}, {"t", tt}}).algebra;
      for (int a = 0; a < 4; ++a)
        t.expect(ce_d(alg, KForm::basis(6, {a})).max_abs() == 0.0, "gst de^1..4");
      t.expect((ce_d(alg, KForm::basis(6, {4})) - printed::gst_de5(s, tt)).max_abs() == 0.0, "gst de5");
      t.expect((ce_d(alg, KForm::basis(6, {5})) - printed::gst_de6(s, tt)).max_abs() == 0.0, "gst de6");
    }
  const auto h = catalog("complex_heisenberg").algebra;
  t.expect((ce_d(h, KForm::basis(6, {4})) - printed::heisenberg_de5()).max_abs() == 0.0, "heisenberg de5");
  t.expect((ce_d(h, KForm::basis(6, {5})) - printed::heisenberg_de6()).max_abs() == 0.0, "heisenberg de6");
  t.note("max Jacobi " + fmt(jac) + ", max d^2 " + fmt(d2));
}

void hypercomplex_validity(Tally &t) {
  double worst = 0.0;
  auto one = [&](const Model &m) {
    const auto r = hypercomplex_check(m.algebra, *m.j, *m.j2);
    worst = std::max(worst, r.max_residual());
  };
  one(catalog("n3"));
  for (int i = 0; i <= 10; ++i)
    one(catalog("gt", {{"t", i / 10.0}}));
  t.expect(worst < 1e-12, "residual " + fmt(worst));
  t.note("max quaternion/Nijenhuis residual " + fmt(worst));
}

void abelian_locus(Tally &t) {
  for (int i = 0; i <= 10; ++i) {
    const auto m = catalog("gt", {{"t", i / 10.0}});
    t.expect(is_abelian(m.algebra, m.triple()).abelian == (i == 5), "t=" + fmt(i / 10.0));
  }
  const auto m = catalog("gt", {{"t", 0.3}});
  const double r = is_abelian(m.algebra, m.triple()).max_residual;
  // all printed brackets have unit basis-normalized scale
  t.expect(std::abs(r - std::abs(2 * 0.3 - 1)) < 1e-12, "residual at t=0.3 " + fmt(r));
  t.note("abelian only at t=0.5, residual(0.3) = " + fmt(r));
}

void hkt_equivalence(Tally &t) {
  std::mt19937_64 rng(1001);
  std::vector<Model> models{catalog("n3")};
  for (int i = 0; i <= 10; ++i)
    models.push_back(catalog("gt", {{"t", i / 10.0}}));
  double gap = 0.0;
  int disagree = 0;
  for (const auto &m : models) {
    const auto js = triple_of(m);
    for (int k = 0; k < 100; ++k) {
      const auto r = hkt_check(m.algebra, Metric(random_compatible_metric(js, 8, rng)), m.triple());
      gap = std::max(gap, r.route_gap);
      disagree += r.hkt != r.cyclic_hkt;
    }
  }
  t.expect(disagree == 0, std::to_string(disagree) + " verdict disagreements");
  t.expect(gap < 1e-10, "route gap " + fmt(gap));
  t.note("1200 metrics, max gap " + fmt(gap));
}

void hkt_obstruction(Tally &t) {
  FeasibilityOptions o;
  o.restarts = 100;
  o.seed = 7;
  auto infeasible = [&](const Model &m, const std::string &name) {
    const auto v = hkt_feasibility(m.algebra, m.triple(), o);
    t.expect(v.status == FeasibilityStatus::numerically_infeasible, name + " " + to_string(v.status));
    // exact supremum is 0 on a singular PSD kernel element; allow round-off
    t.expect(v.best_lambda_min <= 1e-12, name + " lambda_min " + fmt(v.best_lambda_min));
    return v.best_lambda_min;
  };
  double worst = infeasible(catalog("n3"), "n3");
  for (int i = 0; i <= 10; ++i)
    if (i != 5)
      worst = std::max(worst, infeasible(catalog("gt", {{"t", i / 10.0}}), "gt(" + fmt(i / 10.0) + ")"));
  const auto half = catalog("gt", {{"t", 0.5}});
  const auto v = hkt_feasibility(half.algebra, half.triple(), o);
  t.expect(v.status == FeasibilityStatus::vacuous, "gt(0.5) " + to_string(v.status));

  // exhaustive grid on low-dimensional slices: 2 kernel directions + 1 transverse
  const auto m = catalog("gt", {{"t", 0.3}});
  const auto js = triple_of(m);
  const auto full = compatible_cone_basis(8, js);
  const Eigen::MatrixXd g0 = project_compatible(Eigen::MatrixXd::Identity(8, 8), js);
  auto phi = [&](const Eigen::MatrixXd &g) {
    const auto r = hkt_check(m.algebra, Metric(g), m.triple());
    Eigen::VectorXd out(2 * r.c[0].coeffs().size());
    out << r.c[0].coeffs() - r.c[1].coeffs(), r.c[1].coeffs() - r.c[2].coeffs();
    return out;
  };
  const int dim = full.dimension();
  Eigen::MatrixXd a(phi(g0).size(), dim);
  for (int i = 0; i < dim; ++i)
    a.col(i) = (phi(g0 + 0.1 * full.elements[static_cast<std::size_t>(i)]) - phi(g0)) / 0.1;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::MatrixXd vv = svd.matrixV();
  double grid_best = -1.0;
  for (int p = dim - 1; p >= 1; --p)
    for (int q = p - 1; q >= 1; --q) {
      if (svd.singularValues()(p) > 1e-8 * svd.singularValues()(0) ||
          svd.singularValues()(q) > 1e-8 * svd.singularValues()(0))
        continue;
      ConeBasis slice{8, {full.combine(vv.col(p)), full.combine(vv.col(q)), full.combine(vv.col(0))}};
      const auto r = hkt_feasibility(m.algebra, m.triple(), slice, o);
      if (r.residuals.count("grid_best_lambda_min"))
        grid_best = std::max(grid_best, r.residuals.at("grid_best_lambda_min"));
      t.expect(r.status != FeasibilityStatus::feasible, "grid slice feasible");
    }
  t.expect(grid_best <= 1e-12 && grid_best > -1.0, "grid best " + fmt(grid_best));
  t.note("max best lambda_min " + fmt(worst) + ", grid slices max " + fmt(grid_best) + ", gt(0.5) VACUOUS");
}

void holomorphic_volume(Tally &t) {
  double worst = 0.0;
  for (double s : {-1.0, 0.0, 1.0})
    for (double tt : {0.5, 1.0, 2.0}) {
      const auto m = catalog("gst", {{"s", s}, {"t", tt}});
      const auto r = holomorphic_volume_check(m.algebra, *m.j);
      worst = std::max(worst, r.residual);
      t.expect(r.closed, "not closed at s=" + fmt(s) + " t=" + fmt(tt));
    }
  t.expect(worst < 1e-12, "residual " + fmt(worst));
  t.note("max residual " + fmt(worst));
}

void balanced_obstruction(Tally &t) {
  FeasibilityOptions o;
  o.restarts = 100;
  o.seed = 11;
  const auto m0 = catalog("gst", {{"s", 0.0}, {"t", 1.0}});
  const auto v0 = balanced_feasibility(m0.algebra, *m0.j, o);
  t.expect(v0.status == FeasibilityStatus::feasible, "s=0 " + to_string(v0.status));
  double at_witness = NAN;
  if (v0.witness) {
    at_witness = balanced_objective(m0.algebra, *v0.witness, *m0.j);
    t.expect(at_witness < 1e-20, "objective at witness " + fmt(at_witness));
    t.expect(balanced_check(m0.algebra, Metric(*v0.witness), *m0.j).balanced, "witness fails balanced_check");
  } else {
    t.expect(false, "no witness at s=0");
  }
  double least = INFINITY;
  for (double s : {-1.0, -0.5, 0.5, 1.0}) {
    const auto m = catalog("gst", {{"s", s}, {"t", 1.0}});
    const auto v = balanced_feasibility(m.algebra, *m.j, o);
    t.expect(v.status == FeasibilityStatus::numerically_infeasible, "s=" + fmt(s) + " " + to_string(v.status));
    t.expect(v.best_objective > 1e-4, "s=" + fmt(s) + " objective " + fmt(v.best_objective));
    least = std::min(least, v.best_objective);
  }
  t.note("witness objective " + fmt(at_witness) + ", least obstructed objective " + fmt(least));
}

// dF^2 expanded by hand: dF from the printed de^5, de^6 via the Leibniz rule,
// then d(F^2) = 2 dF ^ F.
KForm hand_dF2(const KForm &f, double s, double tt) {
  const KForm de5 = printed::gst_de5(s, tt), de6 = printed::gst_de6(s, tt);
  auto de = [&](int a) { return a == 4 ? de5 : (a == 5 ? de6 : KForm(6, 2)); };
  KForm df(6, 3);
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      const double c = oracle::on_basis(f, {a, b});
      if (c == 0.0)
        continue;
      df = df + c * (oracle::wedge(de(a), KForm::basis(6, {b})) - oracle::wedge(KForm::basis(6, {a}), de(b)));
    }
  return 2.0 * oracle::wedge(df, f);
}

void explicit_obstruction(Tally &t) {
  const double s = 1.0, tt = 1.0;
  const auto m = catalog("gst", {{"s", s}, {"t", tt}});
  const std::vector<Endomorphism> js{*m.j};
  std::mt19937_64 rng(1008);
  const Mask e12345 = 0b011111, e12346 = 0b101111;
  double rel = 0.0, smallest = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const KForm f = kaehler_form(Metric(random_compatible_metric(js, 6, rng)), *m.j);
    const KForm lib = ce_d(m.algebra, wedge_power(f, 2));
    const KForm hand = hand_dF2(f, s, tt);
    rel = std::max(rel, (lib - hand).max_abs() / hand.max_abs());
    smallest = std::min(smallest, lib.max_abs());
    for (std::size_t r = 0; r < lib.masks().size(); ++r) {
      const Mask mk = lib.masks()[r];
      if (mk != e12345 && mk != e12346)
        t.expect(std::abs(lib.coeffs()[static_cast<Eigen::Index>(r)]) < 1e-12, "support outside e12345, e12346");
    }
  }
  // leading coefficient on diagonal x: 16 s x9 (x1 + x6/2)
  std::uniform_real_distribution<double> u(0.1, 3.0);
  double lead = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x[9] = {u(rng), 0, 0, 0, 0, u(rng), 0, 0, u(rng)};
    const KForm f = hermitian_form_from_x(m.coframe, x);
    const double want = 16.0 * s * x[8] * (x[0] + 0.5 * x[5]);
    const double got = ce_d(m.algebra, wedge_power(f, 2)).coeff(e12346);
    lead = std::max(lead, std::abs(got - want) / std::abs(want));
  }
  t.expect(smallest > 0.0, "dF^2 vanished");
  t.expect(rel < 1e-8, "hand expansion rel error " + fmt(rel));
  t.expect(lead < 1e-8, "leading coefficient rel error " + fmt(lead));
  t.note("min |dF^2| " + fmt(smallest) + ", rel error " + fmt(rel) + ", leading coeff rel error " + fmt(lead));
}

void ricci_relation(Tally &t) {
  std::mt19937_64 rng(1009);
  std::vector<Model> models{catalog("gst", {{"s", 0.0}, {"t", 1.0}}), catalog("gst", {{"s", 1.0}, {"t", 1.0}}),
                            catalog("n3"), catalog("abelian", {{"dim", 6}})};
  double worst = 0.0;
  for (const auto &m : models) {
    const std::vector<Endomorphism> js{*m.j};
    for (int k = 0; k < 20; ++k) {
      const Metric g(random_compatible_metric(js, m.algebra.dim(), rng));
      worst = std::max(worst, verify_ricci_relation(m.algebra, g, *m.j).residual);
    }
  }
  t.expect(worst < 1e-9, "residual " + fmt(worst));
  t.note("max residual " + fmt(worst));
}

void bismut_ricci(Tally &t) {
  const Metric id(Eigen::MatrixXd::Identity(6, 6));
  const auto h = catalog("complex_heisenberg");
  const double r0 = verify_ricci_relation(h.algebra, id, *h.j).ricci_bismut.max_abs();
  const auto s1 = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const double r1 = verify_ricci_relation(s1.algebra, id, *s1.j).ricci_bismut.norm();
  t.expect(r0 < 1e-10, "Iwasawa Ric^B " + fmt(r0));
  t.expect(r1 > 1e-3, "s=1 |Ric^B| " + fmt(r1));
  t.note("Iwasawa " + fmt(r0) + ", s=1 norm " + fmt(r1));
}

void adjointness(Tally &t) {
  std::mt19937_64 rng(1011);
  double worst = 0.0;
  for (const auto &name : catalog_names()) {
    const auto m = catalog(name, {{"s", 1.0}, {"t", 0.7}, {"dim", 6}});
    const int n = m.algebra.dim();
    std::uniform_int_distribution<int> deg(0, n - 1);
    for (int k = 0; k < 200; ++k) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        a.col(i) = oracle::random_vector(n, rng);
      const Metric g(a * a.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n));
      const int p = deg(rng);
      const KForm alpha = oracle::random_form(n, p, rng), beta = oracle::random_form(n, p + 1, rng);
      const double lhs = form_inner(g, ce_d(m.algebra, alpha), beta);
      const double rhs = form_inner(g, alpha, codifferential(m.algebra, g, beta));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  }
  double hermitian = 0.0;
  const auto m = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const std::vector<Endomorphism> js{*m.j};
  for (int k = 0; k < 50; ++k) {
    const Metric g(random_compatible_metric(js, 6, rng));
    const KForm f = kaehler_form(g, *m.j);
    const KForm df = codifferential(m.algebra, g, f);
    const double lhs = form_inner(g, ce_d(m.algebra, df), f), rhs = form_inner(g, df, df);
    hermitian = std::max(hermitian, std::abs(lhs - rhs) / std::max(1.0, rhs));
  }
  t.expect(worst < 1e-10, "adjointness " + fmt(worst));
  t.expect(hermitian < 1e-10, "<d delta F, F> " + fmt(hermitian));
  t.note("adjointness " + fmt(worst) + ", <d delta F, F> - |delta F|^2 " + fmt(hermitian));
}

void average_commutes(Tally &t) {
  const NilmanifoldChart chart(catalog("iwasawa").algebra);
  FieldForm w;
  w.dim = 6;
  w.degree = 1;
  w.coefficients = [](const Eigen::VectorXd &x) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    c(4) = 1.0 + 0.3 * std::exp(std::cos(kTwoPi * x(0) + 0.3)) * std::sin(kTwoPi * x(2));
    c(0) = 0.2 * std::exp(std::sin(kTwoPi * x(1) + 0.7) + std::cos(kTwoPi * x(4)));
    c(5) = 0.1 * std::cos(kTwoPi * x(3)) * std::exp(std::cos(kTwoPi * x(5) + 1.1));
    return c;
  };
  QuadratureSpec coarse, fine;
  coarse.points_per_axis = 8;
  fine.points_per_axis = 16;
  const double r8 = check_average_commutes_d(chart, w, coarse).residual;
  const double r16 = check_average_commutes_d(chart, w, fine).residual;
  t.expect(r16 < 1e-4, "16^6 residual " + fmt(r16));
  t.expect(r16 < r8, "no decrease from 8^6 " + fmt(r8) + " to 16^6 " + fmt(r16));
  t.note("8^6 " + fmt(r8) + ", 16^6 " + fmt(r16) + " (32^6 downgraded)");
}

void root_extraction(Tally &t) {
  const auto m = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const std::vector<Endomorphism> js{*m.j};
  std::mt19937_64 rng(1013);
  double err = 0.0, res = 0.0;
  for (int k = 0; k < 500; ++k) {
    const KForm f0 = kaehler_form(Metric(random_compatible_metric(js, 6, rng)), *m.j);
    const KForm psi = oracle::wedge(f0, f0);
    const auto r = root_nm1(psi, *m.j);
    err = std::max(err, (r.f - f0).max_abs() / f0.max_abs());
    res = std::max(res, (oracle::wedge(r.f, r.f) - psi).max_abs() / psi.max_abs());
  }
  t.expect(err < 1e-6, "F recovery " + fmt(err));
  t.expect(res < 1e-8, "F^2 residual " + fmt(res));
  t.note("F error " + fmt(err) + ", F^2 residual " + fmt(res));
}

void determinism(Tally &t) {
  const std::vector<std::vector<std::string>> cases{
      {"check", "--catalog", "n3", "--json", "-"},
      {"hkt-feasible", "--catalog", "gt", "--t", "0.3", "--seed", "5", "--json", "-"},
      {"balanced-feasible", "--catalog", "gst", "--s", "1", "--t", "1", "--seed", "5", "--json", "-"},
      {"ricci", "--catalog", "gst", "--s", "1", "--t", "1", "--samples", "3", "--json", "-"},
      {"verify-eq2", "--catalog", "gst", "--s", "0.5", "--t", "2", "--samples", "3", "--seed", "2", "--json", "-"},
      {"scan", "--family", "gst", "--which", "balanced", "--s", "-1:1:0.5", "--t", "1", "--restarts", "10", "--json", "-"},
      {"symmetrize-demo", "--grid", "4", "--json", "-"}};
  for (const auto &args : cases) {
    std::string outs[2];
    for (auto &o : outs) {
      std::ostringstream out, err;
      t.expect(cli::run(args, out, err) == 0, args[0] + " failed: " + err.str());
      auto doc = nlohmann::json::parse(out.str(), nullptr, false);
      t.expect(!doc.is_discarded(), args[0] + " output is not JSON");
      if (!doc.is_discarded())
        doc.erase("timing_seconds");
      o = doc.dump();
    }
    t.expect(outs[0] == outs[1], args[0] + " output differs between runs");
  }
  t.note(std::to_string(cases.size()) + " subcommands repeated");
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Tally &)>>> criteria{
      {"structure integrity", structure_integrity},
      {"hypercomplex validity", hypercomplex_validity},
      {"abelian locus", abelian_locus},
      {"HKT characterization equivalence", hkt_equivalence},
      {"no invariant HKT metric on non-abelian structures", hkt_obstruction},
      {"closed holomorphic volume form", holomorphic_volume},
      {"balanced metrics exactly at s = 0", balanced_obstruction},
      {"explicit dF^2 obstruction", explicit_obstruction},
      {"Ric^B = Ric^C + d delta F", ricci_relation},
      {"vanishing Bismut Ricci form", bismut_ricci},
      {"adjointness of d and delta", adjointness},
      {"averaging commutes with d", average_commutes},
      {"root extraction", root_extraction},
      {"determinism", determinism}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(t);
    } catch (const std::exception &e) {
      t.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !t.ok();
    std::printf("%s criterion %zu: %s (%s) [%.1fs]\n", t.ok() ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), t.summary().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
