#include "oracles.hpp"

#include "nilgeom/catalog.hpp"
#include "nilgeom/errors.hpp"
#include "nilgeom/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace nilgeom;

namespace {

KForm two(int n, int a, int b) { return KForm::basis(n, {a - 1, b - 1}); }

std::vector<Endomorphism> triple_of(const Model &m) { return {*m.j, *m.j2, *m.j3}; }

// max over basis triples of the deviation between the three cyclic sums
// S_i(X,Y,Z) = g([J_i X, J_i Y], Z) + cyclic.
double cyclic_spread(const LieAlgebra &alg, const Eigen::MatrixXd &g, const std::vector<Endomorphism> &js) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        double s[3];
        for (int i = 0; i < 3; ++i) {
          const auto &j = js[static_cast<std::size_t>(i)];
          auto term = [&](int x, int y, int z) {
            const Eigen::VectorXd br = alg.bracket(Eigen::VectorXd(j.col(x)), Eigen::VectorXd(j.col(y)));
            return br.dot(g.col(z));
          };
          s[i] = term(a, b, c) + term(b, c, a) + term(c, a, b);
        }
        worst = std::max({worst, std::abs(s[0] - s[1]), std::abs(s[1] - s[2])});
      }
  return worst;
}

} // namespace

TEST_CASE("Kaehler form of the identity metric") {
  const auto m = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const KForm f = kaehler_form(Metric(Eigen::MatrixXd::Identity(6, 6)), *m.j);
  CHECK((f - (two(6, 1, 2) + two(6, 3, 4) + two(6, 5, 6))).max_abs() == 0.0);
  // entrywise g(J e_a, e_b)
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      CHECK(f.at({a, b}) == doctest::Approx(Eigen::MatrixXd::Identity(6, 6).col(b).dot(m.j->col(a))));
  // J-invariance
  CHECK((j_on_form(*m.j, f) - f).max_abs() == 0.0);
}

TEST_CASE("x-parametrization with x1 = x6 = x9 = 1") {
  const auto m = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const double x[9] = {1, 0, 0, 0, 0, 1, 0, 0, 1};
  const KForm f = hermitian_form_from_x(m.coframe, x);
  // i w ^ conj(w) = 2 e^{2a-1,2a}, so the standard form appears doubled
  CHECK((f - 2.0 * (two(6, 1, 2) + two(6, 3, 4) + two(6, 5, 6))).max_abs() < 1e-15);
}

TEST_CASE("incompatible metrics are rejected") {
  const auto m = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(6, 6);
  g(0, 0) = 2.0;
  CHECK_THROWS_AS(kaehler_form(Metric(g), *m.j), PreconditionError);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(Metric{asym}, MalformedInput);
}

TEST_CASE("induced inner product on forms") {
  const Metric id(Eigen::MatrixXd::Identity(4, 4));
  CHECK(form_inner(id, two(4, 1, 2), two(4, 1, 2)) == 1.0);
  CHECK(form_inner(id, two(4, 1, 2), two(4, 1, 3)) == 0.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(4, 4);
  d(0, 0) = 4.0;
  CHECK(form_inner(Metric(d), two(4, 1, 2), two(4, 1, 2)) == doctest::Approx(0.25));
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const KForm a = oracle::random_form(4, trial % 4 + 1, rng);
    CHECK(form_inner(id, a, a) > 0.0);
  }
  CHECK_THROWS_AS(form_inner(id, two(4, 1, 2), KForm::basis(4, {0})), MalformedInput);
}

TEST_CASE("codifferential is the adjoint of d") {
  std::mt19937_64 rng(42);
  for (const auto &name : catalog_names()) {
    const auto m = catalog(name, {{"s", 0.6}, {"t", 1.3}, {"dim", 6}});
    const int n = m.algebra.dim();
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        a.col(i) = oracle::random_vector(n, rng);
      const Metric g(a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n));
      for (int pair = 0; pair < 40; ++pair) {
        const KForm alpha = oracle::random_form(n, 1, rng), beta = oracle::random_form(n, 2, rng);
        const double lhs = form_inner(g, ce_d(m.algebra, alpha), beta);
        const double rhs = form_inner(g, alpha, codifferential(m.algebra, g, beta));
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
  const auto ab = catalog("abelian", {{"dim", 4}});
  std::mt19937_64 r2(43);
  CHECK(codifferential(ab.algebra, Metric(Eigen::MatrixXd::Identity(4, 4)), oracle::random_form(4, 2, r2)).max_abs() == 0.0);
}

TEST_CASE("<d delta F, F> = |delta F|^2") {
  std::mt19937_64 rng(44);
  for (double s : {0.0, 1.0}) {
    const auto m = catalog("gst", {{"s", s}, {"t", 1.0}});
    const std::vector<Endomorphism> js{*m.j};
    for (int trial = 0; trial < 20; ++trial) {
      const Metric g(random_compatible_metric(js, 6, rng));
      const KForm f = kaehler_form(g, *m.j);
      const KForm df = codifferential(m.algebra, g, f);
      const double lhs = form_inner(g, ce_d(m.algebra, df), f);
      const double rhs = form_inner(g, df, df);
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, rhs));
    }
  }
}

TEST_CASE("balanced criteria") {
  const Metric id(Eigen::MatrixXd::Identity(6, 6));
  const auto s0 = catalog("gst", {{"s", 0.0}, {"t", 1.0}});
  const auto b0 = balanced_check(s0.algebra, id, *s0.j);
  CHECK(b0.balanced);
  CHECK(b0.delta_norm < 1e-12);
  CHECK(b0.dFn1_norm < 1e-12);

  const auto s1 = catalog("gst", {{"s", 1.0}, {"t", 1.0}});
  const auto b1 = balanced_check(s1.algebra, id, *s1.j);
  CHECK_FALSE(b1.balanced);
  // dF^2 = 2 dF ^ F = 6s e^{12346}
  const KForm f = kaehler_form(id, *s1.j);
  const KForm df2 = ce_d(s1.algebra, wedge(f, f));
  CHECK((df2 - 6.0 * KForm::basis(6, {0, 1, 2, 3, 5})).max_abs() < 1e-14);

  const auto ab = catalog("abelian", {{"dim", 6}});
  CHECK(balanced_check(ab.algebra, id, *ab.j).balanced);

  std::mt19937_64 rng(45);
  for (double s : {0.0, 0.5, 1.0}) {
    const auto m = catalog("gst", {{"s", s}, {"t", 1.0}});
    const std::vector<Endomorphism> js{*m.j};
    for (int trial = 0; trial < 20; ++trial) {
      const auto r = balanced_check(m.algebra, Metric(random_compatible_metric(js, 6, rng)), *m.j);
      CHECK(r.criteria_agree);
      CHECK(r.balanced == (s == 0.0));
    }
  }
  CHECK_THROWS(balanced_check(LieAlgebra::abelian(3), Metric(Eigen::MatrixXd::Identity(3, 3)),
                              Endomorphism::Zero(3, 3)));
}

TEST_CASE("HKT: 3-form identity and cyclic sums agree") {
  std::mt19937_64 rng(46);
  for (const auto &[name, t] : std::vector<std::pair<std::string, double>>{{"n3", 0.0}, {"gt", 0.3}, {"gt", 0.5}}) {
    const auto m = catalog(name, {{"t", t}});
    const auto js = triple_of(m);
    for (int trial = 0; trial < 30; ++trial) {
      const Eigen::MatrixXd g = random_compatible_metric(js, 8, rng);
      const auto r = hkt_check(m.algebra, Metric(g), m.triple());
      CHECK(r.hkt == r.cyclic_hkt);
      CHECK(r.route_gap < 1e-10);
      // independent cyclic-sum oracle
      const double spread = cyclic_spread(m.algebra, g, js);
      CHECK((spread < 1e-10) == r.cyclic_hkt);
      CHECK(r.hkt == (name == "gt" && t == 0.5));
    }
  }
  const auto n3 = catalog("n3");
  CHECK_FALSE(hkt_check(n3.algebra, Metric(Eigen::MatrixXd::Identity(8, 8)), n3.triple()).hkt);
  const auto r4 = catalog("abelian", {{"dim", 4}});
  const auto h4 = hkt_check(r4.algebra, Metric(Eigen::MatrixXd::Identity(4, 4)), r4.triple());
  for (const auto &c : h4.c)
    CHECK(c.max_abs() == 0.0);
}

TEST_CASE("compatible projection") {
  std::mt19937_64 rng(47);
  const auto m = catalog("n3");
  const auto js = triple_of(m);
  for (int trial = 0; trial < 10; ++trial) {
    const Metric g(random_compatible_metric(js, 8, rng));
    CHECK(g.is_positive_definite());
    for (const auto &j : js)
      CHECK(g.compatibility_residual(j) < 1e-12);
  }
}
