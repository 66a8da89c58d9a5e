#include "oracles.hpp"
#include "printed.hpp"

#include "nilgeom/catalog.hpp"
#include "nilgeom/errors.hpp"

#include <doctest.h>

using namespace nilgeom;

namespace {

void check_against_printed(const LieAlgebra &alg, const std::vector<oracle::Printed> &rel) {
  const int n = alg.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        CHECK(alg.c(i, j, k) == oracle::printed_constant(rel, i + 1, j + 1, k + 1));
}

} // namespace

TEST_CASE("catalog brackets reproduce the printed relations") {
  check_against_printed(catalog("n3").algebra, printed::n3());
  for (double t : {0.0, 0.25, 0.5, 1.0, 1.7})
    check_against_printed(catalog("gt", {{"t", t}}).algebra, printed::gt(t));
}

TEST_CASE("catalog differentials reproduce the printed structure equations") {
  for (double s : {-1.0, 0.0, 0.5})
    for (double t : {0.0, 1.0, 2.0}) {
      const auto alg = catalog("gst", {{"s", s}, {"t", t}}).algebra;
      for (int i = 0; i < 4; ++i)
        CHECK(ce_d(alg, KForm::basis(6, {i})).max_abs() == 0.0);
      const KForm de5 = printed::gst_de5(s, t);
      const KForm de6 = printed::gst_de6(s, t);
      CHECK((ce_d(alg, KForm::basis(6, {4})) - de5).max_abs() == 0.0);
      CHECK((ce_d(alg, KForm::basis(6, {5})) - de6).max_abs() == 0.0);
    }
  const auto h = catalog("complex_heisenberg").algebra;
  CHECK((ce_d(h, KForm::basis(6, {4})) - printed::heisenberg_de5()).max_abs() == 0.0);
  CHECK((ce_d(h, KForm::basis(6, {5})) - printed::heisenberg_de6()).max_abs() == 0.0);
}

TEST_CASE("d agrees with the invariant formula and squares to zero") {
  std::mt19937_64 rng(21);
  for (const auto &name : catalog_names()) {
    std::map<std::string, double> p{{"s", 0.7}, {"t", 0.3}, {"dim", 6}};
    const auto alg = catalog(name, p).algebra;
    const int n = alg.dim();
    for (int k = 0; k < n; ++k) {
      const KForm a = oracle::random_form(n, k, rng);
      const KForm da = ce_d(alg, a);
      CHECK((da - oracle::ce_d(alg, a)).max_abs() < 1e-12);
      if (k + 2 <= n)
        CHECK(ce_d(alg, da).max_abs() < 1e-12);
    }
  }
}

TEST_CASE("d is a graded derivation") {
  std::mt19937_64 rng(22);
  const auto alg = catalog("gst", {{"s", 1.0}, {"t", 0.4}}).algebra;
  const KForm a = oracle::random_form(6, 2, rng), b = oracle::random_form(6, 1, rng);
  const KForm lhs = ce_d(alg, wedge(a, b));
  const KForm rhs = wedge(ce_d(alg, a), b) + wedge(a, ce_d(alg, b));
  CHECK((lhs - rhs).max_abs() < 1e-12);
}

TEST_CASE("validation of catalog algebras") {
  const auto n3 = validate(catalog("n3").algebra);
  CHECK(n3.jacobi_residual == 0.0);
  CHECK(n3.nilpotency_step == 2);
  CHECK(n3.unimodular);
  CHECK(n3.betti1 == 5);

  const auto gst = validate(catalog("gst", {{"s", 1.0}, {"t", 1.0}}).algebra);
  CHECK(gst.nilpotency_step == 2);
  CHECK(gst.betti1 == 4);

  const auto ab = validate(catalog("abelian", {{"dim", 4}}).algebra);
  CHECK(ab.nilpotency_step == 1);
  CHECK(ab.betti1 == 4);

  // gt degenerates at t = 0 and t = 1 but stays 2-step
  for (double t : {0.0, 1.0})
    CHECK(validate(catalog("gt", {{"t", t}}).algebra).nilpotency_step == 2);
}

TEST_CASE("non-nilpotent and non-Lie inputs are flagged") {
  // aff(R): [e1, e2] = e2, solvable but not nilpotent, not unimodular
  const std::vector<Bracket> aff{{0, 1, 1, 1.0}};
  const auto rep = validate(LieAlgebra::from_brackets(2, aff));
  CHECK_FALSE(rep.nilpotency_step.has_value());
  CHECK_FALSE(rep.unimodular);

  // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 violates Jacobi
  const std::vector<Bracket> bad{{0, 1, 2, 1.0}, {1, 2, 0, 1.0}, {0, 2, 0, 1.0}};
  CHECK(jacobi_residual(LieAlgebra::from_brackets(3, bad)) > 0.1);
}

TEST_CASE("from_differentials inverts ce_d on 1-forms") {
  const auto alg = catalog("n3").algebra;
  std::vector<KForm> de;
  for (int k = 0; k < 8; ++k)
    de.push_back(ce_d(alg, KForm::basis(8, {k})));
  const auto back = LieAlgebra::from_differentials(de);
  CHECK(back.constants() == alg.constants());
}

TEST_CASE("change of basis preserves brackets") {
  std::mt19937_64 rng(23);
  const auto alg = catalog("gst", {{"s", 0.3}, {"t", 1.2}}).algebra;
  Eigen::MatrixXd p(6, 6);
  for (int i = 0; i < 6; ++i)
    p.col(i) = oracle::random_vector(6, rng);
  const auto f = alg.change_basis(p);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const Eigen::VectorXd lhs = p * f.bracket(a, b);
      const Eigen::VectorXd rhs = alg.bracket(Eigen::VectorXd(p.col(a)), Eigen::VectorXd(p.col(b)));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("malformed structure constants are rejected") {
  CHECK_THROWS_AS(LieAlgebra(2, {0, 1, 0, 0, 0, 0, 0, 0}), MalformedInput); // [e1,e2] without [e2,e1]
  CHECK_THROWS_AS(LieAlgebra(2, {0.0}), MalformedInput);
  const std::vector<Bracket> out_of_range{{0, 5, 1, 1.0}};
  CHECK_THROWS_AS(LieAlgebra::from_brackets(3, out_of_range), MalformedInput);
  CHECK_THROWS_AS(catalog("nope"), MalformedInput);
  CHECK_THROWS_AS(catalog("gt"), MalformedInput);
}
