#include "nilgeom/catalog.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>

namespace nilgeom {

namespace {

double require(const std::map<std::string, double> &params, const std::string &model,
               const std::string &key) {
  auto it = params.find(key);
  if (it == params.end())
    throw MalformedInput("catalog model '" + model + "' requires parameter '" + key + "'");
  if (!std::isfinite(it->second))
    throw MalformedInput("parameter '" + key + "' is not finite");
  return it->second;
}

// Sets J e_from = sign * e_to and J e_to = -sign * e_from (1-based indices).
void pair(Endomorphism &j, int from, int to, double sign) {
  j(to - 1, from - 1) = sign;
  j(from - 1, to - 1) = -sign;
}

// The triple J1, J2 acting on e1..e8 as in the 8-dimensional catalog entries.
std::pair<Endomorphism, Endomorphism> quaternionic_pair(int dim) {
  Endomorphism j1 = Endomorphism::Zero(dim, dim);
  Endomorphism j2 = Endomorphism::Zero(dim, dim);
  for (int base = 0; base + 4 <= dim; base += 4) {
    pair(j1, base + 1, base + 2, 1.0);
    pair(j1, base + 3, base + 4, 1.0);
    pair(j2, base + 1, base + 3, 1.0);
    pair(j2, base + 2, base + 4, -1.0);
  }
  return {j1, j2};
}

LieAlgebra n3_algebra() {
  // [e1,e2] = [e3,e4] = -e6, [e1,e3] = -[e2,e4] = -e7, [e1,e4] = [e2,e3] = -e8
  const std::vector<Bracket> br = {
      {0, 1, 5, -1.0}, {2, 3, 5, -1.0}, {0, 2, 6, -1.0},
      {1, 3, 6, 1.0},  {0, 3, 7, -1.0}, {1, 2, 7, -1.0},
  };
  return LieAlgebra::from_brackets(8, br);
}

LieAlgebra gt_algebra(double t) {
  const std::vector<Bracket> br = {
      {0, 1, 5, -t}, {2, 3, 5, 1.0 - t}, {0, 2, 6, -t},
      {1, 3, 6, t - 1.0}, {0, 3, 7, -t}, {1, 2, 7, 1.0 - t},
  };
  return LieAlgebra::from_brackets(8, br);
}

LieAlgebra gst_algebra(double s, double t) {
  std::vector<KForm> de(6, KForm(6, 2));
  // d e^5 = s e^12 + 2s e^34 + t e^13 - t e^24
  de[4].add(std::vector<int>{0, 1}, s);
  de[4].add(std::vector<int>{2, 3}, 2.0 * s);
  de[4].add(std::vector<int>{0, 2}, t);
  de[4].add(std::vector<int>{1, 3}, -t);
  // d e^6 = t e^14 + t e^23
  de[5].add(std::vector<int>{0, 3}, t);
  de[5].add(std::vector<int>{1, 2}, t);
  return LieAlgebra::from_differentials(de);
}

LieAlgebra complex_heisenberg_algebra() {
  std::vector<KForm> de(6, KForm(6, 2));
  // d e^5 = e^13 - e^24, d e^6 = e^14 + e^23
  de[4].add(std::vector<int>{0, 2}, 1.0);
  de[4].add(std::vector<int>{1, 3}, -1.0);
  de[5].add(std::vector<int>{0, 3}, 1.0);
  de[5].add(std::vector<int>{1, 2}, 1.0);
  return LieAlgebra::from_differentials(de);
}

} // namespace

HypercomplexTriple Model::triple() const {
  if (!has_triple())
    throw PreconditionError("model '" + name + "' carries no hypercomplex triple");
  return HypercomplexTriple::from_pair(ComplexStructure(*j), ComplexStructure(*j2));
}

ComplexStructure Model::complex_structure() const {
  if (!j)
    throw PreconditionError("model '" + name + "' carries no complex structure");
  return ComplexStructure(*j);
}

Eigen::MatrixXd Model::metric_or_identity() const {
  return metric ? *metric : Eigen::MatrixXd::Identity(algebra.dim(), algebra.dim());
}

const std::vector<std::string> &catalog_names() {
  static const std::vector<std::string> names = {"n3", "gt", "gst", "complex_heisenberg",
                                                 "abelian"};
  return names;
}

Model catalog(const std::string &name, const std::map<std::string, double> &params) {
  Model m;
  m.name = name;
  if (name == "n3" || name == "gt") {
    if (name == "gt") {
      const double t = require(params, name, "t");
      m.params["t"] = t;
      m.algebra = gt_algebra(t);
    } else {
      m.algebra = n3_algebra();
    }
    auto [j1, j2] = quaternionic_pair(8);
    m.j = j1;
    m.j2 = j2;
    m.j3 = j1 * j2;
  } else if (name == "gst") {
    const double s = require(params, name, "s");
    const double t = require(params, name, "t");
    m.params = {{"s", s}, {"t", t}};
    m.algebra = gst_algebra(s, t);
    m.j = standard_complex_structure(6);
  } else if (name == "complex_heisenberg" || name == "iwasawa") {
    m.name = "complex_heisenberg";
    m.algebra = complex_heisenberg_algebra();
    m.j = standard_complex_structure(6);
  } else if (name == "abelian") {
    const double d = require(params, name, "dim");
    const int dim = static_cast<int>(std::lround(d));
    if (dim < 1 || dim > kMaxDim || std::abs(d - dim) > 0)
      throw MalformedInput("abelian dimension must be an integer in [1, " +
                           std::to_string(kMaxDim) + "]");
    m.params["dim"] = dim;
    m.algebra = LieAlgebra::abelian(dim);
    if (dim % 4 == 0) {
      auto [j1, j2] = quaternionic_pair(dim);
      m.j = j1;
      m.j2 = j2;
      m.j3 = j1 * j2;
    } else if (dim % 2 == 0) {
      m.j = standard_complex_structure(dim);
    }
  } else {
    throw MalformedInput("unknown catalog model '" + name + "'");
  }
  m.metric = Eigen::MatrixXd::Identity(m.algebra.dim(), m.algebra.dim());
  if (m.j)
    m.coframe = coframe10(m.algebra, *m.j);
  return m;
}

KForm hermitian_form_from_x(std::span<const ComplexForm> w, std::span<const double> x) {
  if (w.size() != 3 || x.size() != 9)
    throw MalformedInput("x-parametrization needs a 3-element coframe and 9 coefficients");
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  auto term = [&](C coeff, const ComplexForm &a, const ComplexForm &b) {
    return coeff * wedge(a, b);
  };
  ComplexForm f = term(x[0] * i, w[0], w[0].conj());
  f += term({x[1], x[2]}, w[0], w[1].conj());
  f += term({x[1], -x[2]}, w[0].conj(), w[1]);
  f += term({x[3], x[4]}, w[0], w[2].conj());
  f += term({x[3], -x[4]}, w[0].conj(), w[2]);
  f += term(x[5] * i, w[1], w[1].conj());
  f += term({x[6], x[7]}, w[1], w[2].conj());
  f += term({x[6], -x[7]}, w[1].conj(), w[2]);
  f += term(x[8] * i, w[2], w[2].conj());
  if (f.im.max_abs() > 1e-12 * std::max(1.0, f.re.max_abs()))
    throw IntegrityError("x-parametrized Hermitian form is not real", f.im.max_abs());
  return f.re;
}

} // namespace nilgeom
