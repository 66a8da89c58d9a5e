#include "nilgeom/cxstruct.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>

namespace nilgeom {

namespace {

double square_defect(const Endomorphism &j) {
  return (j * j + Endomorphism::Identity(j.rows(), j.cols())).cwiseAbs().maxCoeff();
}

void require_almost_complex(const Endomorphism &j, int n, double tol, const char *name) {
  if (j.rows() != n || j.cols() != n)
    throw MalformedInput(std::string(name) + " has wrong shape for this algebra");
  const double r = square_defect(j);
  if (!(r <= tol))
    throw PreconditionError(std::string(name) + " does not square to -I (residual " +
                                std::to_string(r) + ")",
                            r);
}

} // namespace

ComplexStructure::ComplexStructure(Endomorphism j, double tol) : j_(std::move(j)) {
  if (j_.rows() != j_.cols() || j_.rows() == 0)
    throw MalformedInput("complex structure must be a nonempty square matrix");
  if (j_.rows() % 2 != 0)
    throw PreconditionError("complex structure on an odd-dimensional space");
  const double r = square_residual();
  if (!(r <= tol))
    throw PreconditionError("J^2 != -I (residual " + std::to_string(r) + ")", r);
}

double ComplexStructure::square_residual() const { return square_defect(j_); }

HypercomplexTriple HypercomplexTriple::from_pair(const ComplexStructure &j1,
                                                 const ComplexStructure &j2) {
  return {j1, j2, ComplexStructure(j1.matrix() * j2.matrix())};
}

Endomorphism standard_complex_structure(int dim) {
  if (dim % 2 != 0)
    throw PreconditionError("no complex structure in odd dimension");
  Endomorphism j = Endomorphism::Zero(dim, dim);
  for (int a = 0; a + 1 < dim; a += 2) {
    j(a + 1, a) = 1.0;
    j(a, a + 1) = -1.0;
  }
  return j;
}

NijenhuisResult nijenhuis(const LieAlgebra &alg, const Endomorphism &j, double tol) {
  const int n = alg.dim();
  require_almost_complex(j, n, tol, "J");
  NijenhuisResult res;
  res.tensor.resize(static_cast<std::size_t>(n) * n, Eigen::VectorXd::Zero(n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const Eigen::VectorXd x = Eigen::VectorXd::Unit(n, a);
      const Eigen::VectorXd y = Eigen::VectorXd::Unit(n, b);
      const Eigen::VectorXd jx = j * x, jy = j * y;
      const Eigen::VectorXd v = alg.bracket(jx, jy) - alg.bracket(x, y) -
                                j * alg.bracket(jx, y) - j * alg.bracket(x, jy);
      res.tensor[static_cast<std::size_t>(a * n + b)] = v;
      res.tensor[static_cast<std::size_t>(b * n + a)] = -v;
      res.max_abs = std::max(res.max_abs, v.norm());
    }
  return res;
}

double HypercomplexReport::max_residual() const {
  return std::max({quaternion_residual, integrability[0], integrability[1], integrability[2]});
}

HypercomplexReport hypercomplex_check(const LieAlgebra &alg, const Endomorphism &j1,
                                      const Endomorphism &j2, double tol) {
  const int n = alg.dim();
  require_almost_complex(j1, n, tol, "J1");
  require_almost_complex(j2, n, tol, "J2");
  HypercomplexReport rep;
  rep.j3 = j1 * j2;
  rep.quaternion_residual = (j1 * j2 + j2 * j1).cwiseAbs().maxCoeff();
  rep.integrability[0] = nijenhuis(alg, j1, tol).max_abs;
  rep.integrability[1] = nijenhuis(alg, j2, tol).max_abs;
  // J3 only squares to -I when the pair anticommutes; report its defect instead.
  const double j3_sq = square_defect(rep.j3);
  rep.integrability[2] = j3_sq <= tol ? nijenhuis(alg, rep.j3, tol).max_abs : j3_sq;
  return rep;
}

AbelianResult is_abelian(const LieAlgebra &alg, const HypercomplexTriple &triple, double tol) {
  const int n = alg.dim();
  AbelianResult res;
  for (int i = 0; i < 3; ++i) {
    const Endomorphism &j = triple[i].matrix();
    if (j.rows() != n)
      throw MalformedInput("hypercomplex triple has wrong dimension");
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const Eigen::VectorXd r =
            alg.bracket(Eigen::VectorXd(j.col(a)), Eigen::VectorXd(j.col(b))) - alg.bracket(a, b);
        res.max_residual = std::max(res.max_residual, r.norm());
      }
  }
  res.abelian = res.max_residual < tol;
  return res;
}

KForm j_on_form(const Endomorphism &j, const KForm &alpha) {
  KForm out = pullback(alpha, j);
  if (alpha.degree() % 2 != 0)
    out *= -1.0;
  return out;
}

std::vector<ComplexForm> coframe10(const LieAlgebra &alg, const Endomorphism &j) {
  const int n = alg.dim();
  if (n % 2 != 0)
    throw PreconditionError("odd-dimensional algebra has no almost complex structure");
  require_almost_complex(j, n, 1e-9, "J");
  std::vector<ComplexForm> out;
  Eigen::MatrixXd span(n, 0);
  for (int i = 0; i < n && static_cast<int>(out.size()) < n / 2; ++i) {
    const Eigen::VectorXd a = Eigen::VectorXd::Unit(n, i);
    const Eigen::VectorXd ja = j.transpose() * a;
    Eigen::MatrixXd trial(n, span.cols() + 2);
    trial << span, a, ja;
    if (numerical_rank(trial, 1e-9) < trial.cols())
      continue;
    span = std::move(trial);
    out.emplace_back(KForm::from_coeffs(n, 1, a), KForm::from_coeffs(n, 1, -ja));
  }
  if (static_cast<int>(out.size()) != n / 2)
    throw IntegrityError("failed to build a (1,0)-coframe");
  return out;
}

HolomorphicVolumeResult holomorphic_volume_check(const LieAlgebra &alg, const Endomorphism &j,
                                                 double tol) {
  const int n = alg.dim();
  if (n % 2 != 0)
    throw PreconditionError("holomorphic volume needs an even-dimensional algebra");
  HolomorphicVolumeResult res;
  res.nijenhuis_max = nijenhuis(alg, j).max_abs;
  const auto omega = coframe10(alg, j);
  ComplexForm vol = omega.front();
  for (std::size_t i = 1; i < omega.size(); ++i)
    vol = wedge(vol, omega[i]);
  const ComplexForm dvol{ce_d(alg, vol.re), ce_d(alg, vol.im)};
  res.residual = dvol.max_abs();
  res.closed = res.residual < tol;
  return res;
}

JzResult jz_map(const LieAlgebra &alg, const Eigen::MatrixXd &g, const Eigen::VectorXd &z,
                std::span<const int> complement, double tol) {
  const int n = alg.dim();
  if (g.rows() != n || g.cols() != n || z.size() != n)
    throw MalformedInput("metric or vector has wrong dimension");
  const auto m = static_cast<int>(complement.size());
  Eigen::MatrixXd g1(m, m), b(m, m);
  for (int a = 0; a < m; ++a) {
    const int ia = complement[static_cast<std::size_t>(a)];
    if (ia < 0 || ia >= n)
      throw MalformedInput("complement index out of range");
    for (int c = 0; c < m; ++c) {
      const int ic = complement[static_cast<std::size_t>(c)];
      g1(a, c) = g(ia, ic);
      b(a, c) = alg.bracket(ia, ic).dot(g * z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g1);
  if (m == 0 || eig.eigenvalues().cwiseAbs().minCoeff() <= tol * std::max(1.0, g1.norm()))
    throw PreconditionError("metric restricted to the complement is degenerate");
  JzResult res;
  res.matrix = g1.inverse() * b.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.matrix);
  res.min_singular_value = svd.singularValues().minCoeff();
  res.invertible = res.min_singular_value > tol;
  return res;
}

} // namespace nilgeom
