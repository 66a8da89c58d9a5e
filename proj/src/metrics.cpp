#include "nilgeom/metrics.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>

namespace nilgeom {

Metric::Metric(Eigen::MatrixXd g) : g_(std::move(g)) {
  if (g_.rows() != g_.cols() || g_.rows() == 0)
    throw MalformedInput("metric must be a nonempty square matrix");
  if (!g_.allFinite())
    throw MalformedInput("metric has non-finite entries");
  const double scale = std::max(1.0, g_.cwiseAbs().maxCoeff());
  if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw MalformedInput("metric is not symmetric");
}

double Metric::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double Metric::compatibility_residual(const Endomorphism &j) const {
  if (j.rows() != g_.rows())
    throw MalformedInput("structure and metric have different dimensions");
  return (j.transpose() * g_ * j - g_).cwiseAbs().maxCoeff();
}

KForm kaehler_form(const Metric &g, const Endomorphism &j, double compat_tol) {
  const double r = g.compatibility_residual(j);
  if (!(r <= compat_tol * std::max(1.0, g.matrix().cwiseAbs().maxCoeff())))
    throw PreconditionError("metric is not compatible with J (residual " + std::to_string(r) + ")",
                            r);
  const int n = g.dim();
  const Eigen::MatrixXd f = j.transpose() * g.matrix(); // f(a, b) = g(J e_a, e_b)
  KForm out(n, 2);
  const auto &ms = out.masks();
  for (std::size_t r2 = 0; r2 < ms.size(); ++r2) {
    const auto idx = mask_indices(ms[r2]);
    out.coeffs()[static_cast<Eigen::Index>(r2)] = 0.5 * (f(idx[0], idx[1]) - f(idx[1], idx[0]));
  }
  return out;
}

KForm wedge_power(const KForm &f, int m) {
  KForm out(f.dim(), 0);
  out.coeffs()[0] = 1.0;
  for (int i = 0; i < m; ++i)
    out = wedge(out, f);
  return out;
}

Eigen::MatrixXd form_gram(const Metric &g, int k) {
  const int n = g.dim();
  const Eigen::MatrixXd ginv = g.matrix().inverse();
  const auto &ms = subsets(n, k);
  const auto sz = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXd gram(sz, sz);
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < sz; ++a) {
    const auto ia = mask_indices(ms[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = a; b < sz; ++b) {
      const auto ib = mask_indices(ms[static_cast<std::size_t>(b)]);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
          sub(r, c) = ginv(ia[static_cast<std::size_t>(r)], ib[static_cast<std::size_t>(c)]);
      gram(a, b) = gram(b, a) = k == 0 ? 1.0 : sub.determinant();
    }
  }
  return gram;
}

double form_inner(const Metric &g, const KForm &a, const KForm &b) {
  if (a.degree() != b.degree())
    throw MalformedInput("inner product of forms of different degree");
  if (a.dim() != g.dim() || b.dim() != g.dim())
    throw MalformedInput("form and metric have different dimensions");
  return a.coeffs().dot(form_gram(g, a.degree()) * b.coeffs());
}

KForm codifferential(const LieAlgebra &alg, const Metric &g, const KForm &alpha) {
  const int n = alg.dim();
  const int k = alpha.degree();
  if (alpha.dim() != n || g.dim() != n)
    throw MalformedInput("form, metric and algebra dimensions differ");
  if (k == 0)
    return KForm(n, 0);
  if (!validate(alg).unimodular)
    throw PreconditionError("codifferential of invariant forms needs a unimodular algebra");
  if (!g.is_positive_definite())
    throw PreconditionError("codifferential needs a positive definite metric", g.min_eigenvalue());
  const Eigen::MatrixXd d = d_matrix(alg, k - 1);
  const Eigen::MatrixXd rhs = d.transpose() * (form_gram(g, k) * alpha.coeffs());
  const Eigen::VectorXd out = form_gram(g, k - 1).ldlt().solve(rhs);
  return KForm::from_coeffs(n, k - 1, out);
}

BalancedResult balanced_check(const LieAlgebra &alg, const Metric &g, const Endomorphism &j,
                              double tol) {
  const int n = alg.dim();
  if (n % 2 != 0)
    throw PreconditionError("balanced condition needs an even-dimensional algebra");
  const KForm f = kaehler_form(g, j);
  BalancedResult res;
  const KForm delta = codifferential(alg, g, f);
  res.delta_norm = std::sqrt(std::max(0.0, form_inner(g, delta, delta)));
  res.dFn1_norm = ce_d(alg, wedge_power(f, n / 2 - 1)).norm();
  const bool by_delta = res.delta_norm < tol;
  const bool by_power = res.dFn1_norm < tol;
  res.balanced = by_delta && by_power;
  res.criteria_agree = by_delta == by_power;
  return res;
}

HktResult hkt_check(const LieAlgebra &alg, const Metric &g, const HypercomplexTriple &triple,
                    double tol) {
  const int n = alg.dim();
  HktResult res;
  for (int i = 0; i < 3; ++i) {
    const Endomorphism &j = triple[i].matrix();
    res.c[static_cast<std::size_t>(i)] = j_on_form(j, ce_d(alg, kaehler_form(g, j)));
  }
  res.residual_12 = (res.c[0] - res.c[1]).max_abs();
  res.residual_23 = (res.c[1] - res.c[2]).max_abs();

  // g([JX,JY],Z) + g([JY,JZ],X) + g([JZ,JX],Y) on basis triples.
  const Eigen::MatrixXd &gm = g.matrix();
  auto cyclic = [&](const Endomorphism &j, int a, int b, int c) {
    const Eigen::VectorXd ja = j.col(a), jb = j.col(b), jc = j.col(c);
    return alg.bracket(ja, jb).dot(gm.col(c)) + alg.bracket(jb, jc).dot(gm.col(a)) +
           alg.bracket(jc, ja).dot(gm.col(b));
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        std::array<double, 3> s{};
        for (int i = 0; i < 3; ++i) {
          s[static_cast<std::size_t>(i)] = cyclic(triple[i].matrix(), a, b, c);
          res.route_gap = std::max(
              res.route_gap, std::abs(s[static_cast<std::size_t>(i)] -
                                      res.c[static_cast<std::size_t>(i)].at({a, b, c})));
        }
        res.cyclic_residual =
            std::max({res.cyclic_residual, std::abs(s[0] - s[1]), std::abs(s[1] - s[2])});
      }
  res.hkt = res.residual_12 < tol && res.residual_23 < tol;
  res.cyclic_hkt = res.cyclic_residual < tol;
  return res;
}

Eigen::MatrixXd project_compatible(const Eigen::MatrixXd &g, std::span<const Endomorphism> js) {
  Eigen::MatrixXd acc = g;
  for (const auto &j : js)
    acc += j.transpose() * g * j;
  acc /= static_cast<double>(js.size() + 1);
  return 0.5 * (acc + acc.transpose());
}

Eigen::MatrixXd random_compatible_metric(std::span<const Endomorphism> js, int dim,
                                         std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      a(r, c) = normal(rng);
  const Eigen::MatrixXd pd = a * a.transpose() / dim + 0.2 * Eigen::MatrixXd::Identity(dim, dim);
  return project_compatible(pd, js);
}

} // namespace nilgeom
