#include "nilgeom/liealg.hpp"

#include "nilgeom/errors.hpp"

#include <bit>
#include <cmath>

namespace nilgeom {

namespace {

std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i)
    out.push_back("e" + std::to_string(i + 1));
  return out;
}

// Orthonormal basis (columns) of the column span of m.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd &m, double tol) {
  if (m.cols() == 0)
    return Eigen::MatrixXd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto &s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
  int r = 0;
  while (r < s.size() && s[r] > tol * scale)
    ++r;
  return svd.matrixU().leftCols(r);
}

} // namespace

LieAlgebra::LieAlgebra(int dim, std::vector<double> constants, std::vector<std::string> labels)
    : dim_(dim), c_(std::move(constants)), labels_(std::move(labels)) {
  if (dim < 1 || dim > kMaxDim)
    throw MalformedInput("algebra dimension " + std::to_string(dim) + " outside [1, " +
                         std::to_string(kMaxDim) + "]");
  const auto n = static_cast<std::size_t>(dim);
  if (c_.size() != n * n * n)
    throw MalformedInput("structure constant tensor has " + std::to_string(c_.size()) +
                         " entries, expected " + std::to_string(n * n * n));
  if (labels_.empty())
    labels_ = default_labels(dim);
  if (labels_.size() != n)
    throw MalformedInput("label count does not match dimension");
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        const double a = c(i, j, k), b = c(j, i, k);
        if (!std::isfinite(a))
          throw MalformedInput("non-finite structure constant");
        if (std::abs(a + b) > 1e-12)
          throw MalformedInput("structure constants are not antisymmetric at (" +
                               std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                               std::to_string(k + 1) + ")");
      }
}

LieAlgebra LieAlgebra::from_brackets(int dim, std::span<const Bracket> brackets) {
  if (dim < 1 || dim > kMaxDim)
    throw MalformedInput("algebra dimension " + std::to_string(dim) + " outside [1, " +
                         std::to_string(kMaxDim) + "]");
  const auto n = static_cast<std::size_t>(dim);
  std::vector<double> c(n * n * n, 0.0);
  auto at = [&](int i, int j, int k) -> double & {
    return c[(static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
             static_cast<std::size_t>(k)];
  };
  for (const auto &b : brackets) {
    if (b.i < 0 || b.j < 0 || b.k < 0 || b.i >= dim || b.j >= dim || b.k >= dim)
      throw MalformedInput("bracket index out of range");
    if (b.i == b.j) {
      if (b.value != 0.0)
        throw MalformedInput("nonzero bracket [e_i, e_i]");
      continue;
    }
    at(b.i, b.j, b.k) += b.value;
    at(b.j, b.i, b.k) -= b.value;
  }
  return LieAlgebra(dim, std::move(c));
}

LieAlgebra LieAlgebra::from_differentials(std::span<const KForm> de) {
  const int n = static_cast<int>(de.size());
  std::vector<Bracket> br;
  for (int k = 0; k < n; ++k) {
    const auto &f = de[static_cast<std::size_t>(k)];
    if (f.dim() != n || f.degree() != 2)
      throw MalformedInput("structure equation d e^" + std::to_string(k + 1) +
                           " must be a 2-form on the same space");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = f.at({i, j});
        if (v != 0.0)
          br.push_back({i, j, k, -v});
      }
  }
  return from_brackets(n, br);
}

Eigen::VectorXd LieAlgebra::bracket(const Eigen::VectorXd &x, const Eigen::VectorXd &y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0)
      continue;
    for (int j = 0; j < dim_; ++j) {
      const double w = x[i] * y[j];
      if (w == 0.0)
        continue;
      for (int k = 0; k < dim_; ++k)
        out[k] += w * c(i, j, k);
    }
  }
  return out;
}

Eigen::VectorXd LieAlgebra::bracket(int i, int j) const {
  Eigen::VectorXd out(dim_);
  for (int k = 0; k < dim_; ++k)
    out[k] = c(i, j, k);
  return out;
}

Eigen::MatrixXd LieAlgebra::ad(const Eigen::VectorXd &x) const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    m.col(j) = bracket(x, Eigen::VectorXd::Unit(dim_, j));
  return m;
}

LieAlgebra LieAlgebra::change_basis(const Eigen::MatrixXd &p) const {
  if (p.rows() != dim_ || p.cols() != dim_)
    throw MalformedInput("basis change matrix has wrong shape");
  const Eigen::MatrixXd pinv = p.inverse();
  const auto n = static_cast<std::size_t>(dim_);
  std::vector<double> c(n * n * n, 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = a + 1; b < dim_; ++b) {
      const Eigen::VectorXd v = pinv * bracket(Eigen::VectorXd(p.col(a)), Eigen::VectorXd(p.col(b)));
      for (int k = 0; k < dim_; ++k) {
        c[(a * n + b) * n + k] = v[k];
        c[(b * n + a) * n + k] = -v[k];
      }
    }
  return LieAlgebra(dim_, std::move(c));
}

double LieAlgebra::max_abs_constant() const {
  double m = 0.0;
  for (double v : c_)
    m = std::max(m, std::abs(v));
  return m;
}

double jacobi_residual(const LieAlgebra &alg) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
        const Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
        const Eigen::VectorXd ek = Eigen::VectorXd::Unit(n, k);
        const Eigen::VectorXd r = alg.bracket(alg.bracket(ei, ej), ek) +
                                  alg.bracket(alg.bracket(ej, ek), ei) +
                                  alg.bracket(alg.bracket(ek, ei), ej);
        worst = std::max(worst, r.norm());
      }
  return worst;
}

int numerical_rank(const Eigen::MatrixXd &m, double tol) {
  return static_cast<int>(span_basis(m, tol).cols());
}

ValidationReport validate(const LieAlgebra &alg, double tol) {
  ValidationReport rep;
  const int n = alg.dim();
  rep.jacobi_residual = jacobi_residual(alg);

  for (int i = 0; i < n; ++i)
    if (std::abs(alg.ad(Eigen::VectorXd::Unit(n, i)).trace()) > tol)
      rep.unimodular = false;

  // Lower central series g^1 = g, g^{m+1} = [g, g^m].
  Eigen::MatrixXd current = Eigen::MatrixXd::Identity(n, n);
  rep.lower_central_series.push_back(n);
  for (int step = 1; step <= n + 1; ++step) {
    Eigen::MatrixXd images(n, n * current.cols());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < current.cols(); ++b)
        images.col(a * current.cols() + b) =
            alg.bracket(Eigen::VectorXd::Unit(n, a), Eigen::VectorXd(current.col(b)));
    Eigen::MatrixXd next = span_basis(images, tol);
    if (step == 1)
      rep.derived_dim = static_cast<int>(next.cols());
    rep.lower_central_series.push_back(static_cast<int>(next.cols()));
    if (next.cols() == 0) {
      rep.nilpotency_step = step;
      break;
    }
    if (next.cols() == current.cols())
      break; // stabilized at a nonzero ideal
    current = std::move(next);
  }
  rep.betti1 = n - rep.derived_dim;
  return rep;
}

KForm ce_d(const LieAlgebra &alg, const KForm &alpha) {
  const int n = alg.dim();
  if (alpha.dim() != n)
    throw MalformedInput("form and algebra have different dimensions");
  const int k = alpha.degree();
  KForm out(n, k + 1);
  if (k + 1 > n)
    return out;
  const auto &targets = out.masks();
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const auto idx = mask_indices(targets[r]);
    double acc = 0.0;
    for (int a = 0; a <= k; ++a)
      for (int b = a + 1; b <= k; ++b) {
        const int ia = idx[static_cast<std::size_t>(a)];
        const int ib = idx[static_cast<std::size_t>(b)];
        const Mask rest = targets[r] & ~(Mask{1} << ia) & ~(Mask{1} << ib);
        const double sign = ((a + b) & 1) ? -1.0 : 1.0;
        for (int m = 0; m < n; ++m) {
          const double cm = alg.c(ia, ib, m);
          if (cm == 0.0)
            continue;
          const Mask mm = Mask{1} << m;
          const int s = wedge_sign(mm, rest);
          if (s == 0)
            continue;
          acc += sign * cm * s * alpha.coeff(mm | rest);
        }
      }
    out.coeffs()[static_cast<Eigen::Index>(r)] = acc;
  }
  return out;
}

Eigen::MatrixXd d_matrix(const LieAlgebra &alg, int k) {
  const int n = alg.dim();
  const auto rows = static_cast<Eigen::Index>(binomial(n, k + 1));
  const auto cols = static_cast<Eigen::Index>(binomial(n, k));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    KForm basis(n, k);
    basis.coeffs()[c] = 1.0;
    if (rows > 0)
      m.col(c) = ce_d(alg, basis).coeffs();
  }
  return m;
}

} // namespace nilgeom
