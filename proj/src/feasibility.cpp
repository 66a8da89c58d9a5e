#include "nilgeom/feasibility.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nilgeom {

namespace {

double frobenius_dot(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  return (a.array() * b.array()).sum();
}

struct EigMin {
  double value;
  Eigen::VectorXd vector;
};

EigMin min_eig(const Eigen::MatrixXd &g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  return {eig.eigenvalues()(0), eig.eigenvectors().col(0)};
}

std::vector<Endomorphism> triple_matrices(const HypercomplexTriple &t) {
  return {t.j1.matrix(), t.j2.matrix(), t.j3.matrix()};
}

// lambda_min over the unit sphere of span(ks), ks Frobenius-orthonormal.
class SphereMaximizer {
public:
  explicit SphereMaximizer(std::vector<Eigen::MatrixXd> ks) : ks_(std::move(ks)) {}

  Eigen::MatrixXd combine(const Eigen::VectorXd &w) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ks_[0].rows(), ks_[0].cols());
    for (std::size_t i = 0; i < ks_.size(); ++i)
      g += w(static_cast<Eigen::Index>(i)) * ks_[i];
    return g;
  }

  double value(const Eigen::VectorXd &w) const { return min_eig(combine(w)).value; }

  Eigen::VectorXd ascend(Eigen::VectorXd w, int iterations) const {
    w.normalize();
    double f = value(w);
    double step = 0.5;
    const auto k = static_cast<Eigen::Index>(ks_.size());
    for (int it = 0; it < iterations && step > 1e-12; ++it) {
      const Eigen::VectorXd v = min_eig(combine(w)).vector;
      Eigen::VectorXd grad(k);
      for (Eigen::Index i = 0; i < k; ++i)
        grad(i) = v.dot(ks_[static_cast<std::size_t>(i)] * v);
      grad -= grad.dot(w) * w;
      const double gn = grad.norm();
      if (gn < 1e-14)
        break;
      grad /= gn;
      bool moved = false;
      while (step > 1e-12) {
        const Eigen::VectorXd trial = (w + step * grad).normalized();
        const double ft = value(trial);
        if (ft > f) {
          w = trial;
          f = ft;
          moved = true;
          step = std::min(1.0, 2.0 * step);
          break;
        }
        step *= 0.5;
      }
      if (!moved)
        break;
    }
    return w;
  }

  // Deterministic grid over the sphere of span(ks), dim <= 3.
  std::pair<double, Eigen::VectorXd> grid(double res) const {
    const auto k = static_cast<Eigen::Index>(ks_.size());
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd arg = Eigen::VectorXd::Zero(k);
    auto consider = [&](const Eigen::VectorXd &w) {
      const double f = value(w);
      if (f > best) {
        best = f;
        arg = w;
      }
    };
    constexpr double pi = std::numbers::pi;
    if (k == 1) {
      consider(Eigen::VectorXd::Constant(1, 1.0));
      consider(Eigen::VectorXd::Constant(1, -1.0));
    } else if (k == 2) {
      const int steps = static_cast<int>(std::ceil(2 * pi / res));
      for (int s = 0; s < steps; ++s) {
        const double th = 2 * pi * s / steps;
        consider(Eigen::Vector2d(std::cos(th), std::sin(th)));
      }
    } else if (k == 3) {
      const int rings = static_cast<int>(std::ceil(pi / res));
      for (int r = 0; r <= rings; ++r) {
        const double th = pi * r / rings;
        const int steps = std::max(1, static_cast<int>(std::ceil(2 * pi * std::sin(th) / res)));
        for (int s = 0; s < steps; ++s) {
          const double ph = 2 * pi * s / steps;
          consider(Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                   std::cos(th)));
        }
      }
    }
    return {best, arg};
  }

private:
  std::vector<Eigen::MatrixXd> ks_;
};

Eigen::VectorXd random_unit(Eigen::Index k, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(k);
  for (Eigen::Index i = 0; i < k; ++i)
    w(i) = normal(rng);
  if (w.norm() == 0.0)
    w(0) = 1.0;
  return w.normalized();
}

} // namespace

Eigen::MatrixXd ConeBasis::combine(const Eigen::VectorXd &w) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < elements.size(); ++i)
    g += w(static_cast<Eigen::Index>(i)) * elements[i];
  return g;
}

Eigen::VectorXd ConeBasis::coordinates(const Eigen::MatrixXd &g) const {
  Eigen::VectorXd w(dimension());
  for (int i = 0; i < dimension(); ++i)
    w(i) = frobenius_dot(elements[static_cast<std::size_t>(i)], g);
  return w;
}

std::vector<Eigen::MatrixXd> orthonormalize(std::span<const Eigen::MatrixXd> mats, double tol) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto &m : mats) {
    Eigen::MatrixXd r = m;
    const double scale = std::sqrt(frobenius_dot(m, m));
    if (scale == 0.0)
      continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &q : out)
        r -= frobenius_dot(q, r) * q;
    const double nr = std::sqrt(frobenius_dot(r, r));
    if (nr > tol * scale)
      out.push_back(r / nr);
  }
  return out;
}

ConeBasis compatible_cone_basis(int dim, std::span<const Endomorphism> js) {
  for (const auto &j : js)
    if (j.rows() != dim || j.cols() != dim)
      throw MalformedInput("complex structure has the wrong size");
  std::vector<Eigen::MatrixXd> projected;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, dim);
      e(a, b) = e(b, a) = 1.0;
      projected.push_back(project_compatible(e, js));
    }
  ConeBasis cone;
  cone.n = dim;
  cone.elements = orthonormalize(projected);
  for (auto &e : cone.elements) {
    // Re-project to remove Gram-Schmidt round-off from the invariant subspace.
    e = project_compatible(e, js);
  }
  return cone;
}

std::string to_string(FeasibilityStatus s) {
  switch (s) {
  case FeasibilityStatus::feasible:
    return "FEASIBLE";
  case FeasibilityStatus::vacuous:
    return "VACUOUS";
  case FeasibilityStatus::numerically_infeasible:
    return "NUMERICALLY_INFEASIBLE";
  }
  return "?";
}

FeasibilityStatus status_from_string(const std::string &s) {
  if (s == "FEASIBLE")
    return FeasibilityStatus::feasible;
  if (s == "VACUOUS")
    return FeasibilityStatus::vacuous;
  if (s == "NUMERICALLY_INFEASIBLE")
    return FeasibilityStatus::numerically_infeasible;
  throw MalformedInput("unknown status '" + s + "'");
}

FeasibilityVerdict hkt_feasibility(const LieAlgebra &alg, const HypercomplexTriple &triple,
                                   const FeasibilityOptions &opts) {
  const auto js = triple_matrices(triple);
  return hkt_feasibility(alg, triple, compatible_cone_basis(alg.dim(), js), opts);
}

FeasibilityVerdict hkt_feasibility(const LieAlgebra &alg, const HypercomplexTriple &triple,
                                   const ConeBasis &cone, const FeasibilityOptions &opts) {
  const int n = alg.dim();
  const auto js = triple_matrices(triple);
  const auto basis = orthonormalize(cone.elements);
  const int m = static_cast<int>(basis.size());
  const auto rows = static_cast<Eigen::Index>(binomial(n, 3));

  // Phi(g) = (c1 - c2, c2 - c3), c_i = J_i d F_i, linear in g.
  Eigen::MatrixXd phi(2 * rows, m);
  for (int a = 0; a < m; ++a) {
    const Metric g(basis[static_cast<std::size_t>(a)]);
    std::array<KForm, 3> c;
    for (int i = 0; i < 3; ++i)
      c[static_cast<std::size_t>(i)] =
          j_on_form(js[static_cast<std::size_t>(i)], ce_d(alg, kaehler_form(g, js[static_cast<std::size_t>(i)])));
    phi.col(a) << (c[0] - c[1]).coeffs(), (c[1] - c[2]).coeffs();
  }

  FeasibilityVerdict v;
  v.seed = opts.seed;
  const double phi_max = m > 0 ? phi.cwiseAbs().maxCoeff() : 0.0;
  v.residuals["phi_max"] = phi_max;
  v.residuals["cone_dim"] = m;
  v.residuals["abelian_residual"] = is_abelian(alg, triple).max_residual;
  const double threshold = std::max(opts.tol, 1e-8);

  std::vector<Eigen::MatrixXd> kernel;
  if (phi_max <= 1e-12 * std::max(1.0, alg.max_abs_constant())) {
    kernel = basis;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    const double cut = 1e-10 * sv(0);
    std::vector<Eigen::MatrixXd> raw;
    for (int a = 0; a < m; ++a) {
      const bool null = a >= sv.size() || sv(a) <= cut;
      if (null) {
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (int b = 0; b < m; ++b)
          k += svd.matrixV()(b, a) * basis[static_cast<std::size_t>(b)];
        raw.push_back(k);
      }
    }
    kernel = orthonormalize(raw);
  }
  v.residuals["kernel_dim"] = static_cast<double>(kernel.size());

  if (phi_max <= 1e-12 * std::max(1.0, alg.max_abs_constant())) {
    v.status = FeasibilityStatus::vacuous;
    Eigen::MatrixXd w = project_compatible(Eigen::MatrixXd::Identity(n, n), js);
    w /= w.norm();
    v.witness = w;
    v.best_lambda_min = min_eig(w).value;
    v.residuals["hkt_residual"] = 0.0;
    return v;
  }

  if (kernel.empty()) {
    v.best_lambda_min = 0.0;
    v.residuals["hkt_residual"] = 0.0;
    return v;
  }

  const SphereMaximizer opt(kernel);
  const auto k = static_cast<Eigen::Index>(kernel.size());
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w;
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r));
    const Eigen::VectorXd w = opt.ascend(random_unit(k, rng), opts.max_iterations);
    const double f = opt.value(w);
    ++v.restarts;
    if (f > best) {
      best = f;
      best_w = w;
    }
    if (best > threshold)
      break;
  }
  if (opts.sphere_grid && k <= 3 && best <= threshold) {
    const auto [gbest, gw] = opt.grid(opts.grid_resolution);
    v.residuals["grid_best_lambda_min"] = gbest;
    // Polish the grid optimum; the grid point itself is within resolution.
    const Eigen::VectorXd polished = opt.ascend(gw, opts.max_iterations);
    const double fp = opt.value(polished);
    if (std::max(fp, gbest) > best) {
      best = std::max(fp, gbest);
      best_w = fp >= gbest ? polished : gw;
    }
  }
  v.best_lambda_min = best;
  const Eigen::MatrixXd g = opt.combine(best_w);
  if (best > threshold) {
    v.status = FeasibilityStatus::feasible;
    v.witness = g;
    const auto check = hkt_check(alg, Metric(0.5 * (g + g.transpose())), triple);
    v.residuals["hkt_residual"] = std::max(check.residual_12, check.residual_23);
  }
  return v;
}

namespace {

class BalancedProblem {
public:
  BalancedProblem(const LieAlgebra &alg, const Endomorphism &j, std::vector<Eigen::MatrixXd> basis)
      : basis_(std::move(basis)), m_(alg.dim() / 2 - 1) {
    for (const auto &e : basis_)
      f_.push_back(kaehler_form(Metric(e), j));
    d_ = d_matrix(alg, 2 * m_);
  }

  Eigen::MatrixXd metric(const Eigen::VectorXd &w) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis_[0].rows(), basis_[0].cols());
    for (std::size_t i = 0; i < basis_.size(); ++i)
      g += w(static_cast<Eigen::Index>(i)) * basis_[i];
    return g;
  }

  KForm form(const Eigen::VectorXd &w) const {
    KForm f(f_[0].dim(), 2);
    for (std::size_t i = 0; i < f_.size(); ++i)
      f += w(static_cast<Eigen::Index>(i)) * f_[i];
    return f;
  }

  Eigen::VectorXd dpower(const KForm &f) const { return d_ * wedge_power(f, m_).coeffs(); }

  // Objective and (sub)gradient in w.
  double value(const Eigen::VectorXd &w, Eigen::VectorXd *grad = nullptr) const {
    const auto e = min_eig(metric(w));
    if (!(e.value > 0.0))
      return std::numeric_limits<double>::infinity();
    const KForm f = form(w);
    const Eigen::VectorXd dp = dpower(f);
    const double nrm = dp.squaredNorm();
    const double lam = std::pow(e.value, 2 * m_);
    if (grad) {
      grad->resize(w.size());
      const KForm lower = wedge_power(f, m_ - 1);
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const Eigen::VectorXd ddi = d_ * (m_ * wedge(f_[static_cast<std::size_t>(i)], lower)).coeffs();
        const double dn = 2.0 * dp.dot(ddi);
        const double dl = e.vector.dot(basis_[static_cast<std::size_t>(i)] * e.vector);
        (*grad)(i) = dn / lam - 2.0 * m_ * nrm * dl / (lam * e.value);
      }
    }
    return nrm / lam;
  }

  Eigen::VectorXd descend(Eigen::VectorXd w, int iterations, double target) const {
    w.normalize();
    double f = value(w);
    double step = 0.1;
    for (int it = 0; it < iterations && f >= target && step > 1e-12; ++it) {
      Eigen::VectorXd grad;
      value(w, &grad);
      grad -= grad.dot(w) * w;
      const double gn = grad.norm();
      if (!(gn > 0.0) || !std::isfinite(gn))
        break;
      grad /= gn;
      bool moved = false;
      while (step > 1e-12) {
        const Eigen::VectorXd trial = (w - step * grad).normalized();
        const double ft = value(trial);
        if (ft < f) {
          moved = f - ft > 1e-14 * f;
          w = trial;
          f = ft;
          step = std::min(0.5, 2.0 * step);
          break;
        }
        step *= 0.5;
      }
      if (!moved)
        break;
    }
    return w;
  }

  int power() const noexcept { return m_; }

private:
  std::vector<Eigen::MatrixXd> basis_;
  std::vector<KForm> f_;
  Eigen::MatrixXd d_;
  int m_;
};

} // namespace

double balanced_objective(const LieAlgebra &alg, const Eigen::MatrixXd &g, const Endomorphism &j) {
  const int n = alg.dim();
  if (n % 2 != 0)
    throw PreconditionError("balanced condition needs even dimension", 0.0);
  const double lam = min_eig(g).value;
  if (!(lam > 0.0))
    return std::numeric_limits<double>::infinity();
  const KForm p = wedge_power(kaehler_form(Metric(g), j), n / 2 - 1);
  return ce_d(alg, p).coeffs().squaredNorm() / std::pow(lam, n - 2);
}

FeasibilityVerdict balanced_feasibility(const LieAlgebra &alg, const Endomorphism &j,
                                        const FeasibilityOptions &opts) {
  const std::vector<Endomorphism> js{j};
  return balanced_feasibility(alg, j, compatible_cone_basis(alg.dim(), js), opts);
}

FeasibilityVerdict balanced_feasibility(const LieAlgebra &alg, const Endomorphism &j,
                                        const ConeBasis &cone, const FeasibilityOptions &opts) {
  const int n = alg.dim();
  if (n % 2 != 0 || n < 2)
    throw PreconditionError("balanced condition needs even dimension", 0.0);
  const ComplexStructure cs(j);
  const double nij = nijenhuis(alg, j).max_abs;
  if (nij > 1e-9)
    throw PreconditionError("complex structure is not integrable", nij);

  const auto basis = orthonormalize(cone.elements);
  const BalancedProblem prob(alg, j, basis);
  const auto k = static_cast<Eigen::Index>(basis.size());
  const double target = opts.tol * opts.tol;

  auto coords = [&](const Eigen::MatrixXd &g) {
    Eigen::VectorXd w(k);
    for (Eigen::Index i = 0; i < k; ++i)
      w(i) = frobenius_dot(basis[static_cast<std::size_t>(i)], g);
    return w;
  };

  FeasibilityVerdict v;
  v.seed = opts.seed;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_w;
  const std::vector<Endomorphism> js{j};
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Eigen::VectorXd w0;
    if (r == 0) {
      w0 = coords(opts.initial ? project_compatible(*opts.initial, js)
                               : project_compatible(Eigen::MatrixXd::Identity(n, n), js));
    } else {
      std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(r));
      w0 = coords(random_compatible_metric(js, n, rng));
    }
    const Eigen::VectorXd w = prob.descend(w0, opts.max_iterations, target);
    const double f = prob.value(w);
    ++v.restarts;
    if (f < best) {
      best = f;
      best_w = w;
    }
    if (best < target)
      break;
  }

  const Eigen::MatrixXd g = prob.metric(best_w.normalized());
  const double lam = min_eig(g).value;
  const double dn = prob.dpower(prob.form(best_w.normalized())).squaredNorm();
  v.best_objective = best;
  v.best_lambda_min = lam;
  v.residuals["objective"] = best;
  v.residuals["objective_frobenius"] = dn; // |g|_F = 1 at the normalized point
  v.residuals["cone_dim"] = static_cast<double>(k);
  const Metric gm(0.5 * (g + g.transpose()));
  const auto check = balanced_check(alg, gm, j);
  v.residuals["delta_norm"] = check.delta_norm;
  v.residuals["dFn1_norm"] = check.dFn1_norm;
  if (best < target) {
    v.status = FeasibilityStatus::feasible;
    v.witness = gm.matrix();
  }
  return v;
}

std::vector<ScanRow> family_scan(const std::string &family,
                                 const std::vector<std::map<std::string, double>> &grid,
                                 ScanKind which, const FeasibilityOptions &opts) {
  if (family != "gt" && family != "gst")
    throw MalformedInput("scan family must be gt or gst");
  std::vector<ScanRow> rows;
  for (const auto &params : grid) {
    const Model model = catalog(family, params);
    ScanRow row{params, {}};
    if (which == ScanKind::hkt) {
      if (!model.has_triple())
        throw PreconditionError("family " + family + " carries no hypercomplex structure", 0.0);
      row.verdict = hkt_feasibility(model.algebra, model.triple(), opts);
    } else {
      if (!model.j)
        throw PreconditionError("family " + family + " carries no complex structure", 0.0);
      row.verdict = balanced_feasibility(model.algebra, *model.j, opts);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace nilgeom
