#include "nilgeom/symmetrize.hpp"

#include "nilgeom/connections.hpp"
#include "nilgeom/errors.hpp"
#include "nilgeom/feasibility.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace nilgeom {

namespace {

constexpr std::int64_t kChunk = 4096;

Eigen::VectorXd node(std::int64_t idx, int n, int per_axis) {
  Eigen::VectorXd x(n);
  for (int a = 0; a < n; ++a) {
    x(a) = static_cast<double>(idx % per_axis) / per_axis;
    idx /= per_axis;
  }
  return x;
}

template <class Eval>
Eigen::VectorXd pairwise_nodes(const Eval &eval, std::int64_t lo, std::int64_t hi, int n,
                               int per_axis, Eigen::Index size) {
  if (hi - lo <= 16) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(size);
    for (std::int64_t i = lo; i < hi; ++i)
      acc += eval(node(i, n, per_axis));
    return acc;
  }
  const std::int64_t mid = lo + (hi - lo) / 2;
  return pairwise_nodes(eval, lo, mid, n, per_axis, size) +
         pairwise_nodes(eval, mid, hi, n, per_axis, size);
}

Eigen::VectorXd pairwise_reduce(const std::vector<Eigen::VectorXd> &parts, std::size_t lo,
                                std::size_t hi) {
  if (hi - lo == 1)
    return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_reduce(parts, lo, mid) + pairwise_reduce(parts, mid, hi);
}

// Mean of eval over the periodic grid. Chunking is fixed, so the summation
// order and hence the result do not depend on the thread count.
template <class Eval>
Eigen::VectorXd grid_mean(const Eval &eval, int n, const QuadratureSpec &q, Eigen::Index size) {
  if (q.points_per_axis < 1)
    throw MalformedInput("quadrature needs at least one point per axis");
  std::int64_t total = 1;
  for (int a = 0; a < n; ++a) {
    if (total > q.max_nodes / q.points_per_axis)
      throw PreconditionError("quadrature grid exceeds the node cap of " +
                              std::to_string(q.max_nodes));
    total *= q.points_per_axis;
  }
  const std::int64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Eigen::VectorXd> parts(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::int64_t c = next++; c < chunks; c = next++) {
        const std::int64_t lo = c * kChunk;
        parts[static_cast<std::size_t>(c)] =
            pairwise_nodes(eval, lo, std::min(total, lo + kChunk), n, q.points_per_axis, size);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
      next = chunks;
    }
  };
  unsigned threads = q.threads ? q.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, chunks));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
  return pairwise_reduce(parts, 0, parts.size()) / static_cast<double>(total);
}

// Hodge star on an orthonormal coframe with volume e^1^...^e^n.
KForm hodge_star(const KForm &alpha) {
  const int n = alpha.dim();
  const Mask full = (Mask{1} << n) - 1;
  KForm out(n, n - alpha.degree());
  const auto &ms = alpha.masks();
  for (std::size_t r = 0; r < ms.size(); ++r) {
    const double v = alpha.coeffs()[static_cast<Eigen::Index>(r)];
    if (v != 0.0)
      out.coeff(full & ~ms[r]) += wedge_sign(ms[r], full & ~ms[r]) * v;
  }
  return out;
}

} // namespace

NilmanifoldChart::NilmanifoldChart(LieAlgebra alg) : alg_(std::move(alg)) {
  const auto rep = validate(alg_);
  if (!rep.nilpotency_step || *rep.nilpotency_step > 2)
    throw PreconditionError("charts are only available for 2-step nilpotent algebras");
}

Eigen::MatrixXd NilmanifoldChart::frame_matrix(const Eigen::VectorXd &x) const {
  const int n = dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (x(j) != 0.0)
        for (int k = 0; k < n; ++k)
          m(k, i) += 0.5 * x(j) * alg_.c(j, i, k);
  return m;
}

double NilmanifoldChart::derivative(const ScalarField &f, int i, const Eigen::VectorXd &x,
                                    double h) const {
  const Eigen::VectorXd v = frame_matrix(x).col(i);
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

double NilmanifoldChart::commutator_residual(const ScalarField &f, const Eigen::VectorXd &x,
                                             double h) const {
  const int n = dim();
  std::vector<double> ef(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    ef[static_cast<std::size_t>(k)] = derivative(f, k, x, h);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const ScalarField ej = [&, j](const Eigen::VectorXd &y) { return derivative(f, j, y, h); };
      const ScalarField ei = [&, i](const Eigen::VectorXd &y) { return derivative(f, i, y, h); };
      double r = derivative(ej, i, x, h) - derivative(ei, j, x, h);
      for (int k = 0; k < n; ++k)
        r -= alg_.c(i, j, k) * ef[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(r));
    }
  return worst;
}

FieldForm FieldForm::constant(const KForm &alpha) {
  FieldForm f;
  f.dim = alpha.dim();
  f.degree = alpha.degree();
  const Eigen::VectorXd c = alpha.coeffs();
  f.coefficients = [c](const Eigen::VectorXd &) { return c; };
  const auto rows = c.size();
  const int n = alpha.dim();
  f.frame_derivatives = [rows, n](const Eigen::VectorXd &) {
    return Eigen::MatrixXd::Zero(rows, n).eval();
  };
  return f;
}

KForm FieldForm::at(const Eigen::VectorXd &x) const {
  return KForm::from_coeffs(dim, degree, coefficients(x));
}

KForm average_form(const NilmanifoldChart &chart, const FieldForm &omega, const QuadratureSpec &q) {
  if (omega.dim != chart.dim())
    throw MalformedInput("form and chart have different dimensions");
  const auto size = static_cast<Eigen::Index>(binomial(omega.dim, omega.degree));
  auto eval = [&](const Eigen::VectorXd &x) {
    Eigen::VectorXd c = omega.coefficients(x);
    if (c.size() != size)
      throw MalformedInput("coefficient callable returned the wrong number of entries");
    if (!c.allFinite())
      throw PreconditionError("non-finite form coefficient at a quadrature node");
    return c;
  };
  return KForm::from_coeffs(omega.dim, omega.degree, grid_mean(eval, chart.dim(), q, size));
}

Metric average_metric(const NilmanifoldChart &chart, const FieldMetric &g, const QuadratureSpec &q) {
  const int n = chart.dim();
  if (g.dim != n)
    throw MalformedInput("metric and chart have different dimensions");
  auto eval = [&](const Eigen::VectorXd &x) {
    const Eigen::MatrixXd m = g.g(x);
    if (m.rows() != n || m.cols() != n || !m.allFinite())
      throw PreconditionError("field metric is malformed at a quadrature node");
    if (Eigen::LLT<Eigen::MatrixXd>(m).info() != Eigen::Success)
      throw PreconditionError("field metric is not positive definite at a quadrature node");
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()).eval();
  };
  const Eigen::VectorXd mean = grid_mean(eval, n, q, static_cast<Eigen::Index>(n) * n);
  Eigen::MatrixXd avg = Eigen::Map<const Eigen::MatrixXd>(mean.data(), n, n);
  Metric out(0.5 * (avg + avg.transpose()));
  if (!out.is_positive_definite())
    throw IntegrityError("averaged metric lost positive definiteness", out.min_eigenvalue());
  return out;
}

FieldForm field_d(const NilmanifoldChart &chart, const FieldForm &omega, double h) {
  const int n = chart.dim();
  const int k = omega.degree;
  const auto &in_masks = subsets(n, k);
  const Eigen::MatrixXd dmat = d_matrix(chart.algebra(), k);

  FieldForm out;
  out.dim = n;
  out.degree = k + 1;
  out.coefficients = [chart, omega, h, n, dmat, in_masks](const Eigen::VectorXd &x) {
    const Eigen::VectorXd f = omega.coefficients(x);
    Eigen::MatrixXd df;
    if (omega.frame_derivatives) {
      df = omega.frame_derivatives(x);
    } else {
      df.resize(f.size(), n);
      const Eigen::MatrixXd frame = chart.frame_matrix(x);
      for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd v = frame.col(j);
        df.col(j) = (omega.coefficients(x + h * v) - omega.coefficients(x - h * v)) / (2.0 * h);
      }
    }
    Eigen::VectorXd res = dmat * f;
    for (std::size_t r = 0; r < in_masks.size(); ++r)
      for (int j = 0; j < n; ++j) {
        const Mask mj = Mask{1} << j;
        if (in_masks[r] & mj)
          continue;
        const double v = df(static_cast<Eigen::Index>(r), j);
        res(static_cast<Eigen::Index>(mask_rank(in_masks[r] | mj))) += wedge_sign(mj, in_masks[r]) * v;
      }
    return res;
  };
  return out;
}

AverageCommutesResult check_average_commutes_d(const NilmanifoldChart &chart, const FieldForm &omega,
                                               const QuadratureSpec &q, double h) {
  AverageCommutesResult r;
  r.d_of_average = ce_d(chart.algebra(), average_form(chart, omega, q));
  r.average_of_d = average_form(chart, field_d(chart, omega, h), q);
  r.residual = (r.d_of_average - r.average_of_d).max_abs();
  return r;
}

RootResult root_nm1(const KForm &psi, const Endomorphism &j) {
  const int n = psi.dim();
  if (n != 6)
    throw PreconditionError("root extraction is implemented for complex dimension 3 only");
  if (psi.degree() != n - 2)
    throw MalformedInput("root extraction expects a form of degree 2n-2");
  const ComplexStructure cs(j);
  const double scale = psi.max_abs();
  if (!(scale > 0.0))
    throw PreconditionError("form is zero");
  const double jinv = (j_on_form(j, psi) - psi).max_abs();
  if (jinv > 1e-9 * scale)
    throw PreconditionError("form is not J-invariant", jinv / scale);

  const std::vector<Endomorphism> js{j};
  const Eigen::MatrixXd g0 = project_compatible(Eigen::MatrixXd::Identity(n, n), js);

  // Positivity: the (1,1)-form *Psi must define a positive Hermitian form.
  {
    const auto frame = OrthonormalFrame::of(Metric(g0));
    const KForm chi = hodge_star(frame.to_frame(psi));
    const Endomorphism jf = frame.to_frame(j);
    Eigen::MatrixXd c(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        c(a, b) = chi.at({a, b});
    const Eigen::MatrixXd h = c * jf;
    const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (h + h.transpose()))
                           .eigenvalues()
                           .minCoeff();
    if (!(lam > 1e-12 * scale))
      throw PreconditionError("form is not positive", lam);
  }

  const ConeBasis cone = compatible_cone_basis(n, js);
  std::vector<KForm> basis;
  for (const auto &e : cone.elements)
    basis.push_back(kaehler_form(Metric(e), j));
  const auto m = static_cast<Eigen::Index>(basis.size());
  auto form = [&](const Eigen::VectorXd &w) {
    KForm f(n, 2);
    for (Eigen::Index a = 0; a < m; ++a)
      f += w(a) * basis[static_cast<std::size_t>(a)];
    return f;
  };
  auto positive = [&](const Eigen::VectorXd &w) {
    return Eigen::LLT<Eigen::MatrixXd>(cone.combine(w)).info() == Eigen::Success;
  };

  Eigen::VectorXd w = cone.coordinates(g0);
  {
    const KForm f0 = form(w);
    const KForm sq = wedge(f0, f0);
    const double c2 = psi.coeffs().dot(sq.coeffs()) / sq.coeffs().squaredNorm();
    w *= std::sqrt(c2);
  }

  RootResult out;
  Eigen::VectorXd res = psi.coeffs() - wedge(form(w), form(w)).coeffs();
  for (; out.iterations < 200 && res.cwiseAbs().maxCoeff() > 1e-14 * scale; ++out.iterations) {
    const KForm f = form(w);
    Eigen::MatrixXd jac(res.size(), m);
    for (Eigen::Index a = 0; a < m; ++a)
      jac.col(a) = 2.0 * wedge(basis[static_cast<std::size_t>(a)], f).coeffs();
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(res);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-10) {
      const Eigen::VectorXd trial = w + t * step;
      if (positive(trial)) {
        const Eigen::VectorXd r2 = psi.coeffs() - wedge(form(trial), form(trial)).coeffs();
        if (r2.norm() < res.norm()) {
          w = trial;
          res = r2;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved)
      break;
  }
  out.f = form(w);
  out.residual = res.cwiseAbs().maxCoeff() / scale;
  if (out.residual > 1e-8)
    throw ConvergenceError("root extraction did not converge", out.residual);
  return out;
}

} // namespace nilgeom
