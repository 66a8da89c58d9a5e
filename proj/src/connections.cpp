#include "nilgeom/connections.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>

namespace nilgeom {

namespace {

std::size_t idx3(int n, int a, int b, int c) {
  return (static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)) * n +
         static_cast<std::size_t>(c);
}

// Trace convention for the Ricci form; the identity Ric^B = Ric^C + d(delta F) pins it.
constexpr double kRicciTraceFactor = 0.5;

} // namespace

OrthonormalFrame OrthonormalFrame::of(const Metric &g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g.matrix());
  if (llt.info() != Eigen::Success)
    throw PreconditionError("metric is not positive definite", g.min_eigenvalue());
  OrthonormalFrame f;
  const Eigen::MatrixXd l = llt.matrixL();
  f.pinv = l.transpose();
  f.p = f.pinv.inverse();
  return f;
}

Connection::Connection(LieAlgebra framed, OrthonormalFrame frame, std::vector<double> coeffs)
    : framed_(std::move(framed)), frame_(std::move(frame)), a_(std::move(coeffs)) {
  const auto n = static_cast<std::size_t>(framed_.dim());
  if (a_.size() != n * n * n)
    throw MalformedInput("connection coefficient array has wrong size");
}

Eigen::MatrixXd Connection::covariant(int a) const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      m(c, b) = frame_coeff(a, b, c);
  return m;
}

std::vector<double> Connection::christoffel() const {
  const int n = dim();
  const Eigen::MatrixXd &p = frame_.p;
  const Eigen::MatrixXd &pinv = frame_.pinv;
  std::vector<double> out(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n); // frame components of nabla_{e_i} e_j
      for (int a = 0; a < n; ++a) {
        if (pinv(a, i) == 0.0)
          continue;
        for (int b = 0; b < n; ++b) {
          const double w = pinv(a, i) * pinv(b, j);
          if (w == 0.0)
            continue;
          for (int c = 0; c < n; ++c)
            v[c] += w * frame_coeff(a, b, c);
        }
      }
      const Eigen::VectorXd e = p * v;
      for (int k = 0; k < n; ++k)
        out[idx3(n, i, j, k)] = e[k];
    }
  return out;
}

double Connection::metric_residual() const {
  const int n = dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c)
        worst = std::max(worst, std::abs(frame_coeff(a, b, c) + frame_coeff(a, c, b)));
  return worst;
}

std::vector<double> Connection::torsion_tensor() const {
  const int n = dim();
  std::vector<double> tau(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        tau[idx3(n, a, b, c)] = frame_coeff(b, c, a) - frame_coeff(c, b, a) - framed_.c(b, c, a);
  return tau;
}

double Connection::complex_residual(const Endomorphism &j_alg) const {
  const int n = dim();
  const Endomorphism j = frame_.to_frame(j_alg);
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    const Eigen::MatrixXd cov = covariant(a);
    worst = std::max(worst, (cov * j - j * cov).cwiseAbs().maxCoeff());
  }
  return worst;
}

Connection levi_civita(const LieAlgebra &alg, const Metric &g) {
  const OrthonormalFrame frame = OrthonormalFrame::of(g);
  LieAlgebra framed = alg.change_basis(frame.p);
  const int n = alg.dim();
  std::vector<double> a(static_cast<std::size_t>(n) * n * n);
  // 2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y) for invariant fields.
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        a[idx3(n, x, y, z)] = 0.5 * (framed.c(x, y, z) - framed.c(y, z, x) + framed.c(z, x, y));
  return Connection(std::move(framed), frame, std::move(a));
}

double torsion_max(const Connection &conn) {
  double worst = 0.0;
  for (double v : conn.torsion_tensor())
    worst = std::max(worst, std::abs(v));
  return worst;
}

HermitianConnectionResult hermitian_connection(const LieAlgebra &alg, const Metric &g,
                                               const Endomorphism &j_alg, HermitianKind kind,
                                               double tol) {
  const int n = alg.dim();
  const KForm f_alg = kaehler_form(g, j_alg);
  const OrthonormalFrame frame = OrthonormalFrame::of(g);
  LieAlgebra framed = alg.change_basis(frame.p);
  const Endomorphism j = frame.to_frame(j_alg);
  const KForm df = frame.to_frame(ce_d(alg, f_alg));

  // Prescribed torsion tau(a,b,c) = g(f_a, T(f_b, f_c)), with F(X,Y) = g(JX,Y):
  //   bismut: tau = dF(JX,JY,JZ) = -(J dF)(X,Y,Z), totally skew
  //   chern:  tau = 1/2 (dF(JX,Y,Z) - dF(JX,JY,JZ)), the part of dF(JX,.,.)
  //           that is J-anti-invariant in the last two slots
  auto prescribed = [&](int a, int b, int c) {
    const Eigen::VectorXd ja = j.col(a), jb = j.col(b), jc = j.col(c);
    const double all_j = df.evaluate(std::vector<Eigen::VectorXd>{ja, jb, jc});
    if (kind == HermitianKind::bismut)
      return all_j;
    const double first_j = df.evaluate(
        std::vector<Eigen::VectorXd>{ja, Eigen::VectorXd::Unit(n, b), Eigen::VectorXd::Unit(n, c)});
    return 0.5 * (first_j - all_j);
  };

  // Unknowns: A(a, b, c) for b < c; A(a, c, b) = -A(a, b, c), A(a, b, b) = 0.
  const int pairs = n * (n - 1) / 2;
  std::vector<int> pair_index(static_cast<std::size_t>(n) * n, -1);
  for (int b = 0, p = 0; b < n; ++b)
    for (int c = b + 1; c < n; ++c, ++p)
      pair_index[static_cast<std::size_t>(b * n + c)] = p;
  const int unknowns = n * pairs;
  auto add_term = [&](Eigen::MatrixXd &row_block, Eigen::Index row, int a, int b, int c,
                      double w) {
    if (b == c || w == 0.0)
      return;
    const double sign = b < c ? 1.0 : -1.0;
    const int p = pair_index[static_cast<std::size_t>(b < c ? b * n + c : c * n + b)];
    row_block(row, a * pairs + p) += sign * w;
  };

  // Torsion block: A(b,c,a) - A(c,b,a) = tau(a,b,c) + c(b,c,a), for b < c.
  Eigen::MatrixXd tors = Eigen::MatrixXd::Zero(n * pairs, unknowns);
  Eigen::VectorXd tors_rhs(n * pairs);
  Eigen::Index row = 0;
  if (kind == HermitianKind::bismut) {
    // Total antisymmetry of the prescription is part of the Bismut contract.
    double skew = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          skew = std::max(skew, std::abs(prescribed(a, b, c) + prescribed(b, a, c)));
    if (skew > tol)
      throw IntegrityError("Bismut torsion prescription is not totally antisymmetric", skew);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b + 1; c < n; ++c, ++row) {
        add_term(tors, row, b, c, a, 1.0);
        add_term(tors, row, c, b, a, -1.0);
        tors_rhs[row] = prescribed(a, b, c) + framed.c(b, c, a);
      }

  // Complex block: sum_m J(m,b) A(a,m,c) - sum_m J(c,m) A(a,b,m) = 0.
  Eigen::MatrixXd cplx = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n * n, unknowns);
  row = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c, ++row)
        for (int m = 0; m < n; ++m) {
          add_term(cplx, row, a, m, c, j(m, b));
          add_term(cplx, row, a, b, m, -j(c, m));
        }

  Eigen::MatrixXd system(tors.rows() + cplx.rows(), unknowns);
  system << tors, cplx;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.rows());
  rhs.head(tors.rows()) = tors_rhs;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  if (rank < unknowns)
    throw IntegrityError("Hermitian connection system is rank deficient (rank " +
                         std::to_string(rank) + " of " + std::to_string(unknowns) + ")");
  const Eigen::VectorXd x = qr.solve(rhs);

  HermitianConnectionResult res{
      Connection(framed, frame, std::vector<double>(static_cast<std::size_t>(n) * n * n, 0.0))};
  std::vector<double> a(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const double v = x[i * pairs + pair_index[static_cast<std::size_t>(b * n + c)]];
        a[idx3(n, i, b, c)] = v;
        a[idx3(n, i, c, b)] = -v;
      }
  res.connection = Connection(std::move(framed), frame, std::move(a));
  res.rank = rank;
  res.unknowns = unknowns;
  res.torsion_residual = (tors * x - tors_rhs).cwiseAbs().maxCoeff();
  res.complex_residual = (cplx * x).cwiseAbs().maxCoeff();
  res.metric_residual = res.connection.metric_residual();
  if (res.torsion_residual > tol)
    throw IntegrityError("Hermitian connection: torsion block inconsistent",
                         res.torsion_residual);
  if (res.complex_residual > tol)
    throw IntegrityError("Hermitian connection: nabla J = 0 block inconsistent",
                         res.complex_residual);
  return res;
}

CurvatureTensor curvature(const Connection &conn) {
  const int n = conn.dim();
  const LieAlgebra &alg = conn.framed_algebra();
  std::vector<Eigen::MatrixXd> gam;
  for (int a = 0; a < n; ++a)
    gam.push_back(conn.covariant(a));
  CurvatureTensor r;
  r.dim = n;
  r.r.assign(static_cast<std::size_t>(n) * n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Eigen::MatrixXd m = gam[static_cast<std::size_t>(a)] * gam[static_cast<std::size_t>(b)] -
                          gam[static_cast<std::size_t>(b)] * gam[static_cast<std::size_t>(a)];
      for (int k = 0; k < n; ++k)
        if (alg.c(a, b, k) != 0.0)
          m -= alg.c(a, b, k) * gam[static_cast<std::size_t>(k)];
      r.r[static_cast<std::size_t>(a * n + b)] = m;
      r.r[static_cast<std::size_t>(b * n + a)] = -m;
    }
  return r;
}

KForm ricci_form(const Connection &conn, const Endomorphism &j_alg) {
  const int n = conn.dim();
  const Endomorphism j = conn.frame().to_frame(j_alg);
  const CurvatureTensor r = curvature(conn);
  KForm rho(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double v = kRicciTraceFactor * (j.transpose() * r(a, b)).trace();
      rho.add(std::vector<int>{a, b}, v);
    }
  return conn.frame().from_frame(rho);
}

RicciRelation verify_ricci_relation(const LieAlgebra &alg, const Metric &g,
                                    const Endomorphism &j) {
  RicciRelation rel;
  rel.ricci_bismut = ricci_form(hermitian_connection(alg, g, j, HermitianKind::bismut).connection, j);
  rel.ricci_chern = ricci_form(hermitian_connection(alg, g, j, HermitianKind::chern).connection, j);
  rel.d_delta_f = ce_d(alg, codifferential(alg, g, kaehler_form(g, j)));
  rel.residual = (rel.ricci_bismut - rel.ricci_chern - rel.d_delta_f).max_abs();
  return rel;
}

} // namespace nilgeom
