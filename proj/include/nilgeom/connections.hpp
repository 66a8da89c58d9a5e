#pragma once

#include "nilgeom/metrics.hpp"

#include <vector>

namespace nilgeom {

/// g-orthonormal frame obtained by Gram-Schmidt on the algebra basis:
/// frame vector a is sum_i p(i, a) e_i, and p^T g p = I.
struct OrthonormalFrame {
  Eigen::MatrixXd p;
  Eigen::MatrixXd pinv;

  static OrthonormalFrame of(const Metric &g);
  /// Form on the algebra basis -> same form on the frame.
  KForm to_frame(const KForm &alpha) const { return pullback(alpha, p); }
  KForm from_frame(const KForm &alpha) const { return pullback(alpha, pinv); }
  Endomorphism to_frame(const Endomorphism &j) const { return pinv * j * p; }
};

/// Invariant connection on (L, g), stored in the orthonormal frame as
/// A(a, b, c) = g(nabla_{f_a} f_b, f_c).
class Connection {
public:
  Connection(LieAlgebra framed, OrthonormalFrame frame, std::vector<double> coeffs);

  int dim() const noexcept { return framed_.dim(); }
  double frame_coeff(int a, int b, int c) const {
    return a_[(static_cast<std::size_t>(a) * dim() + b) * dim() + c];
  }
  /// Matrix of nabla_{f_a} on frame components (column b is nabla_{f_a} f_b).
  Eigen::MatrixXd covariant(int a) const;
  /// Christoffel symbols in the algebra basis: nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k.
  std::vector<double> christoffel() const;

  const LieAlgebra &framed_algebra() const noexcept { return framed_; }
  const OrthonormalFrame &frame() const noexcept { return frame_; }

  /// max |A(a,b,c) + A(a,c,b)|
  double metric_residual() const;
  /// tau(a, b, c) = g(f_a, T(f_b, f_c)) with T(X,Y) = nabla_X Y - nabla_Y X - [X,Y].
  std::vector<double> torsion_tensor() const;
  /// max |nabla J - J nabla| over frame entries (J given on the algebra basis).
  double complex_residual(const Endomorphism &j) const;

private:
  LieAlgebra framed_;
  OrthonormalFrame frame_;
  std::vector<double> a_;
};

Connection levi_civita(const LieAlgebra &alg, const Metric &g);

/// Largest entry of the torsion tensor.
double torsion_max(const Connection &conn);

enum class HermitianKind { bismut, chern };

struct HermitianConnectionResult {
  Connection connection;
  double metric_residual = 0.0;
  double complex_residual = 0.0;
  double torsion_residual = 0.0;
  int rank = 0;
  int unknowns = 0;
};

/// Solves for the metric connection with nabla J = 0 and prescribed torsion,
/// F(X, Y) = g(JX, Y):
///   bismut: g(X, T(Y, Z)) = dF(JX, JY, JZ)                  (totally skew)
///   chern:  g(X, T(Y, Z)) = 1/2 (dF(JX, Y, Z) - dF(JX, JY, JZ))
/// Throws IntegrityError naming the failed block on inconsistency or rank loss.
HermitianConnectionResult hermitian_connection(const LieAlgebra &alg, const Metric &g,
                                               const Endomorphism &j, HermitianKind kind,
                                               double tol = 1e-9);

/// Curvature endomorphisms in the frame, r[a * n + b] = R(f_a, f_b).
struct CurvatureTensor {
  int dim = 0;
  std::vector<Eigen::MatrixXd> r;
  const Eigen::MatrixXd &operator()(int a, int b) const {
    return r[static_cast<std::size_t>(a * dim + b)];
  }
};

CurvatureTensor curvature(const Connection &conn);

/// rho(X, Y) = 1/2 sum_a g(R(X, Y) f_a, J f_a) over the orthonormal frame,
/// returned on the algebra basis.
KForm ricci_form(const Connection &conn, const Endomorphism &j);

struct RicciRelation {
  KForm ricci_bismut;
  KForm ricci_chern;
  KForm d_delta_f;
  double residual = 0.0; // |rho_B - rho_C - d delta F|_max
};

RicciRelation verify_ricci_relation(const LieAlgebra &alg, const Metric &g, const Endomorphism &j);

} // namespace nilgeom
