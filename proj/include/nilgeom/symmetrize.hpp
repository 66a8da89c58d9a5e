#pragma once

#include "nilgeom/metrics.hpp"

#include <cstdint>
#include <functional>

namespace nilgeom {

using ScalarField = std::function<double(const Eigen::VectorXd &)>;

/// Exponential coordinates x in [0,1]^n on the simply connected group of a
/// 2-step nilpotent algebra. The left-invariant frame is
///   E_i = d_i + 1/2 sum_{j,k} x_j c[j][i][k] d_k.
class NilmanifoldChart {
public:
  /// Throws PreconditionError unless the algebra is at most 2-step nilpotent.
  explicit NilmanifoldChart(LieAlgebra alg);

  const LieAlgebra &algebra() const noexcept { return alg_; }
  int dim() const noexcept { return alg_.dim(); }

  /// Column i holds the coordinate components of E_i at x.
  Eigen::MatrixXd frame_matrix(const Eigen::VectorXd &x) const;
  double frame_determinant(const Eigen::VectorXd &x) const { return frame_matrix(x).determinant(); }

  /// (E_i f)(x) by a central difference along E_i(x).
  double derivative(const ScalarField &f, int i, const Eigen::VectorXd &x, double h = 1e-5) const;
  /// max_{i<j} |E_i E_j f - E_j E_i f - sum_k c[i][j][k] E_k f| at x.
  double commutator_residual(const ScalarField &f, const Eigen::VectorXd &x, double h = 1e-4) const;

private:
  LieAlgebra alg_;
};

/// k-form sum_I f_I(x) e^I over the invariant coframe. `coefficients` returns
/// the f_I in increasing-subset order. The optional `frame_derivatives` returns
/// the matrix (E_j f_I)(x) with rows I and columns j; without it, field_d uses
/// finite differences.
struct FieldForm {
  int dim = 0;
  int degree = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> coefficients;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd &)> frame_derivatives;

  static FieldForm constant(const KForm &alpha);
  KForm at(const Eigen::VectorXd &x) const;
};

struct FieldMetric {
  int dim = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd &)> g;
};

struct QuadratureSpec {
  int points_per_axis = 16;
  std::int64_t max_nodes = std::int64_t{1} << 24;
  /// 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// Rectangle rule on the periodic grid x = idx / N (the trapezoidal rule for
/// periodic integrands).
KForm average_form(const NilmanifoldChart &chart, const FieldForm &omega,
                   const QuadratureSpec &q = {});
Metric average_metric(const NilmanifoldChart &chart, const FieldMetric &g,
                      const QuadratureSpec &q = {});

/// d omega = sum_j (E_j f_I) e^j ^ e^I + sum_I f_I d(e^I).
FieldForm field_d(const NilmanifoldChart &chart, const FieldForm &omega, double h = 1e-5);

struct AverageCommutesResult {
  KForm d_of_average;
  KForm average_of_d;
  double residual = 0.0;
};

AverageCommutesResult check_average_commutes_d(const NilmanifoldChart &chart, const FieldForm &omega,
                                               const QuadratureSpec &q = {}, double h = 1e-5);

struct RootResult {
  KForm f;
  double residual = 0.0; // |F^{n-1} - Psi|_max / |Psi|_max
  int iterations = 0;
};

/// Positive J-invariant 2-form F with F^{n-1} = Psi. Implemented for n = 3.
/// Throws PreconditionError when Psi is not positive, ConvergenceError when
/// the iteration stalls.
RootResult root_nm1(const KForm &psi, const Endomorphism &j);

} // namespace nilgeom
