#pragma once

#include "nilgeom/cxstruct.hpp"

#include <array>
#include <random>
#include <span>

namespace nilgeom {

/// Symmetric bilinear form on the algebra, g(e_i, e_j) = matrix(i, j).
class Metric {
public:
  Metric() = default;
  /// Throws MalformedInput unless square and symmetric to 1e-12 (relative).
  explicit Metric(Eigen::MatrixXd g);

  const Eigen::MatrixXd &matrix() const noexcept { return g_; }
  int dim() const noexcept { return static_cast<int>(g_.rows()); }
  double min_eigenvalue() const;
  bool is_positive_definite() const { return min_eigenvalue() > 0.0; }
  /// |J^T g J - g|_max
  double compatibility_residual(const Endomorphism &j) const;

private:
  Eigen::MatrixXd g_;
};

/// Tolerance for accepting a metric as J-compatible.
inline constexpr double kCompatTol = 1e-9;

/// F(X, Y) = g(JX, Y).
KForm kaehler_form(const Metric &g, const Endomorphism &j, double compat_tol = kCompatTol);

/// F^m by repeated wedge (F^0 is the constant 1).
KForm wedge_power(const KForm &f, int m);

/// Gram matrix of the induced inner product on Lambda^k: entries
/// <e^I, e^J> = det(g^{-1}[I, J]).
Eigen::MatrixXd form_gram(const Metric &g, int k);

double form_inner(const Metric &g, const KForm &a, const KForm &b);

/// Adjoint of the Chevalley-Eilenberg differential with respect to
/// `form_inner`. Requires a unimodular algebra and a positive definite g.
KForm codifferential(const LieAlgebra &alg, const Metric &g, const KForm &alpha);

struct BalancedResult {
  double delta_norm = 0.0; // sqrt(<dF*, dF*>) with dF* = codifferential of F
  double dFn1_norm = 0.0;  // Euclidean coefficient norm of d(F^{n-1})
  bool balanced = false;
  bool criteria_agree = true;
};

BalancedResult balanced_check(const LieAlgebra &alg, const Metric &g, const Endomorphism &j,
                              double tol = kDefaultTol);

struct HktResult {
  std::array<KForm, 3> c;                  // c_i = J_i dF_i
  double residual_12 = 0.0;                // |c1 - c2|_max
  double residual_23 = 0.0;                // |c2 - c3|_max
  double cyclic_residual = 0.0;            // same comparison via cyclic bracket sums
  double route_gap = 0.0;                  // max |c_i - cyclic sum_i| over basis triples
  bool hkt = false;                        // 3-form verdict
  bool cyclic_hkt = false;                 // cyclic-sum verdict
};

HktResult hkt_check(const LieAlgebra &alg, const Metric &g, const HypercomplexTriple &triple,
                    double tol = kDefaultTol);

/// Averages g over the group generated by the given structures: one J gives
/// {I, J}, a hypercomplex triple gives {I, J1, J2, J3}.
Eigen::MatrixXd project_compatible(const Eigen::MatrixXd &g, std::span<const Endomorphism> js);

/// Random positive definite metric compatible with `js`.
Eigen::MatrixXd random_compatible_metric(std::span<const Endomorphism> js, int dim,
                                         std::mt19937_64 &rng);

} // namespace nilgeom
