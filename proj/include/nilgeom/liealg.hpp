#pragma once

#include "nilgeom/kform.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace nilgeom {

/// Global default for "= 0" claims.
inline constexpr double kDefaultTol = 1e-10;

using Endomorphism = Eigen::MatrixXd;

/// One structure constant entry: [e_i, e_j] has coefficient `value` on e_k.
/// Indices are 0-based here; the file format uses 1-based indices.
struct Bracket {
  int i;
  int j;
  int k;
  double value;
};

/// Real Lie algebra given by structure constants c[i][j][k], meaning
/// [e_i, e_j] = sum_k c[i][j][k] e_k.
class LieAlgebra {
public:
  LieAlgebra() = default;

  /// Full constant tensor, row-major in (i, j, k). Antisymmetry in (i, j) is
  /// checked to 1e-12.
  LieAlgebra(int dim, std::vector<double> constants, std::vector<std::string> labels = {});

  /// Builds from i<j entries; the (j, i) entries are filled by antisymmetry.
  static LieAlgebra from_brackets(int dim, std::span<const Bracket> brackets);

  /// Builds from structure equations d e^k, using d alpha(X, Y) = -alpha([X, Y]).
  static LieAlgebra from_differentials(std::span<const KForm> de);

  static LieAlgebra abelian(int dim) { return LieAlgebra(dim, std::vector<double>(static_cast<std::size_t>(dim) * dim * dim)); }

  int dim() const noexcept { return dim_; }
  const std::vector<std::string> &labels() const noexcept { return labels_; }

  double c(int i, int j, int k) const {
    return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }
  const std::vector<double> &constants() const noexcept { return c_; }

  Eigen::VectorXd bracket(const Eigen::VectorXd &x, const Eigen::VectorXd &y) const;
  Eigen::VectorXd bracket(int i, int j) const;

  /// Matrix of ad_x in the basis: column j is [x, e_j].
  Eigen::MatrixXd ad(const Eigen::VectorXd &x) const;

  /// Same algebra expressed in the basis f_a = sum_i p(i, a) e_i.
  LieAlgebra change_basis(const Eigen::MatrixXd &p) const;

  double max_abs_constant() const;

private:
  int dim_ = 0;
  std::vector<double> c_;
  std::vector<std::string> labels_;
};

struct ValidationReport {
  double jacobi_residual = 0.0;
  std::optional<int> nilpotency_step;
  bool unimodular = true;
  int betti1 = 0;
  int derived_dim = 0;
  /// Dimensions of the lower central series g = g^1 > g^2 > ... as computed.
  std::vector<int> lower_central_series;
};

ValidationReport validate(const LieAlgebra &alg, double tol = kDefaultTol);

/// Max over basis triples of |[[e_i,e_j],e_k] + cyclic|.
double jacobi_residual(const LieAlgebra &alg);

/// Chevalley-Eilenberg differential on invariant forms.
KForm ce_d(const LieAlgebra &alg, const KForm &alpha);

/// Matrix of d : Lambda^k -> Lambda^{k+1} on coefficient vectors.
Eigen::MatrixXd d_matrix(const LieAlgebra &alg, int k);

/// Rank of a matrix using a relative singular value threshold.
int numerical_rank(const Eigen::MatrixXd &m, double tol = kDefaultTol);

} // namespace nilgeom
