#pragma once

#include "nilgeom/liealg.hpp"

#include <array>
#include <vector>

namespace nilgeom {

/// Endomorphism J with J^2 = -I. Column j of the matrix is J e_j.
class ComplexStructure {
public:
  ComplexStructure() = default;
  /// Throws PreconditionError when |J^2 + I|_max exceeds `tol`.
  explicit ComplexStructure(Endomorphism j, double tol = 1e-9);

  const Endomorphism &matrix() const noexcept { return j_; }
  int dim() const noexcept { return static_cast<int>(j_.rows()); }
  /// |J^2 + I|_max
  double square_residual() const;

private:
  Endomorphism j_;
};

struct HypercomplexTriple {
  ComplexStructure j1, j2, j3;

  /// J3 := J1 J2.
  static HypercomplexTriple from_pair(const ComplexStructure &j1, const ComplexStructure &j2);
  const ComplexStructure &operator[](int i) const { return i == 0 ? j1 : (i == 1 ? j2 : j3); }
};

/// Standard complex structure on R^{2m}: J e_{2a} = e_{2a+1} (0-based).
Endomorphism standard_complex_structure(int dim);

struct NijenhuisResult {
  /// tensor[i * n + j] = N(e_i, e_j)
  std::vector<Eigen::VectorXd> tensor;
  double max_abs = 0.0;
};

/// N(X,Y) = [JX,JY] - [X,Y] - J[JX,Y] - J[X,JY]. Requires J^2 = -I.
NijenhuisResult nijenhuis(const LieAlgebra &alg, const Endomorphism &j, double tol = 1e-9);

struct HypercomplexReport {
  Endomorphism j3;
  double quaternion_residual = 0.0;
  std::array<double, 3> integrability{};
  double max_residual() const;
};

HypercomplexReport hypercomplex_check(const LieAlgebra &alg, const Endomorphism &j1,
                                      const Endomorphism &j2, double tol = 1e-9);

struct AbelianResult {
  bool abelian = false;
  double max_residual = 0.0;
};

/// max_i max_{a<b} |[J_i e_a, J_i e_b] - [e_a, e_b]|
AbelianResult is_abelian(const LieAlgebra &alg, const HypercomplexTriple &triple,
                         double tol = kDefaultTol);

/// (J alpha)(X_1..X_k) = (-1)^k alpha(J X_1, ..., J X_k).
KForm j_on_form(const Endomorphism &j, const KForm &alpha);

/// Basis of (1,0)-forms: a - i (a o J) for greedily chosen dual basis vectors a,
/// so that J e_{2a-1} = e_{2a} yields e^{2a-1} + i e^{2a}. Each returned omega
/// satisfies omega(JX) = i omega(X).
std::vector<ComplexForm> coframe10(const LieAlgebra &alg, const Endomorphism &j);

struct HolomorphicVolumeResult {
  bool closed = false;
  double residual = 0.0;
  /// Integrability of J; the closedness test is only meaningful when this is ~0.
  double nijenhuis_max = 0.0;
};

HolomorphicVolumeResult holomorphic_volume_check(const LieAlgebra &alg, const Endomorphism &j,
                                                 double tol = kDefaultTol);

struct JzResult {
  Eigen::MatrixXd matrix;
  bool invertible = false;
  double min_singular_value = 0.0;
};

/// Endomorphism J_Z of the complement g1 = span{e_i : i in complement} solving
/// g(J_Z X, Y) = g([X, Y], Z).
JzResult jz_map(const LieAlgebra &alg, const Eigen::MatrixXd &g, const Eigen::VectorXd &z,
                std::span<const int> complement, double tol = kDefaultTol);

} // namespace nilgeom
