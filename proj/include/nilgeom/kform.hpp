#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nilgeom {

/// Index sets {i1 < ... < ik} are stored as bitmasks over the basis.
using Mask = std::uint32_t;

inline constexpr int kMaxDim = 16;

std::uint64_t binomial(int n, int k);

/// All k-subsets of {0..n-1}, in increasing mask order (colexicographic).
/// The position of a mask in this list is `mask_rank(mask)`.
const std::vector<Mask> &subsets(int n, int k);

std::size_t mask_rank(Mask m);

/// Sign of e^a ^ e^b relative to e^(a|b); 0 when the sets intersect.
int wedge_sign(Mask a, Mask b);

/// 0-based index tuple of a mask, ascending.
std::vector<int> mask_indices(Mask m);

/// Alternating k-linear form on an n-dimensional space, stored densely over
/// strictly increasing index tuples in the dual basis e^1..e^n. The basis
/// monomials satisfy e^{i1}^...^e^{ik}(e_{i1},...,e_{ik}) = 1.
class KForm {
public:
  KForm() = default;
  KForm(int dim, int degree);

  static KForm basis(int dim, std::span<const int> indices);
  static KForm basis(int dim, std::initializer_list<int> indices) {
    return basis(dim, std::span<const int>(indices.begin(), indices.size()));
  }
  static KForm from_coeffs(int dim, int degree, Eigen::VectorXd coeffs);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs_.size()); }

  const Eigen::VectorXd &coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXd &coeffs() noexcept { return coeffs_; }

  /// Coefficient of the monomial with index set `m` (|m| must equal degree).
  double coeff(Mask m) const;
  double &coeff(Mask m);

  /// Value on (e_{i1},...,e_{ik}) for an arbitrary 0-based tuple.
  double at(std::span<const int> indices) const;
  double at(std::initializer_list<int> indices) const {
    return at(std::span<const int>(indices.begin(), indices.size()));
  }
  /// Adds v to the component so that at(indices) increases by v.
  void add(std::span<const int> indices, double v);

  const std::vector<Mask> &masks() const { return subsets(dim_, degree_); }

  /// alpha(v_1,...,v_k) = sum_I alpha_I det(V[I, :]).
  double evaluate(std::span<const Eigen::VectorXd> args) const;

  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }
  double norm() const { return coeffs_.norm(); }

  KForm &operator+=(const KForm &o);
  KForm &operator-=(const KForm &o);
  KForm &operator*=(double s) {
    coeffs_ *= s;
    return *this;
  }

  friend KForm operator+(KForm a, const KForm &b) { return a += b; }
  friend KForm operator-(KForm a, const KForm &b) { return a -= b; }
  friend KForm operator*(double s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, double s) { return a *= s; }
  friend KForm operator-(KForm a) { return a *= -1.0; }

private:
  int dim_ = 0;
  int degree_ = 0;
  Eigen::VectorXd coeffs_;
};

KForm wedge(const KForm &a, const KForm &b);

/// (M^* alpha)(X_1,...,X_k) = alpha(M X_1, ..., M X_k).
KForm pullback(const KForm &alpha, const Eigen::MatrixXd &m);

/// Human readable sum of monomials, 1-based ("2 e1^e2 - e3^e4").
std::string to_string(const KForm &alpha, double drop_below = 1e-14);

/// Complex-valued form as a (real, imaginary) pair of real forms.
struct ComplexForm {
  KForm re;
  KForm im;

  ComplexForm() = default;
  ComplexForm(KForm r, KForm i) : re(std::move(r)), im(std::move(i)) {}
  explicit ComplexForm(const KForm &r) : re(r), im(r.dim(), r.degree()) {}

  int dim() const { return re.dim(); }
  int degree() const { return re.degree(); }
  ComplexForm conj() const { return {re, -im}; }
  double max_abs() const { return std::max(re.max_abs(), im.max_abs()); }

  ComplexForm &operator+=(const ComplexForm &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend ComplexForm operator+(ComplexForm a, const ComplexForm &b) { return a += b; }
  friend ComplexForm operator-(ComplexForm a, const ComplexForm &b) {
    a.re -= b.re;
    a.im -= b.im;
    return a;
  }
  friend ComplexForm operator*(std::complex<double> z, const ComplexForm &a) {
    return {z.real() * a.re - z.imag() * a.im, z.real() * a.im + z.imag() * a.re};
  }
};

ComplexForm wedge(const ComplexForm &a, const ComplexForm &b);

} // namespace nilgeom
