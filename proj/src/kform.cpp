#include "nilgeom/kform.hpp"

#include "nilgeom/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace nilgeom {

namespace {

using SubsetTable = std::array<std::array<std::vector<Mask>, kMaxDim + 1>, kMaxDim + 1>;

SubsetTable build_subset_table() {
  SubsetTable table;
  for (int n = 0; n <= kMaxDim; ++n) {
    const Mask limit = Mask{1} << n;
    for (Mask m = 0; m < limit; ++m)
      table[n][std::popcount(m)].push_back(m);
  }
  return table;
}

void check_dims(int dim, int degree) {
  if (dim < 0 || dim > kMaxDim)
    throw MalformedInput("form dimension " + std::to_string(dim) + " outside [0, " +
                         std::to_string(kMaxDim) + "]");
  if (degree < 0)
    throw MalformedInput("negative form degree");
}

// Sorts a tuple in place, returning the permutation sign (0 on repeats).
int sort_with_sign(std::vector<int> &idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j])
        return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

Mask to_mask(std::span<const int> idx, int dim) {
  Mask m = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim)
      throw MalformedInput("form index " + std::to_string(i) + " out of range");
    m |= Mask{1} << i;
  }
  return m;
}

} // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n)
    return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

const std::vector<Mask> &subsets(int n, int k) {
  static const SubsetTable table = build_subset_table();
  static const std::vector<Mask> empty;
  if (n < 0 || n > kMaxDim || k < 0 || k > n)
    return empty;
  return table[n][k];
}

std::size_t mask_rank(Mask m) {
  std::size_t rank = 0;
  int count = 0;
  while (m) {
    const int pos = std::countr_zero(m);
    ++count;
    rank += binomial(pos, count);
    m &= m - 1;
  }
  return rank;
}

int wedge_sign(Mask a, Mask b) {
  if (a & b)
    return 0;
  int inversions = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    inversions += std::popcount(j + 1 < 32 ? (a >> (j + 1)) : Mask{0});
  }
  return (inversions & 1) ? -1 : 1;
}

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1)
    out.push_back(std::countr_zero(m));
  return out;
}

KForm::KForm(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dims(dim, degree);
  coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(binomial(dim, degree)));
}

KForm KForm::basis(int dim, std::span<const int> indices) {
  KForm f(dim, static_cast<int>(indices.size()));
  f.add(indices, 1.0);
  return f;
}

KForm KForm::from_coeffs(int dim, int degree, Eigen::VectorXd coeffs) {
  KForm f(dim, degree);
  if (coeffs.size() != f.coeffs_.size())
    throw MalformedInput("coefficient vector has length " + std::to_string(coeffs.size()) +
                         ", expected " + std::to_string(f.coeffs_.size()));
  f.coeffs_ = std::move(coeffs);
  return f;
}

double KForm::coeff(Mask m) const {
  if (std::popcount(m) != degree_ || (dim_ < 32 && (m >> dim_) != 0))
    throw MalformedInput("mask does not index a monomial of this form");
  return coeffs_[static_cast<Eigen::Index>(mask_rank(m))];
}

double &KForm::coeff(Mask m) {
  if (std::popcount(m) != degree_ || (dim_ < 32 && (m >> dim_) != 0))
    throw MalformedInput("mask does not index a monomial of this form");
  return coeffs_[static_cast<Eigen::Index>(mask_rank(m))];
}

double KForm::at(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) != degree_)
    throw MalformedInput("wrong number of arguments for a " + std::to_string(degree_) + "-form");
  std::vector<int> idx(indices.begin(), indices.end());
  const Mask m = to_mask(idx, dim_);
  const int sign = sort_with_sign(idx);
  return sign == 0 ? 0.0 : sign * coeff(m);
}

void KForm::add(std::span<const int> indices, double v) {
  if (static_cast<int>(indices.size()) != degree_)
    throw MalformedInput("wrong number of indices for a " + std::to_string(degree_) + "-form");
  std::vector<int> idx(indices.begin(), indices.end());
  const Mask m = to_mask(idx, dim_);
  const int sign = sort_with_sign(idx);
  if (sign != 0)
    coeff(m) += sign * v;
}

double KForm::evaluate(std::span<const Eigen::VectorXd> args) const {
  if (static_cast<int>(args.size()) != degree_)
    throw MalformedInput("wrong number of arguments for a " + std::to_string(degree_) + "-form");
  for (const auto &a : args)
    if (a.size() != dim_)
      throw MalformedInput("argument vector has wrong dimension");
  if (degree_ == 0)
    return coeffs_.size() ? coeffs_[0] : 0.0;
  Eigen::MatrixXd sub(degree_, degree_);
  double total = 0.0;
  const auto &ms = masks();
  for (std::size_t r = 0; r < ms.size(); ++r) {
    if (coeffs_[static_cast<Eigen::Index>(r)] == 0.0)
      continue;
    int row = 0;
    for (Mask m = ms[r]; m; m &= m - 1, ++row) {
      const int i = std::countr_zero(m);
      for (int c = 0; c < degree_; ++c)
        sub(row, c) = args[static_cast<std::size_t>(c)][i];
    }
    total += coeffs_[static_cast<Eigen::Index>(r)] * sub.determinant();
  }
  return total;
}

KForm &KForm::operator+=(const KForm &o) {
  if (o.dim_ != dim_ || o.degree_ != degree_)
    throw MalformedInput("adding forms of different dimension or degree");
  coeffs_ += o.coeffs_;
  return *this;
}

KForm &KForm::operator-=(const KForm &o) {
  if (o.dim_ != dim_ || o.degree_ != degree_)
    throw MalformedInput("subtracting forms of different dimension or degree");
  coeffs_ -= o.coeffs_;
  return *this;
}

KForm wedge(const KForm &a, const KForm &b) {
  if (a.dim() != b.dim())
    throw MalformedInput("wedge of forms over different algebras");
  const int n = a.dim();
  KForm out(n, a.degree() + b.degree());
  if (a.degree() + b.degree() > n)
    return out;
  const auto &ma = a.masks();
  const auto &mb = b.masks();
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double ca = a.coeffs()[static_cast<Eigen::Index>(i)];
    if (ca == 0.0)
      continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      const double cb = b.coeffs()[static_cast<Eigen::Index>(j)];
      if (cb == 0.0)
        continue;
      const int s = wedge_sign(ma[i], mb[j]);
      if (s != 0)
        out.coeff(ma[i] | mb[j]) += s * ca * cb;
    }
  }
  return out;
}

KForm pullback(const KForm &alpha, const Eigen::MatrixXd &m) {
  const int n = alpha.dim();
  if (m.rows() != n || m.cols() != n)
    throw MalformedInput("pullback matrix has wrong shape");
  const int k = alpha.degree();
  KForm out(n, k);
  if (k == 0) {
    out.coeffs() = alpha.coeffs();
    return out;
  }
  const auto &ms = alpha.masks();
  Eigen::MatrixXd sub(k, k);
  for (std::size_t ri = 0; ri < ms.size(); ++ri) {
    const auto cols = mask_indices(ms[ri]);
    double acc = 0.0;
    for (std::size_t rk = 0; rk < ms.size(); ++rk) {
      const double a = alpha.coeffs()[static_cast<Eigen::Index>(rk)];
      if (a == 0.0)
        continue;
      const auto rows = mask_indices(ms[rk]);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
          sub(r, c) = m(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
      acc += a * sub.determinant();
    }
    out.coeffs()[static_cast<Eigen::Index>(ri)] = acc;
  }
  return out;
}

std::string to_string(const KForm &alpha, double drop_below) {
  std::vector<std::pair<std::vector<int>, double>> terms;
  const auto &ms = alpha.masks();
  for (std::size_t r = 0; r < ms.size(); ++r) {
    const double v = alpha.coeffs()[static_cast<Eigen::Index>(r)];
    if (std::abs(v) > drop_below)
      terms.emplace_back(mask_indices(ms[r]), v);
  }
  std::sort(terms.begin(), terms.end());
  if (terms.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto &[idx, v] : terms) {
    double mag = std::abs(v);
    if (first)
      os << (v < 0 ? "-" : "");
    else
      os << (v < 0 ? " - " : " + ");
    if (std::abs(mag - 1.0) > 1e-14 || idx.empty())
      os << mag << (idx.empty() ? "" : " ");
    for (std::size_t i = 0; i < idx.size(); ++i)
      os << (i ? "^" : "") << 'e' << idx[i] + 1;
    first = false;
  }
  return os.str();
}

ComplexForm wedge(const ComplexForm &a, const ComplexForm &b) {
  return {wedge(a.re, b.re) - wedge(a.im, b.im), wedge(a.re, b.im) + wedge(a.im, b.re)};
}

} // namespace nilgeom
