#pragma once

#include "nilgeom/catalog.hpp"
#include "nilgeom/metrics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nilgeom {

/// Basis of the space of symmetric matrices compatible with a set of complex
/// structures. Elements are Frobenius-orthonormal.
struct ConeBasis {
  int n = 0;
  std::vector<Eigen::MatrixXd> elements;

  int dimension() const noexcept { return static_cast<int>(elements.size()); }
  Eigen::MatrixXd combine(const Eigen::VectorXd &w) const;
  /// Frobenius coordinates of a compatible matrix.
  Eigen::VectorXd coordinates(const Eigen::MatrixXd &g) const;
};

ConeBasis compatible_cone_basis(int dim, std::span<const Endomorphism> js);

/// Maximal Frobenius-orthonormal independent subset of span(mats).
std::vector<Eigen::MatrixXd> orthonormalize(std::span<const Eigen::MatrixXd> mats,
                                            double tol = 1e-10);

enum class FeasibilityStatus { feasible, vacuous, numerically_infeasible };

std::string to_string(FeasibilityStatus s);
FeasibilityStatus status_from_string(const std::string &s);

struct FeasibilityOptions {
  int restarts = 100;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int max_iterations = 200;
  /// Exhaustive sphere grid for kernels of dimension <= 3.
  bool sphere_grid = true;
  double grid_resolution = 1e-2;
  /// First iterate for balanced searches (defaults to the compatible
  /// projection of the identity).
  std::optional<Eigen::MatrixXd> initial;
};

struct FeasibilityVerdict {
  FeasibilityStatus status = FeasibilityStatus::numerically_infeasible;
  std::optional<Eigen::MatrixXd> witness;
  double best_lambda_min = 0.0;
  /// Balanced searches: best value of the normalized objective.
  double best_objective = 0.0;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> residuals;
};

/// Searches the compatible hyper-Hermitian cone for g with J1dF1 = J2dF2 = J3dF3.
FeasibilityVerdict hkt_feasibility(const LieAlgebra &alg, const HypercomplexTriple &triple,
                                   const FeasibilityOptions &opts = {});
FeasibilityVerdict hkt_feasibility(const LieAlgebra &alg, const HypercomplexTriple &triple,
                                   const ConeBasis &cone, const FeasibilityOptions &opts = {});

/// |d(F^{n-1})|^2 / lambda_min(g)^{2(n-1)}; +inf outside the PD cone.
double balanced_objective(const LieAlgebra &alg, const Eigen::MatrixXd &g, const Endomorphism &j);

/// Searches the compatible cone for g with d(F^{n-1}) = 0.
FeasibilityVerdict balanced_feasibility(const LieAlgebra &alg, const Endomorphism &j,
                                        const FeasibilityOptions &opts = {});
FeasibilityVerdict balanced_feasibility(const LieAlgebra &alg, const Endomorphism &j,
                                        const ConeBasis &cone, const FeasibilityOptions &opts = {});

enum class ScanKind { hkt, balanced };

struct ScanRow {
  std::map<std::string, double> params;
  FeasibilityVerdict verdict;
};

/// One verdict per parameter set of a catalog family.
std::vector<ScanRow> family_scan(const std::string &family,
                                 const std::vector<std::map<std::string, double>> &grid,
                                 ScanKind which, const FeasibilityOptions &opts = {});

} // namespace nilgeom
