#pragma once

#include "nilgeom/cxstruct.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nilgeom {

/// An algebra together with the distinguished tensors that come with it.
struct Model {
  std::string name;
  std::map<std::string, double> params;
  LieAlgebra algebra;
  std::optional<Endomorphism> j;  // complex structure (J1 for a triple)
  std::optional<Endomorphism> j2; // second member of a hypercomplex triple
  std::optional<Endomorphism> j3;
  std::optional<Eigen::MatrixXd> metric;
  /// (1,0)-coframe when a complex structure is present.
  std::vector<ComplexForm> coframe;

  bool has_triple() const { return j.has_value() && j2.has_value(); }
  HypercomplexTriple triple() const;
  ComplexStructure complex_structure() const;
  /// Stored metric or the identity.
  Eigen::MatrixXd metric_or_identity() const;
};

/// Names accepted by `catalog`.
const std::vector<std::string> &catalog_names();

/// Builds a catalog model.
///  - "n3": 8-dim algebra with a non-abelian hypercomplex structure
///  - "gt" (t): deformation family carrying the same triple
///  - "gst" (s, t): 6-dim family with Je1=e2, Je3=e4, Je5=e6
///  - "complex_heisenberg" (alias "iwasawa"): real form of the complex Heisenberg algebra
///  - "abelian" (dim)
/// Throws MalformedInput for unknown names or missing parameters.
Model catalog(const std::string &name, const std::map<std::string, double> &params = {});

/// Kaehler form with coefficients x1..x9 in the (1,0)-coframe of a
/// 6-dimensional model:
///   x1 i w1^w1b + (x2 + i x3) w1^w2b + (x2 - i x3) w1b^w2 + (x4 + i x5) w1^w3b
///   + (x4 - i x5) w1b^w3 + x6 i w2^w2b + (x7 + i x8) w2^w3b
///   + (x7 - i x8) w2b^w3 + x9 i w3^w3b
KForm hermitian_form_from_x(std::span<const ComplexForm> coframe, std::span<const double> x);

} // namespace nilgeom
