#pragma once

#include "nilgeom/feasibility.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace nilgeom {

inline constexpr const char *kVersion = "0.1.0";

/// Result of one CLI invocation. `body` holds the subcommand-specific fields
/// and is merged into the top level of the JSON document.
struct Report {
  std::string subcommand;
  std::string version = kVersion;
  std::uint64_t seed = 0;
  double timing_seconds = 0.0;
  nlohmann::json body = nlohmann::json::object();

  nlohmann::json to_json(bool with_timing = true) const;
  static Report from_json(const nlohmann::json &doc);

  bool operator==(const Report &) const = default;
};

/// {"status", "best_lambda_min", "witness", "restarts", "seed", "residuals", ...}
nlohmann::json verdict_to_json(const FeasibilityVerdict &v);
FeasibilityVerdict verdict_from_json(const nlohmann::json &doc);

nlohmann::json form_to_json(const KForm &alpha);

} // namespace nilgeom
