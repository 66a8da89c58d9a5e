#include "nilgeom/report.hpp"

#include "nilgeom/errors.hpp"
#include "nilgeom/model_io.hpp"

namespace nilgeom {

namespace {

const char *const kReserved[] = {"subcommand", "version", "seed", "timing_seconds"};

} // namespace

nlohmann::json Report::to_json(bool with_timing) const {
  nlohmann::json doc = body;
  doc["subcommand"] = subcommand;
  doc["version"] = version;
  doc["seed"] = seed;
  if (with_timing)
    doc["timing_seconds"] = timing_seconds;
  return doc;
}

Report Report::from_json(const nlohmann::json &doc) {
  if (!doc.is_object())
    throw MalformedInput("report must be a JSON object");
  Report r;
  try {
    r.subcommand = doc.at("subcommand").get<std::string>();
    r.version = doc.at("version").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.timing_seconds = doc.value("timing_seconds", 0.0);
  } catch (const nlohmann::json::exception &e) {
    throw MalformedInput(std::string("report header: ") + e.what());
  }
  r.body = doc;
  for (const char *key : kReserved)
    r.body.erase(key);
  return r;
}

nlohmann::json verdict_to_json(const FeasibilityVerdict &v) {
  nlohmann::json doc;
  doc["status"] = to_string(v.status);
  doc["best_lambda_min"] = v.best_lambda_min;
  doc["best_objective"] = v.best_objective;
  doc["witness"] = v.witness ? matrix_to_json(*v.witness) : nlohmann::json(nullptr);
  doc["restarts"] = v.restarts;
  doc["seed"] = v.seed;
  doc["residuals"] = v.residuals;
  doc["semi_decision"] = v.status == FeasibilityStatus::numerically_infeasible;
  return doc;
}

FeasibilityVerdict verdict_from_json(const nlohmann::json &doc) {
  FeasibilityVerdict v;
  try {
    v.status = status_from_string(doc.at("status").get<std::string>());
    v.best_lambda_min = doc.at("best_lambda_min").get<double>();
    v.best_objective = doc.value("best_objective", 0.0);
    if (!doc.at("witness").is_null())
      v.witness = matrix_from_json(doc.at("witness"));
    v.restarts = doc.at("restarts").get<int>();
    v.seed = doc.at("seed").get<std::uint64_t>();
    v.residuals = doc.at("residuals").get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception &e) {
    throw MalformedInput(std::string("verdict: ") + e.what());
  }
  return v;
}

nlohmann::json form_to_json(const KForm &alpha) {
  nlohmann::json doc;
  doc["degree"] = alpha.degree();
  doc["text"] = to_string(alpha, 1e-12);
  auto terms = nlohmann::json::array();
  const auto &ms = alpha.masks();
  for (std::size_t r = 0; r < ms.size(); ++r) {
    const double v = alpha.coeffs()[static_cast<Eigen::Index>(r)];
    if (v == 0.0)
      continue;
    auto idx = mask_indices(ms[r]);
    for (auto &i : idx)
      ++i;
    terms.push_back({{"indices", idx}, {"value", v}});
  }
  doc["terms"] = terms;
  doc["max_abs"] = alpha.max_abs();
  return doc;
}

} // namespace nilgeom
