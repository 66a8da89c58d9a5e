#pragma once

#include "nilgeom/catalog.hpp"

#include <json.hpp>

#include <string>

namespace nilgeom {

/// Model file: {"dim": n, "brackets": [[i, j, k, value], ...], "J": [...],
/// "J2": [...], "J3": [...], "metric": [...]} with 1-based indices, i < j,
/// and row-major n x n matrices. Everything except "dim" is optional.
Model model_from_json(const nlohmann::json &doc, const std::string &name = "file");
Model parse_model(const std::string &text, const std::string &name = "file");
Model load_model(const std::string &path);

nlohmann::json model_to_json(const Model &model);

nlohmann::json matrix_to_json(const Eigen::MatrixXd &m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json &rows);

} // namespace nilgeom
