#include "nilgeom/model_io.hpp"

#include "nilgeom/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nilgeom {

namespace {

double number(const nlohmann::json &v, const std::string &what) {
  if (!v.is_number())
    throw MalformedInput(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw MalformedInput(what + " is not finite");
  return x;
}

int index(const nlohmann::json &v, int dim, const std::string &what) {
  if (!v.is_number_integer())
    throw MalformedInput(what + " must be an integer index");
  const auto i = v.get<long long>();
  if (i < 1 || i > dim)
    throw MalformedInput(what + " index " + std::to_string(i) + " is outside 1.." +
                         std::to_string(dim));
  return static_cast<int>(i - 1);
}

Eigen::MatrixXd square(const nlohmann::json &v, int n, const std::string &what) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(n) * n)
    throw MalformedInput("\"" + what + "\" must be a row-major array of " + std::to_string(n * n) +
                         " numbers");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m(r, c) = number(v[static_cast<std::size_t>(r * n + c)], "\"" + what + "\" entry");
  return m;
}

nlohmann::json flat(const Eigen::MatrixXd &m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.push_back(m(r, c));
  return out;
}

} // namespace

Model model_from_json(const nlohmann::json &doc, const std::string &name) {
  if (!doc.is_object())
    throw MalformedInput("model file must contain a JSON object");
  if (!doc.contains("dim"))
    throw MalformedInput("model file lacks \"dim\"");
  const auto &dv = doc["dim"];
  if (!dv.is_number_integer() || dv.get<long long>() < 1 || dv.get<long long>() > kMaxDim)
    throw MalformedInput("\"dim\" must be an integer in 1.." + std::to_string(kMaxDim));
  const int n = dv.get<int>();

  for (const auto &[key, _] : doc.items())
    if (key != "dim" && key != "brackets" && key != "J" && key != "J2" && key != "J3" &&
        key != "metric")
      throw MalformedInput("unknown key \"" + key + "\" in model file");

  std::vector<Bracket> brackets;
  if (doc.contains("brackets")) {
    const auto &bs = doc["brackets"];
    if (!bs.is_array())
      throw MalformedInput("\"brackets\" must be an array");
    for (const auto &b : bs) {
      if (!b.is_array() || b.size() != 4)
        throw MalformedInput("each bracket entry must be [i, j, k, value]");
      const int i = index(b[0], n, "bracket");
      const int j = index(b[1], n, "bracket");
      const int k = index(b[2], n, "bracket");
      if (i >= j)
        throw MalformedInput("bracket entries need i < j");
      brackets.push_back({i, j, k, number(b[3], "bracket value")});
    }
  }

  Model m;
  m.name = name;
  m.algebra = LieAlgebra::from_brackets(n, brackets);
  if (doc.contains("J"))
    m.j = square(doc["J"], n, "J");
  if (doc.contains("J2")) {
    if (!m.j)
      throw MalformedInput("\"J2\" given without \"J\"");
    m.j2 = square(doc["J2"], n, "J2");
  }
  if (doc.contains("J3")) {
    if (!m.j2)
      throw MalformedInput("\"J3\" given without \"J2\"");
    m.j3 = square(doc["J3"], n, "J3");
  } else if (m.j2) {
    m.j3 = (*m.j) * (*m.j2);
  }
  if (doc.contains("metric"))
    m.metric = square(doc["metric"], n, "metric");
  return m;
}

Model parse_model(const std::string &text, const std::string &name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  return model_from_json(doc, name);
}

Model load_model(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw MalformedInput("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

nlohmann::json model_to_json(const Model &model) {
  const int n = model.algebra.dim();
  nlohmann::json doc;
  doc["dim"] = n;
  auto brackets = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (model.algebra.c(i, j, k) != 0.0)
          brackets.push_back({i + 1, j + 1, k + 1, model.algebra.c(i, j, k)});
  doc["brackets"] = brackets;
  if (model.j)
    doc["J"] = flat(*model.j);
  if (model.j2)
    doc["J2"] = flat(*model.j2);
  if (model.j3)
    doc["J3"] = flat(*model.j3);
  if (model.metric)
    doc["metric"] = flat(*model.metric);
  return doc;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd &m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json &rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw MalformedInput("matrix must be a nonempty array of rows");
  const auto nr = rows.size(), nc = rows[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
  for (std::size_t r = 0; r < nr; ++r) {
    if (!rows[r].is_array() || rows[r].size() != nc)
      throw MalformedInput("matrix rows have different lengths");
    for (std::size_t c = 0; c < nc; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(rows[r][c], "matrix entry");
  }
  return m;
}

} // namespace nilgeom
