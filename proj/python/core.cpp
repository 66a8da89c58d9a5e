#include "nilgeom/catalog.hpp"
#include "nilgeom/cli.hpp"
#include "nilgeom/connections.hpp"
#include "nilgeom/errors.hpp"
#include "nilgeom/feasibility.hpp"
#include "nilgeom/model_io.hpp"
#include "nilgeom/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace nilgeom;

namespace {

// Reports cross the boundary as JSON text and are decoded with the json module.
py::object to_python(const nlohmann::json &doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

FeasibilityOptions options(int restarts, double tol, std::uint64_t seed) {
  FeasibilityOptions o;
  o.restarts = restarts;
  o.tol = tol;
  o.seed = seed;
  return o;
}

std::vector<int> indices_of(const py::iterable &it) {
  std::vector<int> out;
  for (auto v : it)
    out.push_back(v.cast<int>());
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Invariant Hermitian and hypercomplex geometry on nilpotent Lie algebras";
  m.attr("__version__") = kVersion;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<MalformedInput>(m, "MalformedInput", error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<IntegrityError>(m, "IntegrityError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::class_<KForm>(m, "KForm")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("degree"))
      .def_static("basis", [](int dim, const py::iterable &idx) { return KForm::basis(dim, indices_of(idx)); },
                  py::arg("dim"), py::arg("indices"))
      .def_property_readonly("dim", &KForm::dim)
      .def_property_readonly("degree", &KForm::degree)
      .def_property_readonly("coeffs", [](const KForm &f) { return Eigen::VectorXd(f.coeffs()); })
      .def_property_readonly("terms",
                             [](const KForm &f) {
                               std::vector<std::pair<std::vector<int>, double>> out;
                               for (std::size_t r = 0; r < f.size(); ++r)
                                 if (f.coeffs()[static_cast<Eigen::Index>(r)] != 0.0)
                                   out.emplace_back(mask_indices(f.masks()[r]),
                                                    f.coeffs()[static_cast<Eigen::Index>(r)]);
                               return out;
                             })
      .def("at", [](const KForm &f, const py::iterable &idx) { return f.at(indices_of(idx)); })
      .def("max_abs", &KForm::max_abs)
      .def("norm", &KForm::norm)
      .def("__add__", [](const KForm &a, const KForm &b) { return a + b; })
      .def("__sub__", [](const KForm &a, const KForm &b) { return a - b; })
      .def("__mul__", [](const KForm &a, double s) { return a * s; })
      .def("__rmul__", [](const KForm &a, double s) { return s * a; })
      .def("__neg__", [](const KForm &a) { return -a; })
      .def("__xor__", [](const KForm &a, const KForm &b) { return wedge(a, b); })
      .def("__str__", [](const KForm &f) { return to_string(f); })
      .def("__repr__", [](const KForm &f) { return "KForm(" + to_string(f) + ")"; });

  m.def("wedge", [](const KForm &a, const KForm &b) { return wedge(a, b); });

  py::class_<LieAlgebra>(m, "LieAlgebra")
      .def_static("from_brackets",
                  [](int dim, const std::vector<std::tuple<int, int, int, double>> &br) {
                    std::vector<Bracket> b;
                    for (const auto &[i, j, k, v] : br)
                      b.push_back({i, j, k, v});
                    return LieAlgebra::from_brackets(dim, b);
                  },
                  py::arg("dim"), py::arg("brackets"), "0-based (i, j, k, value): [e_i, e_j] = value e_k")
      .def_static("abelian", &LieAlgebra::abelian)
      .def_property_readonly("dim", &LieAlgebra::dim)
      .def("c", &LieAlgebra::c)
      .def("bracket", py::overload_cast<const Eigen::VectorXd &, const Eigen::VectorXd &>(&LieAlgebra::bracket, py::const_));

  py::class_<HypercomplexTriple>(m, "HypercomplexTriple");

  py::class_<Model>(m, "Model")
      .def_readonly("name", &Model::name)
      .def_readonly("params", &Model::params)
      .def_readonly("algebra", &Model::algebra)
      .def_readonly("j", &Model::j)
      .def_readonly("j2", &Model::j2)
      .def_readonly("j3", &Model::j3)
      .def_readonly("metric", &Model::metric)
      .def("triple", &Model::triple)
      .def("to_json", [](const Model &mo) { return to_python(model_to_json(mo)); });

  m.def("catalog_names", &catalog_names);
  m.def("catalog", &catalog, py::arg("name"), py::arg("params") = std::map<std::string, double>{});
  m.def("parse_model", &parse_model, py::arg("text"), py::arg("name") = "file");

  m.def("validate", [](const LieAlgebra &alg) {
    const auto r = validate(alg);
    py::dict d;
    d["jacobi_residual"] = r.jacobi_residual;
    d["nilpotency_step"] = r.nilpotency_step ? py::object(py::int_(*r.nilpotency_step)) : py::none();
    d["unimodular"] = r.unimodular;
    d["betti1"] = r.betti1;
    d["lower_central_series"] = r.lower_central_series;
    return d;
  });
  m.def("ce_d", &ce_d, py::arg("algebra"), py::arg("form"));
  m.def("nijenhuis", [](const LieAlgebra &alg, const Endomorphism &j) { return nijenhuis(alg, j).max_abs; });
  m.def("is_abelian", [](const LieAlgebra &alg, const HypercomplexTriple &t) {
    const auto r = is_abelian(alg, t);
    return py::make_tuple(r.abelian, r.max_residual);
  });
  m.def("kaehler_form", [](const Eigen::MatrixXd &g, const Endomorphism &j) { return kaehler_form(Metric(g), j); });
  m.def("random_compatible_metric", [](const std::vector<Endomorphism> &js, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_compatible_metric(js, dim, rng);
  });

  m.def("hkt_check", [](const LieAlgebra &alg, const Eigen::MatrixXd &g, const HypercomplexTriple &t) {
    const auto r = hkt_check(alg, Metric(g), t);
    py::dict d;
    d["hkt"] = r.hkt;
    d["cyclic_hkt"] = r.cyclic_hkt;
    d["residual_12"] = r.residual_12;
    d["residual_23"] = r.residual_23;
    d["route_gap"] = r.route_gap;
    return d;
  });
  m.def("balanced_check", [](const LieAlgebra &alg, const Eigen::MatrixXd &g, const Endomorphism &j) {
    const auto r = balanced_check(alg, Metric(g), j);
    py::dict d;
    d["balanced"] = r.balanced;
    d["delta_norm"] = r.delta_norm;
    d["dFn1_norm"] = r.dFn1_norm;
    d["criteria_agree"] = r.criteria_agree;
    return d;
  });

  m.def("hkt_feasibility",
        [](const LieAlgebra &alg, const HypercomplexTriple &t, int restarts, double tol, std::uint64_t seed) {
          return to_python(verdict_to_json(hkt_feasibility(alg, t, options(restarts, tol, seed))));
        },
        py::arg("algebra"), py::arg("triple"), py::arg("restarts") = 100, py::arg("tol") = 1e-8,
        py::arg("seed") = 1);
  m.def("balanced_feasibility",
        [](const LieAlgebra &alg, const Endomorphism &j, int restarts, double tol, std::uint64_t seed) {
          return to_python(verdict_to_json(balanced_feasibility(alg, j, options(restarts, tol, seed))));
        },
        py::arg("algebra"), py::arg("j"), py::arg("restarts") = 100, py::arg("tol") = 1e-8, py::arg("seed") = 1);
  m.def("family_scan",
        [](const std::string &family, const std::vector<std::map<std::string, double>> &grid,
           const std::string &which, int restarts, double tol, std::uint64_t seed) {
          if (which != "hkt" && which != "balanced")
            throw MalformedInput("which must be hkt or balanced");
          const auto rows = family_scan(family, grid, which == "hkt" ? ScanKind::hkt : ScanKind::balanced,
                                        options(restarts, tol, seed));
          py::list out;
          for (const auto &r : rows) {
            nlohmann::json row = verdict_to_json(r.verdict);
            row["params"] = r.params;
            out.append(to_python(row));
          }
          return out;
        },
        py::arg("family"), py::arg("grid"), py::arg("which"), py::arg("restarts") = 100, py::arg("tol") = 1e-8,
        py::arg("seed") = 1);

  m.def("verify_ricci_relation", [](const LieAlgebra &alg, const Eigen::MatrixXd &g, const Endomorphism &j) {
    const auto r = verify_ricci_relation(alg, Metric(g), j);
    py::dict d;
    d["ricci_bismut"] = r.ricci_bismut;
    d["ricci_chern"] = r.ricci_chern;
    d["d_delta_f"] = r.d_delta_f;
    d["residual"] = r.residual;
    return d;
  });

  m.def("run_cli",
        [](const std::vector<std::string> &args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command line; returns (exit code, stdout, stderr).");
}
