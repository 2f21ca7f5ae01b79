#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrfsdp/baselines.hpp"
#include "mrfsdp/encoding.hpp"
#include "mrfsdp/error.hpp"
#include "mrfsdp/io.hpp"
#include "mrfsdp/mrf.hpp"
#include "mrfsdp/runner.hpp"

namespace py = pybind11;
using namespace mrfsdp;

namespace {

MrfInstance make_instance(int num_nodes, int num_labels,
                          const std::vector<std::tuple<int, int, double>>& unary,
                          const std::vector<std::tuple<int, int, double>>& binary) {
  std::vector<UnaryTerm> u;
  for (const auto& [node, label, w] : unary) u.push_back({node, label, w});
  std::vector<BinaryTerm> b;
  for (const auto& [i, j, w] : binary) b.push_back({i, j, w});
  return MrfInstance(num_nodes, num_labels, std::move(u), std::move(b));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of mrfsdp";

  // Registered base first: pybind11 tries the most recent translator first.
  static py::exception<Error> base(m, "Error");
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<SizeRefusalError>(m, "SizeRefusalError", base.ptr());
  py::register_exception<DegenerateStepError>(m, "DegenerateStepError", base.ptr());
  py::register_exception<NumericalFailureError>(m, "NumericalFailureError",
                                                base.ptr());

  py::class_<MrfInstance>(m, "MrfInstance")
      .def(py::init(&make_instance), py::arg("num_nodes"), py::arg("num_labels"),
           py::arg("unary") = std::vector<std::tuple<int, int, double>>{},
           py::arg("binary") = std::vector<std::tuple<int, int, double>>{})
      .def_property_readonly("num_nodes", &MrfInstance::num_nodes)
      .def_property_readonly("num_labels", &MrfInstance::num_labels)
      .def_property_readonly("unary",
                             [](const MrfInstance& mrf) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& t : mrf.unary_terms())
                                 out.emplace_back(t.node, t.label, t.weight);
                               return out;
                             })
      .def_property_readonly("binary",
                             [](const MrfInstance& mrf) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& t : mrf.binary_terms())
                                 out.emplace_back(t.i, t.j, t.weight);
                               return out;
                             })
      .def("energy", &energy, py::arg("labeling"))
      .def("fingerprint", &instance_fingerprint)
      .def("to_json", &serialize_instance)
      .def_static("from_json", [](const std::string& text) { return parse_instance(text); })
      .def(py::self == py::self)
      .def("__repr__", [](const MrfInstance& mrf) {
        return "MrfInstance(num_nodes=" + std::to_string(mrf.num_nodes()) +
               ", num_labels=" + std::to_string(mrf.num_labels()) + ", " +
               std::to_string(mrf.unary_terms().size()) + " unary, " +
               std::to_string(mrf.binary_terms().size()) + " binary)";
      });

  m.def(
      "generate_grid",
      [](int rows, int cols, int num_labels, std::uint64_t seed, double unary_noise,
         double lambda1, double lambda2) {
        GridSpec spec;
        spec.rows = rows;
        spec.cols = cols;
        spec.num_labels = num_labels;
        spec.seed = seed;
        spec.unary_noise = unary_noise;
        spec.binary.lambda1 = lambda1;
        spec.binary.lambda2 = lambda2;
        GeneratedInstance g = generate_grid_instance(spec);
        return py::make_tuple(std::move(g.mrf), std::move(g.ground_truth));
      },
      py::arg("rows"), py::arg("cols"), py::arg("num_labels"), py::arg("seed") = 0,
      py::arg("unary_noise") = GridSpec{}.unary_noise,
      py::arg("lambda1") = BinaryWeightModel{}.lambda1,
      py::arg("lambda2") = BinaryWeightModel{}.lambda2,
      "Grid instance and its ground-truth labeling.");

  m.def(
      "solve_json",
      [](const MrfInstance& mrf, const std::string& method, std::uint64_t seed,
         bool warm_start) {
        RunConfig cfg = RunConfig::defaults_for(parse_method(method));
        cfg.seed = seed;
        cfg.warm_start = warm_start;
        py::gil_scoped_release release;
        return serialize_result(run_solver(mrf, cfg));
      },
      py::arg("mrf"), py::arg("method") = "fuses", py::arg("seed") = 0,
      py::arg("warm_start") = false, "Result document of one solver run.");

  m.def(
      "encode_zo",
      [](const MrfInstance& mrf) {
        ZoEncoding e = encode_zo(mrf);
        return py::make_tuple(e.cost, e.offset);
      },
      "Sparse Q and offset of the {0,1} encoding.");
  m.def(
      "encode_pm",
      [](const MrfInstance& mrf) {
        PmEncoding e = encode_pm(mrf);
        return py::make_tuple(e.cost, e.offset);
      },
      "Sparse L and offset of the +-1 encoding.");
  m.def("unary_argmin", &unary_argmin);
}
