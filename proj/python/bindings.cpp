#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cospace/experiment.hpp"
#include "cospace/serialize.hpp"

namespace py = pybind11;
using namespace cospace;

namespace {

PairedDataset paired(Matrix ms, Matrix hs, Labels labels, int num_classes) {
  if (num_classes <= 0) {
    for (int l : labels) num_classes = std::max(num_classes, l);
  }
  return make_paired_dataset(std::move(ms), std::move(hs), std::move(labels), num_classes);
}

}  // namespace

PYBIND11_MODULE(_cospace, m) {
  m.doc() = "Common subspace learning between hyperspectral and multispectral pixels";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    }
  });

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("alpha", &Hyperparams::alpha)
      .def_readwrite("beta", &Hyperparams::beta)
      .def_readwrite("dim", &Hyperparams::dim)
      .def_readwrite("outer_max_iter", &Hyperparams::outer_max_iter)
      .def_readwrite("outer_tol", &Hyperparams::outer_tol)
      .def_readwrite("inner_max_iter", &Hyperparams::inner_max_iter)
      .def_readwrite("inner_tol", &Hyperparams::inner_tol)
      .def_readwrite("mu0", &Hyperparams::mu0)
      .def_readwrite("mu_max", &Hyperparams::mu_max)
      .def_readwrite("rho", &Hyperparams::rho);

  py::class_<CoSpaceModel>(m, "CoSpaceModel")
      .def_readonly("theta", &CoSpaceModel::theta)
      .def_readonly("p", &CoSpaceModel::p)
      .def_readonly("hyper", &CoSpaceModel::hyper)
      .def_readonly("objective_trace", &CoSpaceModel::objective_trace)
      .def_readonly("converged", &CoSpaceModel::converged)
      .def_property_readonly("outer_iterations", &CoSpaceModel::outer_iterations)
      .def_property_readonly("theta_ms", [](const CoSpaceModel& s) { return Matrix(s.theta_ms()); })
      .def_property_readonly("theta_hs", [](const CoSpaceModel& s) { return Matrix(s.theta_hs()); })
      .def("embed_ms", [](const CoSpaceModel& s, const Matrix& x) { return embed_ms(s, x); })
      .def("embed_hs", [](const CoSpaceModel& s, const Matrix& x) { return embed_hs(s, x); })
      .def("predict", [](const CoSpaceModel& s, const Matrix& x) { return predict_via_p(s, x); })
      .def("save", [](const CoSpaceModel& s, const std::string& path, const Matrix& ms, const Matrix& hs,
                      const Labels& labels) {
        save_model(path, make_document(s, paired(ms, hs, labels, s.num_classes())));
      });

  m.def(
      "fit",
      [](const Matrix& ms, const Matrix& hs, const Labels& labels, const Hyperparams& hyper, int num_classes) {
        return fit(paired(ms, hs, labels, num_classes), hyper);
      },
      py::arg("ms"), py::arg("hs"), py::arg("labels"), py::arg("hyper") = Hyperparams{}, py::arg("num_classes") = 0,
      "Fit CoSpace on paired columns (bands x samples) with 1-based labels.");

  m.def(
      "fit_baseline",
      [](const std::string& method, const Matrix& ms, const Matrix& hs, const Labels& labels, int dim, int k,
         double sigma) {
        const TrainedMethod tm = train_method(parse_method(method), paired(ms, hs, labels, 0),
                                              {.dim = dim, .k = k, .sigma = sigma});
        return py::make_tuple(tm.theta_ms, tm.theta_hs);
      },
      py::arg("method"), py::arg("ms"), py::arg("hs"), py::arg("labels"), py::arg("dim"), py::arg("k") = 10,
      py::arg("sigma") = 1.0, "Returns (theta_ms, theta_hs) for pjdr, lusma or lsma.");

  m.def(
      "knn1_predict",
      [](const Matrix& refs, const Labels& labels, const Matrix& queries) {
        return knn1_predict({refs, labels}, queries);
      },
      py::arg("references"), py::arg("labels"), py::arg("queries"));

  m.def(
      "evaluate",
      [](const Labels& truth, const Labels& predicted, int num_classes) {
        const MetricsReport r = evaluate(truth, predicted, num_classes);
        py::dict d;
        d["oa"] = r.oa;
        d["aa"] = r.aa;
        d["kappa"] = r.kappa;
        d["per_class"] = r.per_class;
        d["confusion"] = Eigen::MatrixXi(r.confusion);
        return d;
      },
      py::arg("truth"), py::arg("predicted"), py::arg("num_classes"));

  m.def(
      "simulate_scene",
      [](const std::string& spec_json) {
        const Scene s = make_synthetic_scene(scene_spec_from_json(nlohmann::json::parse(spec_json)));
        py::dict d;
        d["train_ms"] = s.train.ms;
        d["train_hs"] = s.train.hs;
        d["train_labels"] = s.train.labels;
        d["test_ms"] = s.test.features;
        d["test_labels"] = s.test.labels;
        return d;
      },
      py::arg("spec_json"), "Synthetic scene from a JSON spec string.");
}
