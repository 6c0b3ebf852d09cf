#include "cospace/serialize.hpp"

#include <cmath>

#include "cospace/csv.hpp"

namespace cospace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  require(rows >= 0 && cols >= 0 && static_cast<Index>(data.size()) == rows * cols,
          "matrix payload has " + std::to_string(data.size()) + " values for a " + std::to_string(rows) + "x" +
              std::to_string(cols) + " matrix");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
  }
  return m;
}

json hyperparams_to_json(const Hyperparams& h) {
  return {{"alpha", h.alpha},         {"beta", h.beta},           {"dim", h.dim},
          {"outer_max_iter", h.outer_max_iter}, {"outer_tol", h.outer_tol}, {"inner_max_iter", h.inner_max_iter},
          {"inner_tol", h.inner_tol}, {"mu0", h.mu0},             {"mu_max", h.mu_max},
          {"rho", h.rho}};
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams base) {
  try {
    require(j.is_object(), "hyperparameters must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "alpha") base.alpha = value.get<double>();
      else if (key == "beta") base.beta = value.get<double>();
      else if (key == "dim") base.dim = value.get<int>();
      else if (key == "outer_max_iter") base.outer_max_iter = value.get<int>();
      else if (key == "outer_tol") base.outer_tol = value.get<double>();
      else if (key == "inner_max_iter") base.inner_max_iter = value.get<int>();
      else if (key == "inner_tol") base.inner_tol = value.get<double>();
      else if (key == "mu0") base.mu0 = value.get<double>();
      else if (key == "mu_max") base.mu_max = value.get<double>();
      else if (key == "rho") base.rho = value.get<double>();
      else throw ValidationError("unknown hyperparameter '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid hyperparameters: ") + e.what());
  }
  return base;
}

json metrics_to_json(const MetricsReport& r) {
  json per_class = json::array();
  for (double v : r.per_class) per_class.push_back(std::isnan(v) ? json(nullptr) : json(v));
  json confusion = json::array();
  for (Index i = 0; i < r.confusion.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < r.confusion.cols(); ++c) row.push_back(r.confusion(i, c));
    confusion.push_back(std::move(row));
  }
  return {{"oa", r.oa}, {"aa", r.aa}, {"kappa", r.kappa}, {"per_class", per_class}, {"confusion", confusion}};
}

namespace {

void fill_references(ModelDocument& doc, const PairedDataset& train) {
  const Matrix tm = doc.theta.leftCols(doc.ms_bands);
  const Matrix th = doc.theta.rightCols(doc.hs_bands);
  doc.references.resize(doc.theta.rows(), 2 * train.size());
  doc.references << tm * train.ms, th * train.hs;
  doc.reference_labels = stacked_labels(train.labels);
  doc.num_classes = train.num_classes;
}

}  // namespace

ModelDocument make_document(const CoSpaceModel& model, const PairedDataset& train) {
  ModelDocument doc;
  doc.method = "cospace";
  doc.theta = model.theta;
  doc.ms_bands = model.ms_bands;
  doc.hs_bands = model.hs_bands;
  doc.params = hyperparams_to_json(model.hyper);
  doc.p = model.p;
  doc.objective_trace = model.objective_trace;
  doc.converged = model.converged;
  doc.outer_iterations = model.outer_iterations();
  fill_references(doc, train);
  return doc;
}

ModelDocument make_document(const LinearProjection& proj, const PairedDataset& train) {
  ModelDocument doc;
  doc.method = proj.method;
  doc.theta = proj.theta;
  doc.ms_bands = proj.ms_bands;
  doc.hs_bands = proj.hs_bands;
  doc.params = json::object();
  for (const auto& [k, v] : proj.params) doc.params[k] = v;
  doc.converged = true;
  fill_references(doc, train);
  return doc;
}

CoSpaceModel ModelDocument::to_cospace() const {
  require(p.has_value(), "model document of method '" + method + "' has no P matrix");
  CoSpaceModel m;
  m.theta = theta;
  m.p = *p;
  m.ms_bands = ms_bands;
  m.hs_bands = hs_bands;
  if (method == "cospace") m.hyper = hyperparams_from_json(params);
  m.objective_trace = objective_trace;
  m.converged = converged;
  return m;
}

json document_to_json(const ModelDocument& doc) {
  json j;
  j["format"] = "cospace-model";
  j["version"] = 1;
  j["method"] = doc.method;
  j["dims"] = {{"ms_bands", doc.ms_bands}, {"hs_bands", doc.hs_bands}, {"dim", doc.theta.rows()},
               {"num_classes", doc.num_classes}};
  j["params"] = doc.params;
  j["theta"] = matrix_to_json(doc.theta);
  if (doc.p) j["p"] = matrix_to_json(*doc.p);
  j["objective_trace"] = doc.objective_trace;
  j["converged"] = doc.converged;
  j["outer_iterations"] = doc.outer_iterations;
  j["references"] = {{"embeddings", matrix_to_json(doc.references)}, {"labels", doc.reference_labels}};
  return j;
}

ModelDocument document_from_json(const json& j) {
  try {
    require(j.value("format", std::string{}) == "cospace-model", "not a cospace model document");
    ModelDocument doc;
    doc.method = j.at("method").get<std::string>();
    const auto& dims = j.at("dims");
    doc.ms_bands = dims.at("ms_bands").get<Index>();
    doc.hs_bands = dims.at("hs_bands").get<Index>();
    doc.num_classes = dims.at("num_classes").get<int>();
    doc.params = j.value("params", json::object());
    doc.theta = matrix_from_json(j.at("theta"));
    require(doc.theta.cols() == doc.ms_bands + doc.hs_bands, "theta width does not match ms_bands + hs_bands");
    if (j.contains("p")) doc.p = matrix_from_json(j.at("p"));
    doc.objective_trace = j.value("objective_trace", std::vector<double>{});
    doc.converged = j.value("converged", false);
    doc.outer_iterations = j.value("outer_iterations", 0);
    if (j.contains("references")) {
      doc.references = matrix_from_json(j.at("references").at("embeddings"));
      doc.reference_labels = j.at("references").at("labels").get<Labels>();
    }
    return doc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid model document: ") + e.what());
  }
}

void save_json(const std::string& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_model(const std::string& path, const ModelDocument& doc) { save_json(path, document_to_json(doc)); }

ModelDocument load_model(const std::string& path) { return document_from_json(parse_json_file(path)); }

}  // namespace cospace
