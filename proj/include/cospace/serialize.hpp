#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cospace/baselines.hpp"
#include "cospace/metrics.hpp"
#include "cospace/solver.hpp"

namespace cospace {

// On-disk form shared by CoSpace models and the baseline projections. The method
// tag says which produced it; `p` and the optimizer fields only exist for "cospace".
struct ModelDocument {
  std::string method;
  Matrix theta;
  Index ms_bands = 0;
  Index hs_bands = 0;
  int num_classes = 0;
  nlohmann::json params = nlohmann::json::object();
  std::optional<Matrix> p;
  std::vector<double> objective_trace;
  bool converged = false;
  int outer_iterations = 0;
  // Training pairs embedded by theta: N MS columns followed by N HS columns.
  Matrix references;
  Labels reference_labels;

  CoSpaceModel to_cospace() const;
};

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json hyperparams_to_json(const Hyperparams& h);
// Starts from `base` and overrides every key present in `j`.
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});

nlohmann::json metrics_to_json(const MetricsReport& r);

ModelDocument make_document(const CoSpaceModel& model, const PairedDataset& train);
ModelDocument make_document(const LinearProjection& proj, const PairedDataset& train);

nlohmann::json document_to_json(const ModelDocument& doc);
ModelDocument document_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const ModelDocument& doc);
ModelDocument load_model(const std::string& path);

nlohmann::json parse_json_file(const std::string& path);
// Pretty-printed with a trailing newline, written atomically.
void save_json(const std::string& path, const nlohmann::json& j);

}  // namespace cospace
