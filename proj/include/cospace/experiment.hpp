#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cospace/baselines.hpp"
#include "cospace/classify.hpp"
#include "cospace/metrics.hpp"
#include "cospace/scene.hpp"
#include "cospace/solver.hpp"

namespace cospace {

enum class Method { Baseline, PJDR, LUSMA, LSMA, CoSpace };

std::string method_name(Method m);
// Accepts "baseline", "pjdr", "lusma", "lsma", "cospace" (and the P-JDR/L-USMA/L-SMA spellings).
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

enum class RefMode { Both, MsOnly };
RefMode parse_ref_mode(const std::string& name);

// One point of a method's parameter grid. Unused fields stay zero.
struct MethodParams {
  int dim = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int k = 0;
  double sigma = 0.0;

  auto operator<=>(const MethodParams&) const = default;
};

nlohmann::json params_to_json(Method m, const MethodParams& p);

struct GridSpec {
  std::vector<int> dims{10, 20, 30, 40, 50};
  std::vector<double> alphas{1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::vector<double> betas{1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::vector<int> ks{10, 20, 30, 40, 50};
  std::vector<double> sigmas{1e-2, 1e-1, 1.0, 1e1, 1e2};
  int folds = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

GridSpec grid_from_json(const nlohmann::json& j, GridSpec base = {});
nlohmann::json grid_to_json(const GridSpec& g);

// Cells in ascending (dim, alpha, beta, k, sigma) order: CoSpace spans dims x alphas x betas,
// L-USMA dims x ks x sigmas, P-JDR and L-SMA dims only, Baseline a single empty cell.
std::vector<MethodParams> grid_cells(Method m, const GridSpec& grid);

struct Fold {
  std::vector<Index> train;
  std::vector<Index> val;
};

// Seeded shuffle of [0, n) cut into `folds` contiguous parts whose sizes differ by at most one.
std::vector<Fold> kfold_split(Index n, int folds, std::uint64_t seed);

// A fitted projection from any method, ready to embed MS/HS samples.
struct TrainedMethod {
  Method method = Method::Baseline;
  MethodParams params;
  Matrix theta_ms;  // d x d_M
  Matrix theta_hs;  // d x d_H, empty for Baseline
  std::optional<CoSpaceModel> cospace;
  std::optional<LinearProjection> projection;
};

TrainedMethod train_method(Method m, const PairedDataset& train, const MethodParams& params,
                           const Hyperparams& base = {});

// Embedded training samples. Baseline always uses the MS copies only.
ReferenceSet reference_set(const TrainedMethod& tm, const PairedDataset& train, RefMode refs);

struct ClassifierOptions {
  RefMode refs = RefMode::Both;
  double linear_lambda = 1e-2;
};

// classifier: "1nn", "linear", or "p" (CoSpace only).
Labels predict(const TrainedMethod& tm, const PairedDataset& train, const Matrix& ms_queries,
               const std::string& classifier, const ClassifierOptions& opts = {});

struct CellResult {
  MethodParams params;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
  bool feasible = true;
  std::string error;
};

struct GridSearchResult {
  MethodParams best;
  double best_score = 0.0;
  std::vector<CellResult> table;
  // Fits performed per fold for feasible and infeasible cells alike.
  std::size_t fits_per_fold() const { return table.size(); }
};

// Scores one cell on one fold; throwing ValidationError or NumericalError marks the cell infeasible.
using CellScorer = std::function<double(const MethodParams&, int fold)>;

// Mean score per cell; the best cell wins, ties go to the earliest cell in `cells`.
GridSearchResult grid_search(const std::vector<MethodParams>& cells, int folds, const CellScorer& scorer,
                             unsigned threads = 1);

// CV over the training pairs with validation OA of 1NN on the held-out MS columns.
GridSearchResult grid_search(const PairedDataset& ds, Method m, const GridSpec& grid, const Hyperparams& base = {},
                             const ClassifierOptions& opts = {}, unsigned threads = 1);

struct SensitivityRow {
  double fraction = 0.0;
  Index train_size = 0;
  double oa_1nn = 0.0;
  double oa_linear = 0.0;
  double oa_p = 0.0;  // NaN unless the method is CoSpace
};

// Per class, keeps round(fraction * n_k) pairs chosen by a seeded shuffle (indices kept in
// original order), refits and scores on the fixed test set.
std::vector<Index> stratified_subsample(const Labels& labels, int num_classes, double fraction, std::uint64_t seed);

std::vector<SensitivityRow> size_sensitivity(const PairedDataset& train, const LabeledSamples& test, Method m,
                                             const MethodParams& params, const std::vector<double>& fractions,
                                             std::uint64_t seed, const Hyperparams& base = {},
                                             const ClassifierOptions& opts = {});

struct DatasetSource {
  std::optional<SceneSpec> scene;
  std::string train_ms, train_hs, train_labels, test_ms, test_labels;
};

struct BenchmarkConfig {
  DatasetSource dataset;
  std::vector<Method> methods;
  GridSpec grid;
  Hyperparams hyper;  // solver constants; alpha/beta/dim come from the grid
  ClassifierOptions classifier;
  std::vector<double> fractions;  // optional training-size sweep for CoSpace
  std::string output_dir;
  unsigned threads = 1;
};

// Relative paths are resolved against `base_dir`.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

struct LoadedData {
  PairedDataset train;
  LabeledSamples test;
};

LoadedData load_dataset(const DatasetSource& src);

struct MethodResult {
  Method method = Method::Baseline;
  GridSearchResult search;
  std::map<std::string, MetricsReport> reports;  // keyed by classifier
  std::map<std::string, Labels> predictions;
  double seconds = 0.0;
};

struct BenchmarkResult {
  std::vector<MethodResult> methods;
  std::vector<SensitivityRow> sensitivity;
  int num_classes = 0;
  Index train_size = 0;
  Index test_size = 0;
  std::uint64_t seed = 0;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& config);
BenchmarkResult run_benchmark(const BenchmarkConfig& config, const LoadedData& data);

// Deterministic content only (no timings).
nlohmann::json benchmark_to_json(const BenchmarkResult& r);
nlohmann::json gridsearch_to_json(const std::vector<std::pair<Method, GridSearchResult>>& results);

// results.json, table.csv, timings.json and pred_<method>_<classifier>.csv under `dir`.
void write_benchmark_outputs(const BenchmarkResult& r, const std::string& dir);

// Worker count from COSPACE_THREADS, defaulting to 1.
unsigned threads_from_env();

}  // namespace cospace
