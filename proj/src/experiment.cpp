#include "cospace/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "cospace/csv.hpp"
#include "cospace/serialize.hpp"

namespace cospace {

using nlohmann::json;

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(threads, count);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double accuracy(const Labels& truth, const Labels& predicted) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += (truth[i] == predicted[i]) ? 1 : 0;
  return truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Baseline: return "baseline";
    case Method::PJDR: return "pjdr";
    case Method::LUSMA: return "lusma";
    case Method::LSMA: return "lsma";
    case Method::CoSpace: return "cospace";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::Baseline, Method::PJDR, Method::LUSMA, Method::LSMA,
                                           Method::CoSpace};
  return methods;
}

Method parse_method(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (Method m : all_methods()) {
    if (method_name(m) == key) return m;
  }
  throw ValidationError("unknown method '" + name + "'; known methods: baseline, pjdr, lusma, lsma, cospace");
}

RefMode parse_ref_mode(const std::string& name) {
  if (name == "both") return RefMode::Both;
  if (name == "ms") return RefMode::MsOnly;
  throw ValidationError("unknown reference mode '" + name + "'; use 'both' or 'ms'");
}

json params_to_json(Method m, const MethodParams& p) {
  json j = json::object();
  switch (m) {
    case Method::Baseline: break;
    case Method::PJDR:
    case Method::LSMA: j["dim"] = p.dim; break;
    case Method::LUSMA: j = {{"dim", p.dim}, {"k", p.k}, {"sigma", p.sigma}}; break;
    case Method::CoSpace: j = {{"dim", p.dim}, {"alpha", p.alpha}, {"beta", p.beta}}; break;
  }
  return j;
}

void GridSpec::validate() const {
  require(!dims.empty() && !alphas.empty() && !betas.empty() && !ks.empty() && !sigmas.empty(),
          "grid lists must be non-empty");
  require(folds >= 2, "folds must be at least 2");
  for (int d : dims) require(d > 0, "grid dims must be positive");
  for (int k : ks) require(k > 0, "grid ks must be positive");
  for (double a : alphas) require(a > 0.0, "grid alphas must be positive");
  for (double b : betas) require(b > 0.0, "grid betas must be positive");
  for (double s : sigmas) require(s > 0.0, "grid sigmas must be positive");
}

GridSpec grid_from_json(const json& j, GridSpec base) {
  try {
    if (j.contains("dims")) base.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("alphas")) base.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("betas")) base.betas = j.at("betas").get<std::vector<double>>();
    if (j.contains("ks")) base.ks = j.at("ks").get<std::vector<int>>();
    if (j.contains("sigmas")) base.sigmas = j.at("sigmas").get<std::vector<double>>();
    if (j.contains("folds")) base.folds = j.at("folds").get<int>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid grid: ") + e.what());
  }
  base.validate();
  return base;
}

json grid_to_json(const GridSpec& g) {
  return {{"dims", g.dims}, {"alphas", g.alphas}, {"betas", g.betas}, {"ks", g.ks},
          {"sigmas", g.sigmas}, {"folds", g.folds}, {"seed", g.seed}};
}

std::vector<MethodParams> grid_cells(Method m, const GridSpec& grid) {
  grid.validate();
  std::vector<MethodParams> cells;
  const auto dims = sorted_unique(grid.dims);
  switch (m) {
    case Method::Baseline:
      cells.emplace_back();
      break;
    case Method::PJDR:
    case Method::LSMA:
      for (int d : dims) cells.push_back({.dim = d});
      break;
    case Method::LUSMA:
      for (int d : dims)
        for (int k : sorted_unique(grid.ks))
          for (double s : sorted_unique(grid.sigmas)) cells.push_back({.dim = d, .k = k, .sigma = s});
      break;
    case Method::CoSpace:
      for (int d : dims)
        for (double a : sorted_unique(grid.alphas))
          for (double b : sorted_unique(grid.betas)) cells.push_back({.dim = d, .alpha = a, .beta = b});
      break;
  }
  return cells;
}

std::vector<Fold> kfold_split(Index n, int folds, std::uint64_t seed) {
  require(folds >= 1, "folds must be positive");
  require(folds <= n, "cannot split " + std::to_string(n) + " samples into " + std::to_string(folds) + " folds");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Fold> out(static_cast<std::size_t>(folds));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index start = 0;
  for (int f = 0; f < folds; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    auto& fold = out[static_cast<std::size_t>(f)];
    fold.val.assign(order.begin() + start, order.begin() + start + len);
    std::sort(fold.val.begin(), fold.val.end());
    start += len;
  }
  for (int f = 0; f < folds; ++f) {
    auto& fold = out[static_cast<std::size_t>(f)];
    std::vector<bool> held(static_cast<std::size_t>(n), false);
    for (Index i : fold.val) held[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < n; ++i) {
      if (!held[static_cast<std::size_t>(i)]) fold.train.push_back(i);
    }
  }
  return out;
}

TrainedMethod train_method(Method m, const PairedDataset& train, const MethodParams& params,
                           const Hyperparams& base) {
  TrainedMethod tm;
  tm.method = m;
  tm.params = params;
  if (m == Method::Baseline) {
    train.validate();
    tm.theta_ms = Matrix::Identity(train.ms_bands(), train.ms_bands());
    return tm;
  }
  if (m == Method::CoSpace) {
    Hyperparams h = base;
    h.dim = params.dim;
    h.alpha = params.alpha;
    h.beta = params.beta;
    tm.cospace = fit(train, h);
    tm.theta_ms = tm.cospace->theta_ms();
    tm.theta_hs = tm.cospace->theta_hs();
    return tm;
  }
  const StackedSystem sys = stack_system(train);
  LinearProjection proj;
  if (m == Method::PJDR) {
    proj = fit_pjdr(sys, params.dim);
  } else if (m == Method::LUSMA) {
    proj = fit_lpp(sys, laplacian(correspondence_knn_adjacency(train.ms, train.hs, params.k, params.sigma)),
                   params.dim);
    proj.params["k"] = params.k;
    proj.params["sigma"] = params.sigma;
  } else {
    proj = fit_lpp(sys, laplacian(lda_like_adjacency(stacked_labels(train.labels))), params.dim);
  }
  proj.method = method_name(m);
  tm.theta_ms = proj.theta_ms();
  tm.theta_hs = proj.theta_hs();
  tm.projection = std::move(proj);
  return tm;
}

ReferenceSet reference_set(const TrainedMethod& tm, const PairedDataset& train, RefMode refs) {
  ReferenceSet ref;
  if (tm.method == Method::Baseline || refs == RefMode::MsOnly) {
    ref.embeddings = tm.theta_ms * train.ms;
    ref.labels = train.labels;
  } else {
    ref.embeddings.resize(tm.theta_ms.rows(), 2 * train.size());
    ref.embeddings << tm.theta_ms * train.ms, tm.theta_hs * train.hs;
    ref.labels = stacked_labels(train.labels);
  }
  return ref;
}

Labels predict(const TrainedMethod& tm, const PairedDataset& train, const Matrix& ms_queries,
               const std::string& classifier, const ClassifierOptions& opts) {
  require(ms_queries.rows() == tm.theta_ms.cols(), "queries have " + std::to_string(ms_queries.rows()) +
                                                       " bands, expected " + std::to_string(tm.theta_ms.cols()));
  const Matrix embedded = tm.theta_ms * ms_queries;
  if (classifier == "1nn") return knn1_predict(reference_set(tm, train, opts.refs), embedded);
  if (classifier == "linear") {
    const ReferenceSet ref = reference_set(tm, train, opts.refs);
    const Matrix weights = fit_linear(ref.embeddings, onehot_encode(ref.labels, train.num_classes), opts.linear_lambda);
    return linear_predict(weights, embedded);
  }
  if (classifier == "p") {
    require(tm.cospace.has_value(), "classifier 'p' needs a CoSpace model");
    return predict_via_p(*tm.cospace, ms_queries);
  }
  throw ValidationError("unknown classifier '" + classifier + "'; use 1nn, linear or p");
}

GridSearchResult grid_search(const std::vector<MethodParams>& cells, int folds, const CellScorer& scorer,
                             unsigned threads) {
  require(!cells.empty(), "grid has no cells");
  require(folds >= 1, "folds must be positive");
  GridSearchResult result;
  result.table.resize(cells.size());
  const std::size_t jobs = cells.size() * static_cast<std::size_t>(folds);
  std::vector<double> scores(jobs, 0.0);
  std::vector<std::string> errors(jobs);
  parallel_for(jobs, threads, [&](std::size_t job) {
    const std::size_t cell = job / static_cast<std::size_t>(folds);
    const int fold = static_cast<int>(job % static_cast<std::size_t>(folds));
    try {
      scores[job] = scorer(cells[cell], fold);
    } catch (const ValidationError& e) {
      errors[job] = e.what();
    } catch (const NumericalError& e) {
      errors[job] = e.what();
    }
  });

  bool found = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult& row = result.table[c];
    row.params = cells[c];
    for (int f = 0; f < folds; ++f) {
      const std::size_t job = c * static_cast<std::size_t>(folds) + static_cast<std::size_t>(f);
      if (!errors[job].empty()) {
        row.feasible = false;
        row.error = errors[job];
        row.fold_scores.clear();
        break;
      }
      row.fold_scores.push_back(scores[job]);
    }
    if (!row.feasible) continue;
    row.mean_score = std::accumulate(row.fold_scores.begin(), row.fold_scores.end(), 0.0) / folds;
    if (!found || row.mean_score > result.best_score) {
      found = true;
      result.best = row.params;
      result.best_score = row.mean_score;
    }
  }
  if (!found) {
    throw ValidationError("no feasible grid cell: " + result.table.front().error);
  }
  return result;
}

GridSearchResult grid_search(const PairedDataset& ds, Method m, const GridSpec& grid, const Hyperparams& base,
                             const ClassifierOptions& opts, unsigned threads) {
  ds.validate();
  const auto cells = grid_cells(m, grid);
  const auto folds = kfold_split(ds.size(), grid.folds, grid.seed);
  std::vector<PairedDataset> fold_train;
  std::vector<Matrix> fold_val;
  std::vector<Labels> fold_truth;
  for (const Fold& f : folds) {
    fold_train.push_back(ds.subset(f.train));
    const PairedDataset val = ds.subset(f.val);
    fold_val.push_back(val.ms);
    fold_truth.push_back(val.labels);
  }
  const CellScorer scorer = [&](const MethodParams& params, int fold) {
    const auto f = static_cast<std::size_t>(fold);
    fold_train[f].validate();
    const TrainedMethod tm = train_method(m, fold_train[f], params, base);
    return accuracy(fold_truth[f], predict(tm, fold_train[f], fold_val[f], "1nn", opts));
  };
  return grid_search(cells, grid.folds, scorer, threads);
}

std::vector<Index> stratified_subsample(const Labels& labels, int num_classes, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0, 1]");
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i] - 1)].push_back(static_cast<Index>(i));
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> keep;
  for (int k = 0; k < num_classes; ++k) {
    auto& members = by_class[static_cast<std::size_t>(k)];
    const auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    require(take >= 1, "fraction " + format_double(fraction) + " leaves class " + std::to_string(k + 1) +
                           " with no training samples");
    std::shuffle(members.begin(), members.end(), rng);
    keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::vector<SensitivityRow> size_sensitivity(const PairedDataset& train, const LabeledSamples& test, Method m,
                                             const MethodParams& params, const std::vector<double>& fractions,
                                             std::uint64_t seed, const Hyperparams& base,
                                             const ClassifierOptions& opts) {
  require(!fractions.empty(), "no fractions given");
  for (double f : fractions) require(f > 0.0 && f <= 1.0, "fractions must lie in (0, 1]");
  std::vector<SensitivityRow> rows;
  for (double f : fractions) {
    const PairedDataset sub = train.subset(stratified_subsample(train.labels, train.num_classes, f, seed));
    const TrainedMethod tm = train_method(m, sub, params, base);
    SensitivityRow row;
    row.fraction = f;
    row.train_size = sub.size();
    row.oa_1nn = accuracy(test.labels, predict(tm, sub, test.features, "1nn", opts));
    row.oa_linear = accuracy(test.labels, predict(tm, sub, test.features, "linear", opts));
    row.oa_p = tm.cospace ? accuracy(test.labels, predict(tm, sub, test.features, "p", opts))
                          : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

BenchmarkConfig benchmark_config_from_json(const json& j, const std::string& base_dir) {
  try {
    BenchmarkConfig cfg;
    const json& ds = j.at("dataset");
    if (ds.contains("scene")) {
      cfg.dataset.scene = scene_spec_from_json(ds.at("scene"));
    } else if (ds.contains("scene_path")) {
      cfg.dataset.scene = load_scene_spec(resolve(base_dir, ds.at("scene_path").get<std::string>()));
    } else {
      cfg.dataset.train_ms = resolve(base_dir, ds.at("train_ms").get<std::string>());
      cfg.dataset.train_hs = resolve(base_dir, ds.at("train_hs").get<std::string>());
      cfg.dataset.train_labels = resolve(base_dir, ds.value("train_labels", ds.at("train_ms").get<std::string>()));
      cfg.dataset.test_ms = resolve(base_dir, ds.at("test_ms").get<std::string>());
      cfg.dataset.test_labels = resolve(base_dir, ds.value("test_labels", ds.at("test_ms").get<std::string>()));
    }
    for (const auto& name : j.at("methods")) cfg.methods.push_back(parse_method(name.get<std::string>()));
    require(!cfg.methods.empty(), "config lists no methods");
    cfg.grid = grid_from_json(j.value("grid", json::object()));
    cfg.hyper = hyperparams_from_json(j.value("hyper", json::object()));
    cfg.classifier.refs = parse_ref_mode(j.value("refs", std::string("both")));
    cfg.classifier.linear_lambda = j.value("linear_lambda", 1e-2);
    cfg.fractions = j.value("fractions", std::vector<double>{});
    cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string{}));
    cfg.threads = j.value("threads", 0U);
    if (cfg.threads == 0) cfg.threads = threads_from_env();
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid experiment config: ") + e.what());
  }
}

LoadedData load_dataset(const DatasetSource& src) {
  if (src.scene) {
    Scene scene = make_synthetic_scene(*src.scene);
    return {std::move(scene.train), std::move(scene.test)};
  }
  const FeatureTable ms = load_csv(src.train_ms);
  const FeatureTable hs = load_csv(src.train_hs);
  const Labels labels = load_labels_csv(src.train_labels);
  const FeatureTable test = load_csv(src.test_ms);
  const Labels test_labels = load_labels_csv(src.test_labels);
  require(!labels.empty(), "training set is empty");
  const int num_classes = std::max(*std::max_element(labels.begin(), labels.end()),
                                   test_labels.empty() ? 0 : *std::max_element(test_labels.begin(), test_labels.end()));
  LoadedData data;
  data.train = make_paired_dataset(ms.samples, hs.samples, labels, num_classes);
  require(test.samples.rows() == data.train.ms_bands(), "test MS band count differs from training MS");
  require(static_cast<Index>(test_labels.size()) == test.samples.cols(), "test label count differs from test pixels");
  data.test.features = test.samples;
  data.test.labels = test_labels;
  return data;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) { return run_benchmark(config, load_dataset(config.dataset)); }

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const LoadedData& data) {
  require(!config.methods.empty(), "no methods requested");
  BenchmarkResult out;
  out.num_classes = data.train.num_classes;
  out.train_size = data.train.size();
  out.test_size = data.test.features.cols();
  out.seed = config.grid.seed;
  for (Method m : config.methods) {
    const auto start = std::chrono::steady_clock::now();
    MethodResult mr;
    mr.method = m;
    mr.search = grid_search(data.train, m, config.grid, config.hyper, config.classifier, config.threads);
    const TrainedMethod tm = train_method(m, data.train, mr.search.best, config.hyper);
    std::vector<std::string> classifiers{"1nn", "linear"};
    if (m == Method::CoSpace) classifiers.emplace_back("p");
    for (const auto& c : classifiers) {
      Labels pred = predict(tm, data.train, data.test.features, c, config.classifier);
      mr.reports[c] = evaluate(data.test.labels, pred, data.train.num_classes);
      mr.predictions[c] = std::move(pred);
    }
    if (m == Method::CoSpace && !config.fractions.empty()) {
      out.sensitivity = size_sensitivity(data.train, data.test, m, mr.search.best, config.fractions, config.grid.seed,
                                         config.hyper, config.classifier);
    }
    mr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.methods.push_back(std::move(mr));
  }
  return out;
}

namespace {

json search_to_json(Method m, const GridSearchResult& s) {
  json table = json::array();
  for (const auto& row : s.table) {
    json r = {{"params", params_to_json(m, row.params)}, {"feasible", row.feasible}};
    if (row.feasible) {
      r["mean_oa"] = row.mean_score;
      r["fold_oa"] = row.fold_scores;
    } else {
      r["error"] = row.error;
    }
    table.push_back(std::move(r));
  }
  return {{"best_params", params_to_json(m, s.best)}, {"cv_score", s.best_score}, {"cv_table", std::move(table)}};
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

json gridsearch_to_json(const std::vector<std::pair<Method, GridSearchResult>>& results) {
  json methods = json::array();
  for (const auto& [m, s] : results) {
    json j = search_to_json(m, s);
    j["method"] = method_name(m);
    methods.push_back(std::move(j));
  }
  return {{"methods", std::move(methods)}};
}

json benchmark_to_json(const BenchmarkResult& r) {
  json methods = json::array();
  for (const auto& mr : r.methods) {
    json j = search_to_json(mr.method, mr.search);
    j["method"] = method_name(mr.method);
    json reports = json::object();
    for (const auto& [c, rep] : mr.reports) reports[c] = metrics_to_json(rep);
    j["reports"] = std::move(reports);
    methods.push_back(std::move(j));
  }
  json doc = {{"seed", r.seed},
              {"num_classes", r.num_classes},
              {"train_size", r.train_size},
              {"test_size", r.test_size},
              {"methods", std::move(methods)}};
  if (!r.sensitivity.empty()) {
    json rows = json::array();
    for (const auto& s : r.sensitivity) {
      rows.push_back({{"fraction", s.fraction},
                      {"train_size", s.train_size},
                      {"oa_1nn", s.oa_1nn},
                      {"oa_linear", s.oa_linear},
                      {"oa_p", std::isnan(s.oa_p) ? json(nullptr) : json(s.oa_p)}});
    }
    doc["size_sensitivity"] = std::move(rows);
  }
  return doc;
}

void write_benchmark_outputs(const BenchmarkResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const std::filesystem::path root(dir);
  save_json((root / "results.json").string(), benchmark_to_json(r));

  std::string table = "method,classifier,oa,aa,kappa";
  for (int k = 1; k <= r.num_classes; ++k) table += ",class_" + std::to_string(k);
  table += '\n';
  json timings = json::object();
  for (const auto& mr : r.methods) {
    for (const auto& [c, rep] : mr.reports) {
      table += method_name(mr.method) + ',' + c + ',' + fixed(rep.oa, 4) + ',' + fixed(rep.aa, 4) + ',' +
               fixed(rep.kappa, 4);
      for (double v : rep.per_class) table += ',' + fixed(v, 4);
      table += '\n';
    }
    for (const auto& [c, pred] : mr.predictions) {
      save_predictions_csv((root / ("pred_" + method_name(mr.method) + "_" + c + ".csv")).string(), pred);
    }
    timings[method_name(mr.method)] = mr.seconds;
  }
  write_file_atomic((root / "table.csv").string(), table);
  save_json((root / "timings.json").string(), {{"wall_clock_seconds", timings}});
}

unsigned threads_from_env() {
  const char* env = std::getenv("COSPACE_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, 256));
}

}  // namespace cospace
