#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "cospace/csv.hpp"
#include "cospace/experiment.hpp"
#include "cospace/serialize.hpp"

namespace fs = std::filesystem;
using namespace cospace;

namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(const char* kind, int code, const std::string& what) {
  std::cerr << "error: " << kind << ": " << one_line(what) << "\n";
  return code;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string spec;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  const Scene scene = make_synthetic_scene(load_scene_spec(a.spec));
  ensure_dir(a.out);
  save_csv(join(a.out, "train_ms.csv"), scene.train.ms, scene.train.labels);
  save_csv(join(a.out, "train_hs.csv"), scene.train.hs, scene.train.labels);
  save_csv(join(a.out, "test_ms.csv"), scene.test.features, scene.test.labels);
  save_matrix_csv(join(a.out, "srf.csv"), scene.srf.filters);
  std::cout << "train " << scene.train.size() << " test " << scene.test.features.cols() << " ms_bands "
            << scene.train.ms_bands() << " hs_bands " << scene.train.hs_bands() << "\n";
}

// --- fit ------------------------------------------------------------------

struct FitArgs {
  std::string train_ms, train_hs, labels, hyper, out;
  std::string method = "cospace";
  double alpha = 0.01;
  double beta = 0.01;
  int dim = 30;
  int k = 10;
  double sigma = 1.0;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* dim_opt = nullptr;
};

PairedDataset load_pairs(const std::string& ms_path, const std::string& hs_path, const std::string& labels_path) {
  Matrix ms = load_csv(ms_path).samples;
  Matrix hs = load_csv(hs_path).samples;
  Labels labels = load_labels_csv(labels_path);
  require(ms.cols() == hs.cols(), "MS and HS files hold " + std::to_string(ms.cols()) + " and " +
                                      std::to_string(hs.cols()) + " samples");
  require(static_cast<Index>(labels.size()) == ms.cols(), "label file holds " + std::to_string(labels.size()) +
                                                               " labels for " + std::to_string(ms.cols()) + " samples");
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l);
  return make_paired_dataset(std::move(ms), std::move(hs), std::move(labels), classes);
}

void run_fit(const FitArgs& a) {
  const PairedDataset train = load_pairs(a.train_ms, a.train_hs, a.labels);
  Hyperparams hyper;
  if (!a.hyper.empty()) hyper = hyperparams_from_json(parse_json_file(a.hyper));
  if (a.hyper.empty() || a.alpha_opt->count() > 0) hyper.alpha = a.alpha;
  if (a.hyper.empty() || a.beta_opt->count() > 0) hyper.beta = a.beta;
  if (a.hyper.empty() || a.dim_opt->count() > 0) hyper.dim = a.dim;

  const Method m = parse_method(a.method);
  require(m != Method::Baseline, "the baseline method has no model to fit");
  MethodParams params;
  params.dim = hyper.dim;
  if (m == Method::CoSpace) {
    params.alpha = hyper.alpha;
    params.beta = hyper.beta;
  }
  if (m == Method::LUSMA) {
    params.k = a.k;
    params.sigma = a.sigma;
  }
  const TrainedMethod tm = train_method(m, train, params, hyper);
  if (tm.cospace) {
    save_model(a.out, make_document(*tm.cospace, train));
    std::cout << "objective " << format_double(tm.cospace->objective_trace.back()) << " iterations "
              << tm.cospace->outer_iterations() << " converged " << (tm.cospace->converged ? "true" : "false") << "\n";
  } else {
    save_model(a.out, make_document(*tm.projection, train));
    std::cout << "method " << method_name(m) << " dim " << params.dim << "\n";
  }
}

// --- transform ------------------------------------------------------------

struct TransformArgs {
  std::string model, input, out;
  std::string modality = "ms";
};

void run_transform(const TransformArgs& a) {
  const ModelDocument doc = load_model(a.model);
  const FeatureTable in = load_csv(a.input);
  Matrix out;
  if (a.modality == "ms") {
    require(in.samples.rows() == doc.ms_bands, "input has " + std::to_string(in.samples.rows()) +
                                                   " bands, model expects " + std::to_string(doc.ms_bands) +
                                                   " MS bands");
    out = doc.theta.leftCols(doc.ms_bands) * in.samples;
  } else if (a.modality == "hs") {
    require(in.samples.rows() == doc.hs_bands, "input has " + std::to_string(in.samples.rows()) +
                                                   " bands, model expects " + std::to_string(doc.hs_bands) +
                                                   " HS bands");
    out = doc.theta.rightCols(doc.hs_bands) * in.samples;
  } else {
    throw ValidationError("unknown modality '" + a.modality + "'; use ms or hs");
  }
  save_csv(a.out, out, in.labels);
}

// --- predict --------------------------------------------------------------

struct PredictArgs {
  std::string model, input, out, pgm;
  std::string classifier = "1nn";
  std::string refs = "both";
  double lambda = 1e-2;
  int width = 0;
  int height = 0;
};

ReferenceSet document_references(const ModelDocument& doc, RefMode refs) {
  require(doc.references.cols() > 0, "model document carries no reference embeddings");
  ReferenceSet ref;
  if (refs == RefMode::Both) {
    ref.embeddings = doc.references;
    ref.labels = doc.reference_labels;
  } else {
    const Index n = doc.references.cols() / 2;
    ref.embeddings = doc.references.leftCols(n);
    ref.labels.assign(doc.reference_labels.begin(), doc.reference_labels.begin() + n);
  }
  return ref;
}

void run_predict(const PredictArgs& a) {
  const ModelDocument doc = load_model(a.model);
  const Matrix queries = load_csv(a.input).samples;
  require(queries.rows() == doc.ms_bands, "input has " + std::to_string(queries.rows()) + " bands, model expects " +
                                              std::to_string(doc.ms_bands) + " MS bands");
  const RefMode refs = parse_ref_mode(a.refs);
  const Matrix embedded = doc.theta.leftCols(doc.ms_bands) * queries;
  Labels pred;
  if (a.classifier == "1nn") {
    pred = knn1_predict(document_references(doc, refs), embedded);
  } else if (a.classifier == "linear") {
    const ReferenceSet ref = document_references(doc, refs);
    pred = linear_predict(fit_linear(ref.embeddings, onehot_encode(ref.labels, doc.num_classes), a.lambda), embedded);
  } else if (a.classifier == "p") {
    pred = predict_via_p(doc.to_cospace(), queries);
  } else {
    throw ValidationError("unknown classifier '" + a.classifier + "'; use 1nn, linear or p");
  }
  save_predictions_csv(a.out, pred);
  if (!a.pgm.empty()) save_label_pgm(a.pgm, pred, a.width, a.height);
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string pred, truth, out;
  int num_classes = 0;
};

void run_evaluate(const EvaluateArgs& a) {
  const Labels pred = load_labels_csv(a.pred);
  const Labels truth = load_labels_csv(a.truth);
  int classes = a.num_classes;
  if (classes == 0) {
    for (int l : truth) classes = std::max(classes, l);
  }
  const MetricsReport r = evaluate(truth, pred, classes);
  save_json(a.out, metrics_to_json(r));
  std::cout << "oa " << format_double(r.oa) << " aa " << format_double(r.aa) << " kappa " << format_double(r.kappa)
            << "\n";
}

// --- gridsearch / benchmark ----------------------------------------------

struct ExperimentArgs {
  std::string config, out;
};

BenchmarkConfig load_config(const ExperimentArgs& a) {
  const std::string base = fs::path(a.config).parent_path().string();
  BenchmarkConfig cfg = benchmark_config_from_json(parse_json_file(a.config), base.empty() ? "." : base);
  if (!a.out.empty()) cfg.output_dir = a.out;
  require(!cfg.output_dir.empty(), "no output directory: pass --out or set output_dir in the config");
  return cfg;
}

void run_gridsearch(const ExperimentArgs& a) {
  const BenchmarkConfig cfg = load_config(a);
  const LoadedData data = load_dataset(cfg.dataset);
  std::vector<std::pair<Method, GridSearchResult>> results;
  for (Method m : cfg.methods) {
    results.emplace_back(m, grid_search(data.train, m, cfg.grid, cfg.hyper, cfg.classifier, cfg.threads));
    const auto& r = results.back().second;
    std::cout << method_name(m) << " " << params_to_json(m, r.best).dump() << " cv_oa " << format_double(r.best_score)
              << "\n";
  }
  ensure_dir(cfg.output_dir);
  save_json(join(cfg.output_dir, "gridsearch.json"), gridsearch_to_json(results));
}

void run_bench(const ExperimentArgs& a) {
  const BenchmarkConfig cfg = load_config(a);
  const BenchmarkResult r = run_benchmark(cfg);
  ensure_dir(cfg.output_dir);
  write_benchmark_outputs(r, cfg.output_dir);
  for (const auto& m : r.methods) {
    std::cout << method_name(m.method);
    for (const auto& [clf, rep] : m.reports) std::cout << " " << clf << "=" << format_double(rep.oa);
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Common subspace learning for paired hyperspectral and multispectral data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic paired scene from a JSON spec");
  c_sim->add_option("--spec", sim.spec, "Scene spec JSON")->required();
  c_sim->add_option("--out", sim.out, "Output directory")->required();

  FitArgs fit_a;
  auto* c_fit = app.add_subcommand("fit", "Learn a projection from paired training data");
  c_fit->add_option("--train-ms", fit_a.train_ms, "MS training CSV")->required();
  c_fit->add_option("--train-hs", fit_a.train_hs, "HS training CSV")->required();
  c_fit->add_option("--labels", fit_a.labels, "CSV with a label column")->required();
  fit_a.alpha_opt = c_fit->add_option("--alpha", fit_a.alpha, "Weight of the P regularizer")->capture_default_str();
  fit_a.beta_opt = c_fit->add_option("--beta", fit_a.beta, "Weight of the alignment term")->capture_default_str();
  fit_a.dim_opt = c_fit->add_option("--dim", fit_a.dim, "Subspace dimension")->capture_default_str();
  c_fit->add_option("--hyper", fit_a.hyper, "JSON with solver constants");
  c_fit->add_option("--method", fit_a.method, "cospace, pjdr, lusma or lsma")->capture_default_str();
  c_fit->add_option("--k", fit_a.k, "Neighbours for lusma")->capture_default_str();
  c_fit->add_option("--sigma", fit_a.sigma, "Kernel width for lusma")->capture_default_str();
  c_fit->add_option("--out", fit_a.out, "Model JSON")->required();

  TransformArgs tr;
  auto* c_tr = app.add_subcommand("transform", "Embed samples with a fitted model");
  c_tr->add_option("--model", tr.model, "Model JSON")->required();
  c_tr->add_option("--input", tr.input, "Feature CSV")->required();
  c_tr->add_option("--modality", tr.modality, "ms or hs")->capture_default_str();
  c_tr->add_option("--out", tr.out, "Embedding CSV")->required();

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "Classify MS samples");
  c_pr->add_option("--model", pr.model, "Model JSON")->required();
  c_pr->add_option("--input", pr.input, "MS feature CSV")->required();
  c_pr->add_option("--classifier", pr.classifier, "1nn, linear or p")->capture_default_str();
  c_pr->add_option("--refs", pr.refs, "both or ms")->capture_default_str();
  c_pr->add_option("--lambda", pr.lambda, "Ridge weight of the linear classifier")->capture_default_str();
  c_pr->add_option("--out", pr.out, "Prediction CSV")->required();
  auto* pgm = c_pr->add_option("--pgm", pr.pgm, "Also write a PGM label map");
  c_pr->add_option("--width", pr.width, "Label map width")->needs(pgm);
  c_pr->add_option("--height", pr.height, "Label map height")->needs(pgm);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score predictions against ground truth");
  c_ev->add_option("--pred", ev.pred, "Prediction CSV")->required();
  c_ev->add_option("--truth", ev.truth, "CSV with a label column")->required();
  c_ev->add_option("--num-classes", ev.num_classes, "Class count (default: largest true label)");
  c_ev->add_option("--out", ev.out, "Report JSON")->required();

  ExperimentArgs gs;
  auto* c_gs = app.add_subcommand("gridsearch", "Cross-validated parameter search");
  c_gs->add_option("--config", gs.config, "Experiment JSON")->required();
  c_gs->add_option("--out", gs.out, "Output directory");

  ExperimentArgs bm;
  auto* c_bm = app.add_subcommand("benchmark", "Grid search, refit and test every method");
  c_bm->add_option("--config", bm.config, "Experiment JSON")->required();
  c_bm->add_option("--out", bm.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 1, e.what());
  }

  try {
    if (c_sim->parsed()) run_simulate(sim);
    else if (c_fit->parsed()) run_fit(fit_a);
    else if (c_tr->parsed()) run_transform(tr);
    else if (c_pr->parsed()) run_predict(pr);
    else if (c_ev->parsed()) run_evaluate(ev);
    else if (c_gs->parsed()) run_gridsearch(gs);
    else if (c_bm->parsed()) run_bench(bm);
  } catch (const ValidationError& e) {
    return fail("validation", 1, e.what());
  } catch (const NumericalError& e) {
    return fail("numerical", 2, e.what());
  } catch (const IoError& e) {
    return fail("io", 3, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail("validation", 1, e.what());
  } catch (const std::exception& e) {
    return fail("numerical", 2, e.what());
  }
  return 0;
}
