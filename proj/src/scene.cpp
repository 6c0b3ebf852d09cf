#include "cospace/scene.hpp"

#include <cmath>
#include <random>

#include "cospace/csv.hpp"

namespace cospace {

using nlohmann::json;

namespace {

Vector project_to_row_space(const Matrix& filters, const Vector& v) {
  // S^T (S S^T)^-1 S v via a complete orthogonal decomposition, robust to rank loss.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(filters);
  return cod.pseudoInverse() * (filters * v);
}

Vector unit(const Vector& v, const char* what) {
  const double n = v.norm();
  if (!(n > 1e-10)) throw ValidationError(std::string("SRF has no usable ") + what + " direction");
  return v / n;
}

}  // namespace

void SceneSpec::validate() const {
  require(classes.size() >= 2, "scene needs at least 2 classes");
  require(!hs_centers.empty() && !ms_centers.empty(), "scene needs MS and HS band centers");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma must be nonnegative");
  require(offset_sigma >= 0.0 && std::isfinite(offset_sigma), "offset_sigma must be nonnegative");
  require(srf_fwhm > 0.0, "srf_fwhm must be positive");
  require(test_fraction >= 0.0 && std::isfinite(test_fraction), "test_fraction must be nonnegative");
  const int count = static_cast<int>(classes.size());
  if (metamer) {
    require(metamer->source >= 1 && metamer->source <= count, "metamer source class out of range");
    require(metamer->target >= 1 && metamer->target <= count, "metamer target class out of range");
    require(metamer->source != metamer->target, "metamer source and target must differ");
  }
  for (int k = 0; k < count; ++k) {
    const auto& c = classes[static_cast<std::size_t>(k)];
    require(c.size > 0, "class " + std::to_string(k + 1) + " must have a positive size");
    const bool may_omit = metamer && metamer->target == k + 1;
    if (!(may_omit && c.hs_mean.empty())) {
      require(c.hs_mean.size() == hs_centers.size(),
              "class " + std::to_string(k + 1) + " hs_mean has " + std::to_string(c.hs_mean.size()) +
                  " values, expected " + std::to_string(hs_centers.size()));
    }
  }
}

SceneSpec scene_spec_from_json(const json& doc) {
  try {
    SceneSpec spec;
    for (const auto& c : doc.at("classes")) {
      SceneClass sc;
      if (c.contains("hs_mean")) sc.hs_mean = c.at("hs_mean").get<std::vector<double>>();
      sc.size = c.at("size").get<int>();
      spec.classes.push_back(std::move(sc));
    }
    spec.noise_sigma = doc.at("noise_sigma").get<double>();
    spec.offset_sigma = doc.value("offset_sigma", 0.0);
    spec.srf_fwhm = doc.at("srf_fwhm").get<double>();
    spec.ms_centers = doc.at("ms_centers").get<std::vector<double>>();
    spec.hs_centers = doc.at("hs_centers").get<std::vector<double>>();
    spec.test_fraction = doc.value("test_fraction", 1.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("metamer")) {
      const auto& m = doc.at("metamer");
      MetamerSpec ms;
      ms.source = m.at("source").get<int>();
      ms.target = m.at("target").get<int>();
      ms.amplitude = m.value("amplitude", 1.0);
      ms.ms_offset = m.value("ms_offset", 0.0);
      spec.metamer = ms;
    }
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid scene spec: ") + e.what());
  }
}

json scene_spec_to_json(const SceneSpec& spec) {
  json doc;
  doc["classes"] = json::array();
  for (const auto& c : spec.classes) {
    json jc;
    if (!c.hs_mean.empty()) jc["hs_mean"] = c.hs_mean;
    jc["size"] = c.size;
    doc["classes"].push_back(jc);
  }
  doc["noise_sigma"] = spec.noise_sigma;
  if (spec.offset_sigma > 0.0) doc["offset_sigma"] = spec.offset_sigma;
  doc["srf_fwhm"] = spec.srf_fwhm;
  doc["ms_centers"] = spec.ms_centers;
  doc["hs_centers"] = spec.hs_centers;
  doc["test_fraction"] = spec.test_fraction;
  doc["seed"] = spec.seed;
  if (spec.metamer) {
    doc["metamer"] = {{"source", spec.metamer->source},
                      {"target", spec.metamer->target},
                      {"amplitude", spec.metamer->amplitude},
                      {"ms_offset", spec.metamer->ms_offset}};
  }
  return doc;
}

SceneSpec load_scene_spec(const std::string& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return scene_spec_from_json(doc);
}

Vector srf_null_direction(const Matrix& filters) {
  const Index dh = filters.cols();
  Vector pattern(dh);
  for (Index j = 0; j < dh; ++j) pattern(j) = (j % 2 == 0) ? 1.0 : -1.0;
  return unit(pattern - project_to_row_space(filters, pattern), "null-space");
}

Vector srf_row_direction(const Matrix& filters) {
  const Index dh = filters.cols();
  Vector ramp(dh);
  for (Index j = 0; j < dh; ++j) ramp(j) = static_cast<double>(j) - 0.5 * static_cast<double>(dh - 1);
  return unit(project_to_row_space(filters, ramp), "row-space");
}

Scene make_synthetic_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.srf = build_gaussian_srf(spec.ms_centers, spec.hs_centers, spec.srf_fwhm);
  scene.hs_band_centers = spec.hs_centers;
  const Matrix& s = scene.srf.filters;
  const Index dh = s.cols();
  const int num_classes = static_cast<int>(spec.classes.size());

  Matrix means(dh, num_classes);
  for (int k = 0; k < num_classes; ++k) {
    const auto& c = spec.classes[static_cast<std::size_t>(k)];
    if (!c.hs_mean.empty()) means.col(k) = Eigen::Map<const Vector>(c.hs_mean.data(), dh);
  }
  if (spec.metamer) {
    const Index src = spec.metamer->source - 1;
    require(!spec.classes[static_cast<std::size_t>(src)].hs_mean.empty(), "metamer source needs an hs_mean");
    Vector target = means.col(src) + spec.metamer->amplitude * srf_null_direction(s);
    if (spec.metamer->ms_offset != 0.0) target += spec.metamer->ms_offset * srf_row_direction(s);
    means.col(spec.metamer->target - 1) = target;
  }
  scene.class_hs_means = means;

  Index train_total = 0;
  Index test_total = 0;
  std::vector<Index> test_counts;
  for (const auto& c : spec.classes) {
    train_total += c.size;
    const auto t = static_cast<Index>(std::llround(spec.test_fraction * c.size));
    test_counts.push_back(t);
    test_total += t;
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix train_hs(dh, train_total);
  Matrix test_hs(dh, test_total);
  Labels train_labels;
  Labels test_labels;
  Index ti = 0;
  Index vi = 0;
  for (int k = 0; k < num_classes; ++k) {
    const auto draw = [&](auto col) {
      const double shift = spec.offset_sigma > 0.0 ? spec.offset_sigma * normal(rng) : 0.0;
      for (Index b = 0; b < dh; ++b) col(b) = means(b, k) + shift + spec.noise_sigma * normal(rng);
    };
    for (int i = 0; i < spec.classes[static_cast<std::size_t>(k)].size; ++i) {
      draw(train_hs.col(ti++));
      train_labels.push_back(k + 1);
    }
    for (Index i = 0; i < test_counts[static_cast<std::size_t>(k)]; ++i) {
      draw(test_hs.col(vi++));
      test_labels.push_back(k + 1);
    }
  }

  const Vector ms_centers = s * Eigen::Map<const Vector>(spec.hs_centers.data(), dh);
  scene.ms_band_centers.assign(ms_centers.data(), ms_centers.data() + ms_centers.size());
  scene.train = make_paired_dataset(s * train_hs, train_hs, train_labels, num_classes);
  scene.test.features = s * test_hs;
  scene.test.labels = std::move(test_labels);
  return scene;
}

}  // namespace cospace
