#include <doctest.h>

#include <filesystem>

#include "cospace/serialize.hpp"
#include "helpers.hpp"

using namespace cospace;

TEST_CASE("matrix json round trip is exact") {
  std::mt19937_64 rng(2);
  const Matrix m = testing::random_matrix(3, 4, rng, 1e5);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(matrix_to_json(Matrix(0, 2))).cols() == 2);
  nlohmann::json bad = matrix_to_json(m);
  bad["rows"] = 2;
  CHECK_THROWS_AS(matrix_from_json(bad), ValidationError);
}

TEST_CASE("hyperparameters merge over a base") {
  Hyperparams h;
  h.rho = 2.0;
  const Hyperparams merged = hyperparams_from_json({{"alpha", 0.5}, {"dim", 7}}, h);
  CHECK(merged.alpha == 0.5);
  CHECK(merged.dim == 7);
  CHECK(merged.rho == 2.0);
  CHECK(hyperparams_from_json(hyperparams_to_json(merged)).rho == 2.0);
  CHECK_THROWS_AS(hyperparams_from_json({{"gamma", 1.0}}), ValidationError);
  CHECK_THROWS_AS(hyperparams_from_json({{"alpha", "x"}}), ValidationError);
}

TEST_CASE("model documents survive a save and load") {
  const PairedDataset ds = testing::random_pairs(8, 20, 3, 6, 2, 0.3);
  Hyperparams h;
  h.dim = 3;
  const CoSpaceModel model = fit(ds, h);
  const auto dir = std::filesystem::temp_directory_path() / "cospace_unit";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.json").string();
  save_model(path, make_document(model, ds));
  const ModelDocument back = load_model(path);
  CHECK(back.method == "cospace");
  CHECK(back.theta == model.theta);
  REQUIRE(back.p.has_value());
  CHECK(*back.p == model.p);
  CHECK(back.references.cols() == 40);
  CHECK(back.reference_labels == stacked_labels(ds.labels));
  const CoSpaceModel restored = back.to_cospace();
  CHECK(embed_ms(restored, ds.ms) == embed_ms(model, ds.ms));

  const LinearProjection proj = fit_pjdr(stack_system(ds), 2);
  const ModelDocument pd = document_from_json(document_to_json(make_document(proj, ds)));
  CHECK(pd.method == proj.method);
  CHECK_FALSE(pd.p.has_value());

  CHECK_THROWS_AS(load_model((dir / "absent.json").string()), IoError);
}
