#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cospace/csv.hpp"
#include "cospace/scene.hpp"
#include "helpers.hpp"

using namespace cospace;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cospace_unit";
  fs::create_directories(dir);
  return (dir / name).string();
}

SceneSpec small_scene(double noise) {
  SceneSpec s;
  for (double center = 400; center <= 700; center += 20) s.hs_centers.push_back(center);
  s.ms_centers = {450, 550, 650};
  s.srf_fwhm = 60;
  const Index dh = static_cast<Index>(s.hs_centers.size());
  SceneClass a, b, c;
  for (Index j = 0; j < dh; ++j) {
    a.hs_mean.push_back(0.2 + 0.01 * static_cast<double>(j));
    c.hs_mean.push_back(0.6 - 0.02 * static_cast<double>(j));
  }
  a.size = b.size = c.size = 50;
  s.classes = {a, b, c};
  s.noise_sigma = noise;
  s.test_fraction = 0.4;
  s.seed = 11;
  s.metamer = MetamerSpec{1, 2, 0.3, 0.0};
  return s;
}

}  // namespace

TEST_CASE("onehot_encode places a single one per column") {
  const Matrix a = onehot_encode({2}, 3);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 1);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(2, 0) == 0.0);

  const Matrix b = onehot_encode({1, 1, 3}, 3);
  Matrix expected(3, 3);
  expected << 1, 1, 0, 0, 0, 0, 0, 0, 1;
  CHECK(b == expected);
  CHECK(onehot_decode(b) == Labels{1, 1, 3});
}

TEST_CASE("onehot_encode rejects out-of-range labels and names the index") {
  CHECK_THROWS_AS(onehot_encode({4}, 3), ValidationError);
  try {
    onehot_encode({1, 0}, 3);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("onehot columns sum to one and decode is the identity") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(1, 5);
  Labels labels;
  for (int i = 0; i < 40; ++i) labels.push_back(u(rng));
  const Matrix y = onehot_encode(labels, 5);
  CHECK((y.colwise().sum().array() == 1.0).all());
  CHECK(onehot_decode(y) == labels);
}

TEST_CASE("make_paired_dataset checks every class is present") {
  Matrix ms = Matrix::Ones(2, 3);
  Matrix hs = Matrix::Ones(4, 3);
  CHECK_THROWS_AS(make_paired_dataset(ms, hs, {1, 1, 1}, 2), ValidationError);
  CHECK_THROWS_AS(make_paired_dataset(ms, Matrix::Ones(4, 2), {1, 2, 1}, 2), ValidationError);
  const PairedDataset ds = make_paired_dataset(ms, hs, {1, 2, 1}, 2);
  CHECK(ds.size() == 3);
}

TEST_CASE("simulate_ms applies the SRF") {
  SpectralCube hs;
  hs.samples = Matrix(2, 1);
  hs.samples << 1.0, 3.0;
  hs.band_centers = {500, 510};
  SrfBank srf;
  srf.filters = Matrix(1, 2);
  srf.filters << 0.5, 0.5;
  const SpectralCube ms = simulate_ms(hs, srf);
  CHECK(ms.samples(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ms.band_centers[0] == doctest::Approx(505.0));

  SUBCASE("constant spectra stay constant") {
    SpectralCube flat;
    flat.samples = Matrix::Constant(30, 4, 0.37);
    for (int j = 0; j < 30; ++j) flat.band_centers.push_back(400 + 10 * j);
    const SrfBank g = build_gaussian_srf({450, 560, 650}, flat.band_centers, 40);
    const SpectralCube out = simulate_ms(flat, g);
    CHECK((out.samples.array() - 0.37).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("delta SRF selects a band") {
    SpectralCube cube;
    std::mt19937_64 rng(5);
    cube.samples = testing::random_matrix(4, 6, rng);
    cube.band_centers = {1, 2, 3, 4};
    SrfBank pick;
    pick.filters = Matrix::Zero(1, 4);
    pick.filters(0, 2) = 1.0;
    CHECK(simulate_ms(cube, pick).samples.row(0) == cube.samples.row(2));
  }
  SUBCASE("band count mismatch") {
    SrfBank bad;
    bad.filters = Matrix::Constant(1, 3, 1.0 / 3.0);
    CHECK_THROWS_AS(simulate_ms(hs, bad), ValidationError);
  }
}

TEST_CASE("build_gaussian_srf") {
  SUBCASE("far bands vanish") {
    const SrfBank s = build_gaussian_srf({500}, {200, 500, 800}, 10);
    CHECK(std::abs(s.filters(0, 1) - 1.0) < 1e-10);
    CHECK(s.filters(0, 0) < 1e-10);
    CHECK(s.filters(0, 2) < 1e-10);
  }
  SUBCASE("midway center splits evenly") {
    const SrfBank s = build_gaussian_srf({505}, {500, 510}, 10);
    CHECK(s.filters(0, 0) == 0.5);
    CHECK(s.filters(0, 1) == 0.5);
  }
  SUBCASE("three bands against the formula") {
    const SrfBank s = build_gaussian_srf({500}, {490, 500, 510}, 10);
    const double sigma = 10.0 / 2.3548;
    const double side = std::exp(-100.0 / (2 * sigma * sigma));
    const double total = 1.0 + 2.0 * side;
    CHECK(s.filters(0, 1) == doctest::Approx(1.0 / total).epsilon(1e-14));
    CHECK(s.filters(0, 0) == doctest::Approx(side / total).epsilon(1e-14));
    CHECK(s.filters(0, 0) == s.filters(0, 2));
    CHECK(s.filters(0, 1) > s.filters(0, 0));
  }
  CHECK_THROWS_AS(build_gaussian_srf({500}, {490, 500}, 0.0), ValidationError);
  CHECK_THROWS_AS(build_gaussian_srf({500}, {500, 490}, 10.0), ValidationError);
}

TEST_CASE("stack_system places blocks and duplicates labels") {
  const PairedDataset tiny = make_paired_dataset(Matrix::Constant(1, 1, 5.0), Matrix::Constant(1, 1, 7.0), {1}, 1);
  const StackedSystem s = stack_system(tiny);
  Matrix expected(2, 2);
  expected << 5, 0, 0, 7;
  CHECK(s.xtilde == expected);
  CHECK(s.ytilde == Matrix::Ones(1, 2));

  const PairedDataset ds = testing::random_pairs(1, 12, 3, 5, 3);
  const StackedSystem r = stack_system(ds);
  CHECK(r.xtilde.topLeftCorner(3, 12) == ds.ms);
  CHECK(r.xtilde.bottomRightCorner(5, 12) == ds.hs);
  CHECK(r.xtilde.topRightCorner(3, 12).cwiseAbs().sum() == 0.0);
  CHECK(r.xtilde.bottomLeftCorner(5, 12).cwiseAbs().sum() == 0.0);
  CHECK(r.ytilde.leftCols(12) == ds.onehot);
  CHECK(r.ytilde.rightCols(12) == ds.onehot);
}

TEST_CASE("ytilde repeats a two-class onehot") {
  Matrix y(2, 1);
  y << 1, 0;
  const PairedDataset ds = make_paired_dataset(Matrix::Ones(1, 2), Matrix::Ones(1, 2), {1, 2}, 2);
  const StackedSystem s = stack_system(ds);
  CHECK(s.ytilde.col(0) == y.col(0));
  CHECK(s.ytilde.col(2) == y.col(0));
}

TEST_CASE("csv round trip and parse errors") {
  std::mt19937_64 rng(9);
  const Matrix m = testing::random_matrix(5, 7, rng, 1e3);
  const std::string path = temp_path("round.csv");
  save_csv(path, m, Labels{1, 2, 3, 1, 2, 3, 1});
  const FeatureTable t = load_csv(path);
  CHECK((t.samples - m).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(t.labels.has_value());
  CHECK(*t.labels == Labels{1, 2, 3, 1, 2, 3, 1});

  const std::string two = temp_path("two.csv");
  std::ofstream(two) << "band_1,band_2,label\n0.5,1.5,1\n2.5,3.5,2\n";
  const FeatureTable tt = load_csv(two);
  CHECK(tt.samples.rows() == 2);
  CHECK(tt.samples.cols() == 2);
  CHECK(tt.samples(1, 0) == 1.5);
  CHECK(*tt.labels == Labels{1, 2});

  const std::string ragged = temp_path("ragged.csv");
  std::ofstream(ragged) << "band_1,band_2\n1,2\n3,4,5\n";
  try {
    load_csv(ragged);
    FAIL("expected a parse error");
  } catch (const CsvParseError& e) {
    CHECK(e.line() == 3);
  }

  const std::string text = temp_path("text.csv");
  std::ofstream(text) << "band_1\n1\nabc\n";
  CHECK_THROWS_AS(load_csv(text), CsvParseError);

  const std::string headless = temp_path("headless.csv");
  std::ofstream(headless) << "1,2\n3,4\n";
  CHECK_THROWS_AS(load_csv(headless), CsvParseError);

  CHECK_THROWS_AS(load_csv(temp_path("missing.csv")), IoError);
}

TEST_CASE("synthetic scene") {
  const SceneSpec spec = small_scene(0.02);
  const Scene a = make_synthetic_scene(spec);
  const Scene b = make_synthetic_scene(spec);
  CHECK(a.train.ms == b.train.ms);
  CHECK(a.train.hs == b.train.hs);
  CHECK(a.test.features == b.test.features);
  CHECK(a.train.size() == 150);
  CHECK(a.test.features.cols() == 60);

  SUBCASE("noise-free metamers share MS but not HS") {
    const Scene clean = make_synthetic_scene(small_scene(0.0));
    const Vector ms1 = clean.train.ms.col(0);
    const Vector ms2 = clean.train.ms.col(50);
    CHECK((ms1 - ms2).norm() < 1e-12);
    CHECK((clean.train.hs.col(0) - clean.train.hs.col(50)).norm() > 0.1);
  }
  SUBCASE("validation") {
    SceneSpec one = spec;
    one.classes.resize(1);
    one.metamer.reset();
    CHECK_THROWS_AS(make_synthetic_scene(one), ValidationError);
    SceneSpec empty = spec;
    empty.classes[0].size = 0;
    CHECK_THROWS_AS(make_synthetic_scene(empty), ValidationError);
  }
  SUBCASE("json round trip") {
    const SceneSpec back = scene_spec_from_json(scene_spec_to_json(spec));
    CHECK(make_synthetic_scene(back).train.hs == a.train.hs);
  }
}
