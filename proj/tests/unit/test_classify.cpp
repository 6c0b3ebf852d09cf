#include <doctest.h>

#include "cospace/classify.hpp"
#include "helpers.hpp"

using namespace cospace;
using testing::random_matrix;

namespace {

ReferenceSet line_refs() {
  ReferenceSet r;
  r.embeddings = Matrix(1, 3);
  r.embeddings << 0.0, 1.0, 5.0;
  r.labels = {1, 2, 3};
  return r;
}

// Brute force over every reference, first minimum wins.
Labels nearest_oracle(const ReferenceSet& ref, const Matrix& q) {
  Labels out;
  for (Index j = 0; j < q.cols(); ++j) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < ref.labels.size(); ++r) {
      const double dr = (ref.embeddings.col(static_cast<Index>(r)) - q.col(j)).squaredNorm();
      const double db = (ref.embeddings.col(static_cast<Index>(best)) - q.col(j)).squaredNorm();
      if (dr < db) best = r;
    }
    out.push_back(ref.labels[best]);
  }
  return out;
}

}  // namespace

TEST_CASE("knn1_predict examples and ties") {
  const ReferenceSet r = line_refs();
  Matrix q(1, 4);
  q << 0.4, 0.6, 3.5, 100.0;
  CHECK(knn1_predict(r, q) == Labels{1, 2, 3, 3});

  Matrix tie(1, 1);
  tie << 0.5;
  CHECK(knn1_predict(r, tie) == Labels{1});

  CHECK_THROWS_AS(knn1_predict(r, Matrix::Zero(2, 1)), ValidationError);
  ReferenceSet empty;
  empty.embeddings = Matrix(1, 0);
  CHECK_THROWS_AS(knn1_predict(empty, q), ValidationError);
}

TEST_CASE("knn1_predict agrees with brute force and is rotation invariant") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    ReferenceSet r;
    r.embeddings = random_matrix(4, 30, rng);
    for (int i = 0; i < 30; ++i) r.labels.push_back(1 + i % 3);
    const Matrix q = random_matrix(4, 25, rng);
    const Labels expected = nearest_oracle(r, q);
    CHECK(knn1_predict(r, q) == expected);

    const Eigen::HouseholderQR<Matrix> qr(random_matrix(4, 4, rng));
    const Matrix rot = qr.householderQ();
    ReferenceSet turned = r;
    turned.embeddings = rot * r.embeddings;
    CHECK(knn1_predict(turned, rot * q) == expected);
    CHECK(knn1_predict(r, r.embeddings) == r.labels);
  }
}

TEST_CASE("linear classifier separates two clusters") {
  std::mt19937_64 rng(3);
  Matrix e(2, 40);
  Labels labels;
  for (Index i = 0; i < 40; ++i) {
    const double side = i < 20 ? -3.0 : 3.0;
    e.col(i) = Vector::Constant(2, side) + 0.3 * random_matrix(2, 1, rng);
    labels.push_back(i < 20 ? 1 : 2);
  }
  const Matrix w = fit_linear(e, onehot_encode(labels, 2), 1e-3);
  CHECK(w.rows() == 2);
  CHECK(w.cols() == 3);
  CHECK(linear_predict(w, e) == labels);

  CHECK_THROWS_AS(fit_linear(e, onehot_encode(labels, 2), 0.0), ValidationError);
  CHECK_THROWS_AS(linear_predict(w, Matrix::Zero(3, 1)), ValidationError);
}

TEST_CASE("linear classifier with heavy ridge predicts the majority class") {
  std::mt19937_64 rng(4);
  const Matrix e = random_matrix(3, 30, rng);
  Labels labels(30, 2);
  for (int i = 0; i < 8; ++i) labels[static_cast<std::size_t>(i)] = 1;
  const Matrix w = fit_linear(e, onehot_encode(labels, 2), 1e12);
  CHECK(w.leftCols(3).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(w(0, 3) == doctest::Approx(8.0 / 30.0).epsilon(1e-9));
  CHECK(w(1, 3) == doctest::Approx(22.0 / 30.0).epsilon(1e-9));
  for (int l : linear_predict(w, random_matrix(3, 10, rng))) CHECK(l == 2);
}

TEST_CASE("linear classifier is unchanged by duplicating the training set") {
  std::mt19937_64 rng(5);
  const Matrix e = random_matrix(3, 20, rng);
  Labels labels;
  for (int i = 0; i < 20; ++i) labels.push_back(1 + i % 4);
  const Matrix y = onehot_encode(labels, 4);
  Matrix e2(3, 40), y2(4, 40);
  e2 << e, e;
  y2 << y, y;
  CHECK(testing::relative_gap(fit_linear(e, y, 0.1), fit_linear(e2, y2, 0.1)) <= 1e-10);
}

TEST_CASE("linear classifier weights are stationary") {
  std::mt19937_64 rng(6);
  const Matrix e = random_matrix(4, 25, rng);
  Labels labels;
  for (int i = 0; i < 25; ++i) labels.push_back(1 + i % 3);
  const Matrix y = onehot_encode(labels, 3);
  const double lambda = 0.05;
  const Matrix w = fit_linear(e, y, lambda);
  const auto loss = [&](const Matrix& m) {
    Matrix z(5, 25);
    z << e, Matrix::Ones(1, 25);
    return (y - m * z).squaredNorm() / 25.0 + lambda * m.leftCols(4).squaredNorm();
  };
  CHECK(testing::numeric_gradient(loss, w).norm() <= 1e-7);
}

TEST_CASE("predict_via_p takes the argmax of P Theta_M x") {
  CoSpaceModel m;
  m.ms_bands = 2;
  m.hs_bands = 1;
  m.theta = Matrix(2, 3);
  m.theta << 1, 0, 0, 0, 1, 0;
  m.p = Matrix(3, 2);
  m.p << 1, 0, 0, 1, -1, -1;
  Matrix q(2, 3);
  q << 2, 0, -1, 1, 3, -1;
  CHECK(predict_via_p(m, q) == Labels{1, 2, 3});

  Matrix scores(2, 1);
  scores << 0.5, 0.5;
  CHECK(argmax_labels(scores) == Labels{1});
}
