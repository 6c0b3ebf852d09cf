#include <doctest.h>

#include <cmath>

#include "cospace/baselines.hpp"
#include "helpers.hpp"
#include "pencil_oracle.hpp"

using namespace cospace;
using testing::random_matrix;
using testing::pencil;
using testing::pencil_roots;

namespace {

StackedSystem raw_system(Matrix xtilde, Index ms_bands) {
  StackedSystem s;
  s.ms_bands = ms_bands;
  s.hs_bands = xtilde.rows() - ms_bands;
  s.pairs = xtilde.cols() / 2;
  s.xtilde = std::move(xtilde);
  s.ytilde = Matrix::Ones(1, s.xtilde.cols());
  return s;
}

JointGraph random_graph(Index n, std::mt19937_64& rng) {
  Matrix w = random_matrix(n, n, rng).cwiseAbs();
  w = 0.5 * (w + w.transpose()).eval();
  return laplacian(w);
}

}  // namespace

TEST_CASE("fit_pjdr finds an axis-aligned principal direction") {
  std::mt19937_64 rng(1);
  Matrix x = Matrix::Zero(2, 40);
  x.row(0) = random_matrix(1, 40, rng);
  const LinearProjection p = fit_pjdr(raw_system(x, 1), 1);
  CHECK(std::abs(p.theta(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(p.theta(0, 1)) <= 1e-12);
  CHECK(p.theta(0, 0) > 0.0);
  CHECK_THROWS_AS(fit_pjdr(raw_system(x, 1), 2), ValidationError);
}

TEST_CASE("fit_pjdr on isotropic data keeps a proportional share of variance") {
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(6, 20000, rng);
  const LinearProjection p = fit_pjdr(raw_system(x, 2), 3);
  const Matrix centered = x.colwise() - x.rowwise().mean();
  const double total = centered.squaredNorm();
  const double kept = (p.theta * centered).squaredNorm();
  CHECK(std::abs(kept / total - 0.5) <= 0.1);
}

TEST_CASE("fit_pjdr decorrelates and orders eigenvalues") {
  const PairedDataset ds = testing::random_pairs(3, 50, 3, 7, 3);
  const StackedSystem sys = stack_system(ds);
  const LinearProjection p = fit_pjdr(sys, 5);
  CHECK((p.theta * p.theta.transpose() - Matrix::Identity(5, 5)).norm() <= 1e-10);
  const Matrix centered = sys.xtilde.colwise() - sys.xtilde.rowwise().mean();
  const Matrix cov = p.theta * centered * centered.transpose() * p.theta.transpose() / (sys.samples() - 1.0);
  Matrix off = cov;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() <= 1e-8);
  for (Index i = 1; i < 5; ++i) CHECK(p.eigenvalues(i) <= p.eigenvalues(i - 1));
  for (Index i = 0; i < 5; ++i) CHECK(cov(i, i) == doctest::Approx(p.eigenvalues(i)).epsilon(1e-9));
}

TEST_CASE("fit_pjdr is invariant to sample order") {
  const PairedDataset ds = testing::random_pairs(4, 30, 3, 6, 2);
  std::vector<Index> perm(30);
  for (Index i = 0; i < 30; ++i) perm[static_cast<std::size_t>(i)] = (7 * i + 3) % 30;
  const LinearProjection a = fit_pjdr(stack_system(ds), 4);
  const LinearProjection b = fit_pjdr(stack_system(ds.subset(perm)), 4);
  CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit_pjdr recovers a planted axis") {
  std::mt19937_64 rng(5);
  Vector axis = random_matrix(8, 1, rng).col(0);
  axis.normalize();
  Matrix x = 0.3 * random_matrix(8, 2000, rng);
  x += axis * (3.0 * random_matrix(1, 2000, rng));
  const LinearProjection p = fit_pjdr(raw_system(x, 3), 1);
  CHECK(std::abs(p.theta.row(0).dot(axis.transpose())) >= 0.999);
}

TEST_CASE("fit_lpp scalar quotient and identical neighbours") {
  StackedSystem one = raw_system(Matrix::Constant(1, 1, 2.0), 1);
  JointGraph g;
  g.w = Matrix::Zero(1, 1);
  g.lap = Matrix::Constant(1, 1, 0.6);
  g.d = Matrix::Constant(1, 1, 1.5);
  const LinearProjection p = fit_lpp(one, g, 1);
  CHECK(p.eigenvalues(0) == doctest::Approx(0.6 / 1.5).epsilon(1e-8));

  Matrix same(2, 2);
  same << 1.0, 1.0, 0.5, 0.5;
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  const LinearProjection q = fit_lpp(raw_system(same, 1), laplacian(w), 1);
  CHECK(std::abs(q.eigenvalues(0)) <= 1e-12);
}

TEST_CASE("fit_lpp matches a characteristic-polynomial oracle") {
  std::mt19937_64 rng(9);
  for (Index n : {2, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      const StackedSystem sys = raw_system(random_matrix(n, 8, rng), 1);
      const JointGraph g = random_graph(8, rng);
      const auto [a, b] = pencil(sys, g);
      Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
      const double hi = 2.0 * a.norm() / eb.eigenvalues().minCoeff();
      const std::vector<double> roots = pencil_roots(a, b, hi);
      REQUIRE(roots.size() == static_cast<std::size_t>(n));
      const LinearProjection p = fit_lpp(sys, g, static_cast<int>(n));
      for (Index i = 0; i < n; ++i) {
        CHECK(std::abs(p.eigenvalues(i) - roots[static_cast<std::size_t>(i)]) <= 1e-8 * std::max(1.0, roots.back()));
        const Vector v = p.theta.row(i).transpose();
        const double rq = v.dot(a * v) / v.dot(b * v);
        CHECK(std::abs(rq - p.eigenvalues(i)) <= 1e-8 * std::max(1.0, std::abs(rq)));
        // Oracle eigenvector: null direction of A - lambda B.
        Eigen::JacobiSVD<Matrix> svd(a - roots[static_cast<std::size_t>(i)] * b, Eigen::ComputeFullV);
        Vector u = svd.matrixV().col(n - 1);
        u /= std::sqrt(u.dot(b * u));
        CHECK(std::min((u - v).norm(), (u + v).norm()) <= 1e-6);
      }
    }
  }
}

TEST_CASE("fit_lpp generalized orthogonality on the LDA graph") {
  const PairedDataset ds = testing::random_pairs(6, 40, 3, 8, 3);
  const StackedSystem sys = stack_system(ds);
  const JointGraph g = laplacian(lda_like_adjacency(stacked_labels(ds.labels)));
  const LinearProjection p = fit_lpp(sys, g, 4);
  const Matrix b = pencil(sys, g).second;
  CHECK((p.theta * b * p.theta.transpose() - Matrix::Identity(4, 4)).norm() <= 1e-8);
  for (Index i = 1; i < 4; ++i) CHECK(p.eigenvalues(i) >= p.eigenvalues(i - 1));
  CHECK_THROWS_AS(fit_lpp(sys, g, 12), ValidationError);

  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(3, 5, rng);
  CHECK((embed_ms(p, 2.0 * a) - 2.0 * embed_ms(p, a)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(embed_hs(p, a), ValidationError);
}
