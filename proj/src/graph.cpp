#include "cospace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace cospace {

Matrix lda_like_adjacency(const Labels& stacked) {
  require(!stacked.empty(), "cannot build a graph over zero samples");
  std::map<int, Index> counts;
  for (int k : stacked) ++counts[k];
  const auto n = static_cast<Index>(stacked.size());
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const int ki = stacked[static_cast<std::size_t>(i)];
    const double weight = 1.0 / static_cast<double>(counts[ki]);
    for (Index j = 0; j < n; ++j) {
      if (j != i && stacked[static_cast<std::size_t>(j)] == ki) w(i, j) = weight;
    }
  }
  return w;
}

Matrix knn_gaussian_adjacency(const Matrix& features, int k, double sigma) {
  const Index n = features.cols();
  require(k >= 1, "k must be at least 1");
  require(k < n, "k = " + std::to_string(k) + " must be smaller than the sample count " + std::to_string(n));
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
  require(all_finite(features), "features contain non-finite values");

  Matrix dist2(n, n);
  for (Index i = 0; i < n; ++i) {
    dist2(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double v = (features.col(i) - features.col(j)).squaredNorm();
      dist2(i, j) = v;
      dist2(j, i) = v;
    }
  }
  Matrix w = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::erase(order, i);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      const double da = dist2(i, a);
      const double db = dist2(i, b);
      return da < db || (da == db && a < b);
    });
    for (int r = 0; r < k; ++r) {
      const Index j = order[static_cast<std::size_t>(r)];
      const double weight = std::exp(-dist2(i, j) / (2.0 * sigma * sigma));
      w(i, j) = std::max(w(i, j), weight);
      w(j, i) = std::max(w(j, i), weight);
    }
  }
  return w;
}

Matrix correspondence_knn_adjacency(const Matrix& ms, const Matrix& hs, int k, double sigma) {
  require(ms.cols() == hs.cols(), "MS and HS blocks disagree on sample count");
  const Index n = ms.cols();
  Matrix w = Matrix::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = knn_gaussian_adjacency(ms, k, sigma);
  w.bottomRightCorner(n, n) = knn_gaussian_adjacency(hs, k, sigma);
  for (Index i = 0; i < n; ++i) {
    w(i, n + i) = 1.0;
    w(n + i, i) = 1.0;
  }
  return w;
}

JointGraph laplacian(const Matrix& w) {
  require(w.rows() == w.cols(), "adjacency must be square");
  require(all_finite(w), "adjacency contains non-finite values");
  require((w.array() >= 0.0).all(), "adjacency weights must be nonnegative");
  const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
  require(w.size() == 0 || asym <= 1e-12, "adjacency is not symmetric (max deviation " + std::to_string(asym) + ")");
  JointGraph g;
  g.w = w;
  g.w.diagonal().setZero();
  const Vector degree = g.w.rowwise().sum();
  g.d = degree.asDiagonal();
  g.lap = g.d - g.w;
  return g;
}

}  // namespace cospace
