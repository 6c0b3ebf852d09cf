#pragma once

#include "cospace/types.hpp"

namespace cospace {

// Adjacency, degree and combinatorial Laplacian over a set of samples.
struct JointGraph {
  Matrix w;
  Matrix d;  // diagonal
  Matrix lap;

  Index size() const { return w.rows(); }
};

// Supervised graph over the stacked samples: W(i, j) = 1 / N_k when i != j share
// class k, where N_k counts class-k samples in `stacked` (both modality copies).
Matrix lda_like_adjacency(const Labels& stacked);

// Gaussian-weighted kNN graph over the columns of `features`, symmetrized by the
// union rule. Diagonal is zero.
Matrix knn_gaussian_adjacency(const Matrix& features, int k, double sigma);

// Unsupervised alignment graph over the 2N stacked samples: a kNN Gaussian graph
// within each modality plus unit-weight edges between the two copies of each pair.
Matrix correspondence_knn_adjacency(const Matrix& ms, const Matrix& hs, int k, double sigma);

JointGraph laplacian(const Matrix& w);

}  // namespace cospace
