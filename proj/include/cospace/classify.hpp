#pragma once

#include "cospace/solver.hpp"

namespace cospace {

// Labeled points in the learned subspace, one column per reference.
struct ReferenceSet {
  Matrix embeddings;  // d x R
  Labels labels;      // length R

  void validate() const;
};

// Label of the nearest reference (Euclidean); ties go to the lowest reference index.
Labels knn1_predict(const ReferenceSet& ref, const Matrix& queries);

// Ridge regression of one-hot targets on [embeddings; 1]:
//   min_W (1/N) ||Y - W [E; 1]||_F^2 + lambda ||W_weights||_F^2
// with the bias column unpenalized. Returns L x (d + 1), bias last.
Matrix fit_linear(const Matrix& embeddings, const Matrix& onehot, double lambda);

// argmax_k of (weights * [query; 1]); ties go to the lowest class id.
Labels linear_predict(const Matrix& weights, const Matrix& queries);

// argmax_k of (P Theta_M x); ties go to the lowest class id.
Labels predict_via_p(const CoSpaceModel& model, const Matrix& ms_queries);

// Column-wise argmax of a score matrix as 1-based class ids.
Labels argmax_labels(const Matrix& scores);

}  // namespace cospace
