#pragma once

#include <map>
#include <string>

#include "cospace/data.hpp"
#include "cospace/graph.hpp"

namespace cospace {

// A [Theta_M, Theta_H] projection produced by one of the comparison methods.
struct LinearProjection {
  Matrix theta;  // d x (d_M + d_H)
  Index ms_bands = 0;
  Index hs_bands = 0;
  std::string method;
  std::map<std::string, double> params;
  Vector eigenvalues;  // one per row of theta

  auto theta_ms() const { return theta.leftCols(ms_bands); }
  auto theta_hs() const { return theta.rightCols(hs_bands); }
};

// Joint PCA on the block-diagonal stacked data (P-JDR). Rows are the leading
// eigenvectors of the covariance of the centered columns of X~, descending.
LinearProjection fit_pjdr(const StackedSystem& sys, int dim);

// Locality preserving projection on X~ with the given graph. Rows solve
// X~ L X~^T v = lambda X~ D X~^T v for the `dim` smallest lambda and satisfy
// Theta X~ D X~^T Theta^T = I. With a correspondence kNN graph this is L-USMA,
// with the LDA-like graph it is L-SMA.
LinearProjection fit_lpp(const StackedSystem& sys, const JointGraph& graph, int dim);

Matrix embed_ms(const LinearProjection& proj, const Matrix& x);
Matrix embed_hs(const LinearProjection& proj, const Matrix& x);

}  // namespace cospace
