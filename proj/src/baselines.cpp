#include "cospace/baselines.hpp"

#include <algorithm>
#include <string>

#include "cospace/linalg.hpp"

namespace cospace {

LinearProjection fit_pjdr(const StackedSystem& sys, int dim) {
  const Index features = sys.features();
  const Index samples = sys.samples();
  require(samples >= 2, "P-JDR needs at least 2 stacked samples");
  require(dim >= 1 && dim <= features,
          "dim = " + std::to_string(dim) + " is outside [1, " + std::to_string(features) + "]");
  const Vector mean = sys.xtilde.rowwise().mean();
  const Matrix centered = sys.xtilde.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(samples - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("P-JDR eigendecomposition failed");

  const Vector& values = eig.eigenvalues();
  const double top = values(features - 1);
  Index rank = 0;
  for (Index i = 0; i < features; ++i) {
    if (values(i) > 1e-12 * std::max(top, 1e-300)) ++rank;
  }
  require(dim <= rank, "dim = " + std::to_string(dim) + " exceeds the rank " + std::to_string(rank) +
                           " of the stacked covariance");

  LinearProjection proj;
  proj.method = "pjdr";
  proj.params["dim"] = dim;
  proj.ms_bands = sys.ms_bands;
  proj.hs_bands = sys.hs_bands;
  proj.theta = eig.eigenvectors().rightCols(dim).rowwise().reverse().transpose();
  proj.eigenvalues = values.tail(dim).reverse();
  canonicalize_row_signs(proj.theta);
  return proj;
}

LinearProjection fit_lpp(const StackedSystem& sys, const JointGraph& graph, int dim) {
  const Index features = sys.features();
  require(graph.size() == sys.samples(), "graph does not match the stacked system");
  require(dim >= 1 && dim <= features,
          "dim = " + std::to_string(dim) + " exceeds the " + std::to_string(features) + " available eigenpairs");
  Matrix a = sys.xtilde * graph.lap * sys.xtilde.transpose();
  Matrix b = sys.xtilde * graph.d * sys.xtilde.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  // Ridge floor keeps the pencil definite when some samples have zero degree.
  const double scale = b.trace() / static_cast<double>(features);
  b.diagonal().array() += 1e-9 * (scale > 0.0 ? scale : 1.0);

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (eig.info() != Eigen::Success) throw NumericalError("LPP generalized eigendecomposition failed");

  LinearProjection proj;
  proj.method = "lpp";
  proj.params["dim"] = dim;
  proj.ms_bands = sys.ms_bands;
  proj.hs_bands = sys.hs_bands;
  proj.theta = eig.eigenvectors().leftCols(dim).transpose();
  proj.eigenvalues = eig.eigenvalues().head(dim);
  canonicalize_row_signs(proj.theta);
  return proj;
}

Matrix embed_ms(const LinearProjection& proj, const Matrix& x) {
  require(x.rows() == proj.ms_bands, "MS input has " + std::to_string(x.rows()) + " bands, projection expects " +
                                         std::to_string(proj.ms_bands));
  return proj.theta_ms() * x;
}

Matrix embed_hs(const LinearProjection& proj, const Matrix& x) {
  require(x.rows() == proj.hs_bands, "HS input has " + std::to_string(x.rows()) + " bands, projection expects " +
                                         std::to_string(proj.hs_bands));
  return proj.theta_hs() * x;
}

}  // namespace cospace
