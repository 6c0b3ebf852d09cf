#include "cospace/classify.hpp"

#include <limits>
#include <string>

#include "cospace/linalg.hpp"

namespace cospace {

void ReferenceSet::validate() const {
  require(embeddings.cols() >= 1, "reference set is empty");
  require(static_cast<Index>(labels.size()) == embeddings.cols(), "reference labels do not match embeddings");
  require(all_finite(embeddings), "reference embeddings contain non-finite values");
  for (int k : labels) require(k >= 1, "reference labels must be positive class ids");
}

Labels knn1_predict(const ReferenceSet& ref, const Matrix& queries) {
  ref.validate();
  require(queries.rows() == ref.embeddings.rows(), "query dimension " + std::to_string(queries.rows()) +
                                                       " does not match reference dimension " +
                                                       std::to_string(ref.embeddings.rows()));
  Labels out(static_cast<std::size_t>(queries.cols()));
  for (Index q = 0; q < queries.cols(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    Index best_idx = 0;
    for (Index r = 0; r < ref.embeddings.cols(); ++r) {
      const double dist = (ref.embeddings.col(r) - queries.col(q)).squaredNorm();
      if (dist < best) {
        best = dist;
        best_idx = r;
      }
    }
    out[static_cast<std::size_t>(q)] = ref.labels[static_cast<std::size_t>(best_idx)];
  }
  return out;
}

Matrix fit_linear(const Matrix& embeddings, const Matrix& onehot, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
  require(embeddings.cols() == onehot.cols() && embeddings.cols() >= 1, "embeddings and targets disagree on N");
  if (!embeddings.allFinite() || !onehot.allFinite()) throw NumericalError("linear classifier: non-finite input");
  const Index d = embeddings.rows();
  const auto n = static_cast<double>(embeddings.cols());
  Matrix z(d + 1, embeddings.cols());
  z << embeddings, Matrix::Ones(1, embeddings.cols());
  Matrix gram = z * z.transpose() / n;
  gram.diagonal().head(d).array() += lambda;
  const Matrix rhs = z * onehot.transpose() / n;
  return spd_solve(gram, rhs, "linear classifier").transpose();
}

Labels argmax_labels(const Matrix& scores) {
  Labels out(static_cast<std::size_t>(scores.cols()));
  for (Index i = 0; i < scores.cols(); ++i) {
    Index best = 0;
    for (Index k = 1; k < scores.rows(); ++k) {
      if (scores(k, i) > scores(best, i)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return out;
}

Labels linear_predict(const Matrix& weights, const Matrix& queries) {
  require(weights.cols() == queries.rows() + 1, "weights expect " + std::to_string(weights.cols() - 1) +
                                                    "-dimensional queries, got " + std::to_string(queries.rows()));
  return argmax_labels(weights.leftCols(queries.rows()) * queries + weights.col(queries.rows()).replicate(1, queries.cols()));
}

Labels predict_via_p(const CoSpaceModel& model, const Matrix& ms_queries) {
  require(model.p.size() > 0, "model has no classifier weights");
  return argmax_labels(model.p * embed_ms(model, ms_queries));
}

}  // namespace cospace
