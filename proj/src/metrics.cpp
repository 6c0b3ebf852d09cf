#include "cospace/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cospace {

namespace {

long long total(const IntMatrix& confusion) {
  require(confusion.rows() == confusion.cols() && confusion.rows() >= 1, "confusion matrix must be square");
  require((confusion.array() >= 0).all(), "confusion counts must be nonnegative");
  long long n = 0;
  for (Index i = 0; i < confusion.size(); ++i) n += confusion.data()[i];
  require(n > 0, "confusion matrix is empty");
  return n;
}

}  // namespace

IntMatrix confusion_matrix(const Labels& truth, const Labels& predicted, int num_classes) {
  require(num_classes >= 1, "num_classes must be positive");
  require(truth.size() == predicted.size(), "truth has " + std::to_string(truth.size()) + " labels but prediction has " +
                                                std::to_string(predicted.size()));
  IntMatrix c = IntMatrix::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    require(t >= 1 && t <= num_classes && p >= 1 && p <= num_classes,
            "label out of range at index " + std::to_string(i));
    ++c(t - 1, p - 1);
  }
  return c;
}

double overall_accuracy(const IntMatrix& confusion) {
  const long long n = total(confusion);
  return static_cast<double>(confusion.trace()) / static_cast<double>(n);
}

std::vector<double> per_class_accuracy(const IntMatrix& confusion) {
  total(confusion);
  std::vector<double> out;
  for (Index k = 0; k < confusion.rows(); ++k) {
    const long long support = confusion.row(k).cast<long long>().sum();
    out.push_back(support > 0 ? static_cast<double>(confusion(k, k)) / static_cast<double>(support)
                              : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

double average_accuracy(const IntMatrix& confusion) {
  double sum = 0.0;
  int populated = 0;
  for (double v : per_class_accuracy(confusion)) {
    if (!std::isnan(v)) {
      sum += v;
      ++populated;
    }
  }
  return sum / populated;
}

double kappa(const IntMatrix& confusion) {
  const auto n = static_cast<double>(total(confusion));
  const double po = static_cast<double>(confusion.trace()) / n;
  double pe = 0.0;
  for (Index k = 0; k < confusion.rows(); ++k) {
    const auto row = static_cast<double>(confusion.row(k).cast<long long>().sum());
    const auto col = static_cast<double>(confusion.col(k).cast<long long>().sum());
    pe += (row / n) * (col / n);
  }
  if (std::abs(1.0 - pe) < 1e-15) throw ValidationError("kappa undefined: degenerate marginals (p_e = 1)");
  return (po - pe) / (1.0 - pe);
}

MetricsReport evaluate(const Labels& truth, const Labels& predicted, int num_classes) {
  MetricsReport r;
  r.confusion = confusion_matrix(truth, predicted, num_classes);
  r.oa = overall_accuracy(r.confusion);
  r.per_class = per_class_accuracy(r.confusion);
  r.aa = average_accuracy(r.confusion);
  r.kappa = kappa(r.confusion);
  return r;
}

}  // namespace cospace
