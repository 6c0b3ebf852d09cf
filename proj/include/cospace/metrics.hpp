#pragma once

#include <vector>

#include "cospace/types.hpp"

namespace cospace {

struct MetricsReport {
  IntMatrix confusion;  // rows: true class, columns: predicted class
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  // Recall per class; NaN for classes with no true samples (excluded from aa).
  std::vector<double> per_class;
};

IntMatrix confusion_matrix(const Labels& truth, const Labels& predicted, int num_classes);

double overall_accuracy(const IntMatrix& confusion);
double average_accuracy(const IntMatrix& confusion);
std::vector<double> per_class_accuracy(const IntMatrix& confusion);

// Cohen's kappa: (p_o - p_e) / (1 - p_e). Throws ValidationError when p_e = 1.
double kappa(const IntMatrix& confusion);

MetricsReport evaluate(const Labels& truth, const Labels& predicted, int num_classes);

}  // namespace cospace
