#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cospace {

// Features are stored column-per-sample: a d x N matrix holds N pixels with d bands.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;
using Index = Eigen::Index;

// 1-based class ids; 0 is reserved for "unlabeled".
using Labels = std::vector<int>;

// Bad input: shapes, ranges, malformed documents. CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, non-finite values, rank deficiency. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing files, unreadable or unwritable paths, CSV syntax. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace cospace
