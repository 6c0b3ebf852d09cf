#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>

#include "cospace/data.hpp"

namespace testing {

using cospace::Index;
using cospace::Labels;
using cospace::Matrix;

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  return Matrix::NullaryExpr(rows, cols, [&] { return nd(rng); });
}

// Class means plus Gaussian noise, MS through a random row-stochastic filter.
inline cospace::PairedDataset random_pairs(std::uint64_t seed, Index n, Index dm, Index dh, int classes,
                                           double noise = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const Matrix means = random_matrix(dh, classes, rng);
  Matrix hs(dh, n);
  Labels labels;
  for (Index i = 0; i < n; ++i) {
    const int k = static_cast<int>(i % classes);
    labels.push_back(k + 1);
    for (Index b = 0; b < dh; ++b) hs(b, i) = means(b, k) + noise * nd(rng);
  }
  Matrix s = random_matrix(dm, dh, rng).cwiseAbs();
  for (Index r = 0; r < dm; ++r) s.row(r) /= s.row(r).sum();
  Matrix ms = s * hs;
  return cospace::make_paired_dataset(std::move(ms), std::move(hs), std::move(labels), classes);
}

// Central differences of a scalar function of a matrix.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix xp = x;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      const double orig = xp(i, j);
      xp(i, j) = orig + h;
      const double fp = f(xp);
      xp(i, j) = orig - h;
      const double fm = f(xp);
      xp(i, j) = orig;
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

inline double relative_gap(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({1.0, a.norm(), b.norm()});
}

}  // namespace testing
