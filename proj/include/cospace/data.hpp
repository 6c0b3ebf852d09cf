#pragma once

#include <vector>

#include "cospace/types.hpp"

namespace cospace {

// A set of pixels observed by one sensor. samples is bands x pixels.
struct SpectralCube {
  Matrix samples;
  std::vector<double> band_centers;  // nm, strictly increasing, one per row

  Index bands() const { return samples.rows(); }
  Index pixels() const { return samples.cols(); }
  void validate() const;
};

// Band filters mapping a fine spectrum onto broad bands: d_M x d_H, rows sum to 1.
struct SrfBank {
  Matrix filters;

  Index ms_bands() const { return filters.rows(); }
  Index hs_bands() const { return filters.cols(); }
  void validate() const;
};

// N aligned MS/HS correspondences with their class labels.
struct PairedDataset {
  Matrix ms;       // d_M x N
  Matrix hs;       // d_H x N
  Labels labels;   // length N, values in [1, num_classes]
  Matrix onehot;   // num_classes x N
  int num_classes = 0;

  Index size() const { return ms.cols(); }
  Index ms_bands() const { return ms.rows(); }
  Index hs_bands() const { return hs.rows(); }

  // Checks every invariant, including that each class id occurs at least once.
  void validate() const;

  // Columns `indices` of this dataset, keeping num_classes.
  PairedDataset subset(const std::vector<Index>& indices) const;
};

// Block-diagonal system [X_M 0; 0 X_H] with targets [Y, Y] over the 2N stacked samples.
struct StackedSystem {
  Matrix xtilde;  // (d_M + d_H) x 2N
  Matrix ytilde;  // L x 2N
  Index ms_bands = 0;
  Index hs_bands = 0;
  Index pairs = 0;

  Index features() const { return xtilde.rows(); }
  Index samples() const { return xtilde.cols(); }
};

// MS pixels without HS counterparts, kept for evaluation only.
struct LabeledSamples {
  Matrix features;
  Labels labels;
};

Matrix onehot_encode(const Labels& labels, int num_classes);

// Row-wise argmax of each column, returned as 1-based ids. Ties go to the lowest id.
Labels onehot_decode(const Matrix& onehot);

PairedDataset make_paired_dataset(Matrix ms, Matrix hs, Labels labels, int num_classes);

SpectralCube simulate_ms(const SpectralCube& hs, const SrfBank& srf);

SrfBank build_gaussian_srf(const std::vector<double>& ms_centers,
                           const std::vector<double>& hs_centers, double fwhm);

StackedSystem stack_system(const PairedDataset& ds);

// Training labels repeated twice: MS copy then HS copy.
Labels stacked_labels(const Labels& labels);

}  // namespace cospace
