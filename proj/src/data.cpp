#include "cospace/data.hpp"

#include <cmath>
#include <string>

namespace cospace {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace

void SpectralCube::validate() const {
  require(samples.rows() >= 1 && samples.cols() >= 1, "spectral cube must have at least one band and one pixel");
  require(static_cast<Index>(band_centers.size()) == samples.rows(),
          "band_centers length " + std::to_string(band_centers.size()) + " does not match band count " +
              std::to_string(samples.rows()));
  require(strictly_increasing(band_centers), "band_centers must be strictly increasing");
  require(all_finite(samples), "spectral cube contains non-finite values");
}

void SrfBank::validate() const {
  require(filters.rows() >= 1 && filters.cols() >= 1, "SRF bank must be non-empty");
  require(all_finite(filters), "SRF bank contains non-finite values");
  require((filters.array() >= 0.0).all(), "SRF weights must be nonnegative");
  for (Index i = 0; i < filters.rows(); ++i) {
    const double s = filters.row(i).sum();
    require(std::abs(s - 1.0) <= 1e-9, "SRF row " + std::to_string(i) + " sums to " + std::to_string(s) + ", not 1");
  }
}

void PairedDataset::validate() const {
  const Index n = ms.cols();
  require(n >= 1, "dataset has no samples");
  require(ms.rows() >= 1 && hs.rows() >= 1, "dataset needs at least one MS and one HS band");
  require(hs.cols() == n, "MS and HS blocks disagree on sample count (" + std::to_string(n) + " vs " +
                              std::to_string(hs.cols()) + ")");
  require(static_cast<Index>(labels.size()) == n, "label count does not match sample count");
  require(num_classes >= 1, "num_classes must be positive");
  require(onehot.rows() == num_classes && onehot.cols() == n, "one-hot matrix has the wrong shape");
  require(all_finite(ms) && all_finite(hs), "dataset contains non-finite values");
  std::vector<int> seen(static_cast<std::size_t>(num_classes), 0);
  for (Index i = 0; i < n; ++i) {
    const int k = labels[static_cast<std::size_t>(i)];
    require(k >= 1 && k <= num_classes, "label at index " + std::to_string(i) + " out of range");
    ++seen[static_cast<std::size_t>(k - 1)];
    for (int r = 0; r < num_classes; ++r) {
      const double expected = (r == k - 1) ? 1.0 : 0.0;
      require(onehot(r, i) == expected, "one-hot column " + std::to_string(i) + " disagrees with its label");
    }
  }
  for (int k = 0; k < num_classes; ++k) {
    require(seen[static_cast<std::size_t>(k)] > 0, "class " + std::to_string(k + 1) + " has no samples");
  }
}

PairedDataset PairedDataset::subset(const std::vector<Index>& indices) const {
  PairedDataset out;
  const Index m = static_cast<Index>(indices.size());
  out.ms.resize(ms.rows(), m);
  out.hs.resize(hs.rows(), m);
  out.labels.resize(indices.size());
  for (Index j = 0; j < m; ++j) {
    const Index src = indices[static_cast<std::size_t>(j)];
    require(src >= 0 && src < size(), "subset index out of range");
    out.ms.col(j) = ms.col(src);
    out.hs.col(j) = hs.col(src);
    out.labels[static_cast<std::size_t>(j)] = labels[static_cast<std::size_t>(src)];
  }
  out.num_classes = num_classes;
  out.onehot = onehot_encode(out.labels, num_classes);
  return out;
}

Matrix onehot_encode(const Labels& labels, int num_classes) {
  require(num_classes >= 1, "num_classes must be positive");
  Matrix y = Matrix::Zero(num_classes, static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int k = labels[i];
    if (k < 1 || k > num_classes) {
      throw ValidationError("label " + std::to_string(k) + " at index " + std::to_string(i) +
                            " is outside [1, " + std::to_string(num_classes) + "]");
    }
    y(k - 1, static_cast<Index>(i)) = 1.0;
  }
  return y;
}

Labels onehot_decode(const Matrix& onehot) {
  Labels out(static_cast<std::size_t>(onehot.cols()));
  for (Index i = 0; i < onehot.cols(); ++i) {
    Index best = 0;
    onehot.col(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
  }
  return out;
}

PairedDataset make_paired_dataset(Matrix ms, Matrix hs, Labels labels, int num_classes) {
  PairedDataset ds;
  ds.onehot = onehot_encode(labels, num_classes);
  ds.ms = std::move(ms);
  ds.hs = std::move(hs);
  ds.labels = std::move(labels);
  ds.num_classes = num_classes;
  ds.validate();
  return ds;
}

SpectralCube simulate_ms(const SpectralCube& hs, const SrfBank& srf) {
  hs.validate();
  srf.validate();
  if (srf.hs_bands() != hs.bands()) {
    throw ValidationError("SRF expects " + std::to_string(srf.hs_bands()) + " HS bands but cube has " +
                          std::to_string(hs.bands()));
  }
  SpectralCube ms;
  ms.samples = srf.filters * hs.samples;
  const Eigen::Map<const Vector> centers(hs.band_centers.data(), hs.bands());
  const Vector weighted = srf.filters * centers;
  ms.band_centers.assign(weighted.data(), weighted.data() + weighted.size());
  return ms;
}

SrfBank build_gaussian_srf(const std::vector<double>& ms_centers, const std::vector<double>& hs_centers,
                           double fwhm) {
  require(fwhm > 0.0 && std::isfinite(fwhm), "fwhm must be positive");
  require(!ms_centers.empty() && !hs_centers.empty(), "band center lists must be non-empty");
  require(strictly_increasing(ms_centers) && strictly_increasing(hs_centers), "band centers must be increasing");
  const double sigma = fwhm / 2.3548;
  SrfBank srf;
  srf.filters.resize(static_cast<Index>(ms_centers.size()), static_cast<Index>(hs_centers.size()));
  for (std::size_t i = 0; i < ms_centers.size(); ++i) {
    // Log-domain weights, shifted by the row maximum so far-away bands underflow
    // to zero without wiping out the whole row.
    Vector logw(static_cast<Index>(hs_centers.size()));
    for (std::size_t j = 0; j < hs_centers.size(); ++j) {
      const double delta = hs_centers[j] - ms_centers[i];
      logw(static_cast<Index>(j)) = -delta * delta / (2.0 * sigma * sigma);
    }
    const Vector w = (logw.array() - logw.maxCoeff()).exp();
    srf.filters.row(static_cast<Index>(i)) = (w / w.sum()).transpose();
  }
  return srf;
}

StackedSystem stack_system(const PairedDataset& ds) {
  ds.validate();
  const Index n = ds.size();
  const Index dm = ds.ms_bands();
  const Index dh = ds.hs_bands();
  StackedSystem sys;
  sys.ms_bands = dm;
  sys.hs_bands = dh;
  sys.pairs = n;
  sys.xtilde = Matrix::Zero(dm + dh, 2 * n);
  sys.xtilde.topLeftCorner(dm, n) = ds.ms;
  sys.xtilde.bottomRightCorner(dh, n) = ds.hs;
  sys.ytilde.resize(ds.num_classes, 2 * n);
  sys.ytilde << ds.onehot, ds.onehot;
  return sys;
}

Labels stacked_labels(const Labels& labels) {
  Labels out;
  out.reserve(labels.size() * 2);
  out.insert(out.end(), labels.begin(), labels.end());
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

}  // namespace cospace
