#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cospace/types.hpp"

namespace cospace {

// Malformed CSV content. Carries the 1-based line number of the offending row.
class CsvParseError : public IoError {
 public:
  CsvParseError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A feature file: header `band_1,...,band_d[,label]`, one pixel per row.
struct FeatureTable {
  Matrix samples;  // d x N
  std::optional<Labels> labels;
};

FeatureTable load_csv(const std::string& path);
void save_csv(const std::string& path, const Matrix& samples, const std::optional<Labels>& labels = std::nullopt);

// Reads the `label` column of any headed CSV (feature files, label files, prediction files).
Labels load_labels_csv(const std::string& path);
void save_labels_csv(const std::string& path, const Labels& labels);

// SRF filters: d_M rows by d_H columns, no header.
Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Matrix& m);

// `index,label` rows with a 0-based sample index.
void save_predictions_csv(const std::string& path, const Labels& predicted);

// 8-bit grayscale label map; pixels are filled row-major from the label list.
void save_label_pgm(const std::string& path, const Labels& labels, int width, int height);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace cospace
