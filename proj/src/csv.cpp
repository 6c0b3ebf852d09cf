#include "cospace/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

namespace cospace {

CsvParseError::CsvParseError(const std::string& path, std::size_t line, const std::string& what)
    : IoError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

RawCsv read_raw(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_seen = !has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (is_blank(line)) continue;
    const auto cells = split(line);
    if (!header_seen) {
      for (const auto& c : cells) {
        double ignored = 0.0;
        if (parse_double(c, ignored)) throw CsvParseError(path, line_no, "missing header row");
        raw.header.emplace_back(c);
      }
      width = cells.size();
      header_seen = true;
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw CsvParseError(path, line_no,
                          "expected " + std::to_string(width) + " values, found " + std::to_string(cells.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], values[j])) {
        throw CsvParseError(path, line_no, "non-numeric cell '" + std::string(cells[j]) + "'");
      }
    }
    raw.rows.push_back(std::move(values));
    raw.row_lines.push_back(line_no);
  }
  if (!header_seen) throw CsvParseError(path, 1, "missing header row");
  return raw;
}

int to_label(const std::string& path, std::size_t line, double v) {
  if (!(v == std::floor(v)) || v < 0 || v > 1e9) {
    throw CsvParseError(path, line, "label '" + format_double(v) + "' is not a nonnegative integer");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path() && !std::filesystem::exists(target.parent_path())) {
    throw IoError("directory does not exist: " + target.parent_path().string());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FeatureTable load_csv(const std::string& path) {
  const RawCsv raw = read_raw(path, true);
  std::size_t bands = 0;
  bool has_label = false;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    const std::string& name = raw.header[j];
    if (name == "label" && j + 1 == raw.header.size()) {
      has_label = true;
    } else if (name == "band_" + std::to_string(j + 1)) {
      ++bands;
    } else {
      throw CsvParseError(path, 1, "unexpected column '" + name + "' (want band_" + std::to_string(j + 1) + ")");
    }
  }
  if (bands == 0) throw CsvParseError(path, 1, "header has no band columns");
  FeatureTable table;
  table.samples.resize(static_cast<Index>(bands), static_cast<Index>(raw.rows.size()));
  if (has_label) table.labels.emplace();
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& row = raw.rows[i];
    for (std::size_t b = 0; b < bands; ++b) table.samples(static_cast<Index>(b), static_cast<Index>(i)) = row[b];
    if (has_label) table.labels->push_back(to_label(path, raw.row_lines[i], row[bands]));
  }
  return table;
}

void save_csv(const std::string& path, const Matrix& samples, const std::optional<Labels>& labels) {
  require(!labels || static_cast<Index>(labels->size()) == samples.cols(), "label count does not match pixel count");
  std::string out;
  for (Index b = 0; b < samples.rows(); ++b) {
    if (b > 0) out += ',';
    out += "band_" + std::to_string(b + 1);
  }
  if (labels) out += ",label";
  out += '\n';
  for (Index i = 0; i < samples.cols(); ++i) {
    for (Index b = 0; b < samples.rows(); ++b) {
      if (b > 0) out += ',';
      out += format_double(samples(b, i));
    }
    if (labels) out += ',' + std::to_string((*labels)[static_cast<std::size_t>(i)]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

Labels load_labels_csv(const std::string& path) {
  const RawCsv raw = read_raw(path, true);
  const auto it = std::find(raw.header.begin(), raw.header.end(), "label");
  if (it == raw.header.end()) throw CsvParseError(path, 1, "no 'label' column");
  const auto col = static_cast<std::size_t>(it - raw.header.begin());
  Labels labels;
  labels.reserve(raw.rows.size());
  for (std::size_t i = 0; i < raw.rows.size(); ++i) labels.push_back(to_label(path, raw.row_lines[i], raw.rows[i][col]));
  return labels;
}

void save_labels_csv(const std::string& path, const Labels& labels) {
  std::string out = "label\n";
  for (int k : labels) out += std::to_string(k) + '\n';
  write_file_atomic(path, out);
}

Matrix load_matrix_csv(const std::string& path) {
  const RawCsv raw = read_raw(path, false);
  if (raw.rows.empty()) throw CsvParseError(path, 1, "empty matrix file");
  Matrix m(static_cast<Index>(raw.rows.size()), static_cast<Index>(raw.rows.front().size()));
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    for (std::size_t j = 0; j < raw.rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = raw.rows[i][j];
  }
  return m;
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void save_predictions_csv(const std::string& path, const Labels& predicted) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < predicted.size(); ++i) out += std::to_string(i) + ',' + std::to_string(predicted[i]) + '\n';
  write_file_atomic(path, out);
}

void save_label_pgm(const std::string& path, const Labels& labels, int width, int height) {
  require(width > 0 && height > 0, "PGM width and height must be positive");
  require(static_cast<long long>(width) * height == static_cast<long long>(labels.size()),
          "PGM size " + std::to_string(width) + "x" + std::to_string(height) + " does not match " +
              std::to_string(labels.size()) + " labels");
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (int k : labels) {
    require(k >= 0 && k <= 255, "label " + std::to_string(k) + " does not fit in an 8-bit PGM");
    out += static_cast<char>(static_cast<unsigned char>(k));
  }
  write_file_atomic(path, out);
}

}  // namespace cospace
