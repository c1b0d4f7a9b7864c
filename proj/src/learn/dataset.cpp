#include "trinket/learn/dataset.hpp"

#include <cmath>
#include <sstream>

#include "trinket/common/error.hpp"
#include "trinket/common/text.hpp"
#include "trinket/common/file_io.hpp"

namespace trinket::learn {

Dataset::Dataset(std::vector<std::string> feature_names) : names_(std::move(feature_names)) {}

void Dataset::add(std::span<const double> row, int label) {
  if (row.size() != width())
    throw Error(ErrorCode::FeatureWidthMismatch,
                "row has " + std::to_string(row.size()) + " values, dataset has " + std::to_string(width()));
  if (label != kFraud && label != kGenuine) throw Error(ErrorCode::FormatError, "label must be 0 or 1");
  for (double v : row)
    if (std::isnan(v)) throw Error(ErrorCode::FormatError, "NaN in feature row");
  values_.insert(values_.end(), row.begin(), row.end());
  labels_.push_back(label);
}

void Dataset::append(const Dataset& other) {
  if (other.width() != width()) throw Error(ErrorCode::FeatureWidthMismatch, "datasets differ in width");
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
  Dataset out(names_);
  out.values_.reserve(idx.size() * width());
  for (auto i : idx) {
    auto r = row(i);
    out.values_.insert(out.values_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

Dataset Dataset::head_columns(std::size_t n) const {
  if (n > width()) throw Error(ErrorCode::FeatureWidthMismatch, "cannot keep more columns than exist");
  Dataset out(std::vector<std::string>(names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(n)));
  for (std::size_t i = 0; i < rows(); ++i) out.add(row(i).first(n), labels_[i]);
  return out;
}

std::size_t Dataset::count_label(int label) const {
  std::size_t n = 0;
  for (int l : labels_) n += l == label;
  return n;
}

Dataset parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, "empty dataset file");
  auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "label")
    throw Error(ErrorCode::FormatError, "dataset header must end with a label column");
  header.pop_back();
  Dataset ds(header);
  std::vector<double> row(ds.width());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != ds.width() + 1)
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": wrong number of columns");
    for (std::size_t i = 0; i < ds.width(); ++i) row[i] = parse_double(cols[i]);
    ds.add(row, parse_int(cols.back()));
  }
  return ds;
}

Dataset read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path));
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  for (const auto& n : ds.feature_names()) out += n + ",";
  out += "label\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (double v : ds.row(i)) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(ds.label(i));
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  write_text_atomic(path, to_csv(ds));
}

}  // namespace trinket::learn
