#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trinket::learn {

inline constexpr int kFraud = 0;
inline constexpr int kGenuine = 1;

/// Feature rows stored flat, row-major, with one label per row.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> feature_names);

  std::size_t width() const noexcept { return names_.size(); }
  std::size_t rows() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * width(), width()}; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Throws FeatureWidthMismatch on a wrong width, FormatError on NaN or a
  /// label outside {0, 1}.
  void add(std::span<const double> row, int label);
  void append(const Dataset& other);
  Dataset select_rows(std::span<const std::size_t> idx) const;
  /// Keeps the first n columns.
  Dataset head_columns(std::size_t n) const;
  std::size_t count_label(int label) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

/// Header row of feature names followed by a final "label" column.
Dataset parse_csv(std::string_view text);
Dataset read_csv(const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace trinket::learn
