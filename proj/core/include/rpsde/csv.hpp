#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rpsde {

/// Formats a double with 17 significant digits ("%.17g"), the precision used
/// by every CSV the toolkit writes.
std::string format_real(double x);

/// Minimal CSV table: a header row and rows of already formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  /// Convenience: a row of reals formatted with `format_real`.
  void add_numeric_row(std::span<const double> values);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }

  std::string to_string() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Header row of a CSV file, split on commas.
std::vector<std::string> read_csv_header(const std::filesystem::path& file);

}  // namespace rpsde
