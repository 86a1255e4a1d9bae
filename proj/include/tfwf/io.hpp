#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tfwf {

/// %.17g, so every double round-trips through text.
std::string format_double(double v);

/// In-memory CSV table with a header row and numeric cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Writes content to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tfwf
