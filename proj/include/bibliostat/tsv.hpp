#pragma once

// Tab-separated tables: the input format for small mapping files and the
// output format for every analytics table.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bibliostat::tsv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a TSV file, skipping blank lines and lines starting with '#'.
/// Trailing '\r' is removed. Throws ValidationError if the file cannot be read.
std::vector<Row> read(const std::filesystem::path& path);

std::vector<std::string> split(const std::string& line, char sep = '\t');

/// Shortest round-trip decimal representation.
std::string format(double value);
std::string format(std::optional<double> value);

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& data() const { return rows_; }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

  /// Parses a file written by write(): first non-comment row is the header.
  static Table load(const std::filesystem::path& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace bibliostat::tsv
