#include "bibliostat/tsv.hpp"

#include "bibliostat/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bibliostat::tsv {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    if (end == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<Row> read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    rows.push_back(Row{number, split(line)});
  }
  return rows;
}

std::string format(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    return "nan";
  }
  return std::string(buf.data(), end);
}

std::string format(std::optional<double> value) { return value ? format(*value) : std::string(); }

void Table::add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

std::string Table::str() const {
  std::ostringstream out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        out << '\t';
      }
      out << cells[i];
    }
    out << '\n';
  };
  emit(header_);
  for (const auto& row : rows_) {
    emit(row);
  }
  return out.str();
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << str();
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

Table Table::load(const std::filesystem::path& path) {
  auto rows = read(path);
  if (rows.empty()) {
    throw ValidationError(path.string() + ": missing header row");
  }
  Table table(rows.front().fields);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    table.add(std::move(rows[i].fields));
  }
  return table;
}

}  // namespace bibliostat::tsv
