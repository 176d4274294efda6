#include "lfc/logio.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lfc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, int line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw LogReadError("log: non-numeric cell '" + cell + "' (line " + std::to_string(line_no) +
                       ")");
  }
  return v;
}

}  // namespace

int LogTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int LogTable::require_column(std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw LogReadError("log: missing column '" + std::string(name) + "'");
  return c;
}

std::vector<double> LogTable::values(int col) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(col)]);
  return out;
}

LogTable read_log_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LogReadError("log: cannot open '" + path + "'");
  LogTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      table.columns = split_line(line);
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      throw LogReadError("log: expected " + std::to_string(table.columns.size()) +
                         " cells, got " + std::to_string(cells.size()) + " (line " +
                         std::to_string(line_no) + ")");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_cell(c, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw LogReadError("log: '" + path + "' has no header");
  return table;
}

std::optional<double> summary_value(const std::string& text, std::string_view key) {
  const std::string needle = std::string(key) + ": ";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(needle, 0) != 0) continue;
    const std::string cell = line.substr(needle.size());
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    return v;
  }
  return std::nullopt;
}

}  // namespace lfc
