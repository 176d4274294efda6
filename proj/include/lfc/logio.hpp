#pragma once
// Reading finished run artifacts back: the log CSV as a numeric table and
// the summary key/value lines. Used by the report and plot subcommands.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lfc {

/// A run log or timing CSV could not be parsed.
struct LogReadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Column-labelled numeric table, row-major.
struct LogTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int rows_count() const { return static_cast<int>(rows.size()); }
  /// Index of a column, or -1.
  int column(std::string_view name) const;
  /// Index of a column; throws LogReadError naming the column.
  int require_column(std::string_view name) const;
  /// One full column as a vector.
  std::vector<double> values(int col) const;
};

/// Parses a CSV with one header line and numeric cells. Throws LogReadError
/// on missing file, ragged rows or non-numeric cells.
LogTable read_log_table(const std::string& path);

/// Value after "key: " on its own line in a run summary, parsed as a
/// number. nullopt when the key is absent or not numeric.
std::optional<double> summary_value(const std::string& text, std::string_view key);

}  // namespace lfc
