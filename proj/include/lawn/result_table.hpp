#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace lawn {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Rows of named cells with a fixed column list.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws ContractViolation for an unknown column.
  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const noexcept;
  /// Throws ContractViolation on a width mismatch.
  void add_row(std::vector<Cell> row);
  /// Integers widened to double; throws ContractViolation on a string cell.
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> string_column(const std::string& name) const;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

std::string format_cell(const Cell& cell);
/// Integer, then double (including nan/inf/-inf), else string.
Cell parse_cell(const std::string& text);

/// Header line plus one line per row; doubles in shortest round-trip form.
void write_csv(std::ostream& os, const ResultTable& table);
/// Inverse of write_csv. Throws ConfigError on ragged or empty input.
ResultTable read_csv(std::istream& is);

}  // namespace lawn
