#include "lawn/result_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lawn/errors.hpp"
#include "lawn/format.hpp"

namespace lawn {

std::size_t ResultTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractViolation("no column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

bool ResultTable::has_column(const std::string& name) const noexcept {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ContractViolation("row has " + std::to_string(row.size()) + " cells, table has " +
                            std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::vector<double> ResultTable::numeric_column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (const auto* i = std::get_if<std::int64_t>(&row[c])) out.push_back(static_cast<double>(*i));
    else if (const auto* d = std::get_if<double>(&row[c])) out.push_back(*d);
    else throw ContractViolation("column " + name + " is not numeric");
  }
  return out;
}

std::vector<std::string> ResultTable::string_column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(format_cell(row[c]));
  return out;
}

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

Cell parse_cell(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc{} && p == last && !text.empty())
    return i;
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc{} && p == last && !text.empty())
    return d;
  return text;
}

void write_csv(std::ostream& os, const ResultTable& table) {
  auto check = [](const std::string& s) {
    if (s.find_first_of(",\n\r\"") != std::string::npos)
      throw ContractViolation("CSV field contains a separator: " + s);
  };
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    check(table.columns[c]);
    os << (c ? "," : "") << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string s = format_cell(row[c]);
      check(s);
      os << (c ? "," : "") << s;
    }
    os << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ResultTable read_csv(std::istream& is) {
  ResultTable t;
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw ConfigError("CSV input has no header");
  if (line.back() == '\r') line.pop_back();
  t.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.columns.size())
      throw ConfigError("CSV line " + std::to_string(lineno) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(t.columns.size()));
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_cell(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace lawn
