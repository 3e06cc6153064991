#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vlaperf {

/// A typed table cell. Numeric cells keep their SI value; formatting into
/// display units happens only when the table is rendered.
class Cell {
 public:
  enum class Kind { na, text, seconds, hertz, bytes, count, ratio, number };

  static Cell na() { return {Kind::na, 0, {}}; }
  static Cell text(std::string s) { return {Kind::text, 0, std::move(s)}; }
  static Cell seconds(double s) { return {Kind::seconds, s, {}}; }
  static Cell hertz(double hz) { return {Kind::hertz, hz, {}}; }
  static Cell bytes(double b) { return {Kind::bytes, b, {}}; }
  static Cell count(std::int64_t n) { return {Kind::count, static_cast<double>(n), {}}; }
  static Cell ratio(double r) { return {Kind::ratio, r, {}}; }
  static Cell number(double v) { return {Kind::number, v, {}}; }

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  const std::string& label() const { return text_; }

  /// ms with 2 decimals, Hz with 1, GiB with 2 and a "GB" suffix, ratios as
  /// "1.23x", N/A as "N/A".
  std::string display() const;
  /// Value in display units (ms, Hz, GiB); SI for the rest.
  double display_value() const;

 private:
  Cell(Kind k, double v, std::string t) : kind_(k), value_(v), text_(std::move(t)) {}
  Kind kind_;
  double value_;
  std::string text_;
};

enum class OutputFormat { table, csv, json };

OutputFormat parse_output_format(std::string_view text);

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Throws std::invalid_argument on a width mismatch.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::string title;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string render(const Table& table, OutputFormat format);

/// Several tables in one output; JSON becomes an array, CSV and text are
/// separated by a blank line.
std::string render(const std::vector<Table>& tables, OutputFormat format);

}  // namespace vlaperf
