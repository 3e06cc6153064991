#include "vlaperf/report.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace vlaperf {

namespace {
constexpr double kGiBytes = 1024.0 * 1024.0 * 1024.0;
}

std::string Cell::display() const {
  switch (kind_) {
    case Kind::na:
      return "N/A";
    case Kind::text:
      return text_;
    case Kind::seconds:
      return fmt::format("{:.2f} ms", value_ * 1e3);
    case Kind::hertz:
      return fmt::format("{:.1f} Hz", value_);
    case Kind::bytes:
      return fmt::format("{:.2f} GB", value_ / kGiBytes);
    case Kind::count:
      return fmt::format("{}", static_cast<std::int64_t>(value_));
    case Kind::ratio:
      return fmt::format("{:.2f}x", value_);
    case Kind::number:
      return fmt::format("{:.1f}", value_);
  }
  return {};
}

double Cell::display_value() const {
  switch (kind_) {
    case Kind::seconds:
      return value_ * 1e3;
    case Kind::bytes:
      return value_ / kGiBytes;
    default:
      return value_;
  }
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "table") return OutputFormat::table;
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument(fmt::format("unknown output format '{}'", text));
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument(
        fmt::format("row has {} cells, table has {} columns", row.size(), columns_.size()));
  rows_.push_back(std::move(row));
}

namespace {

std::string render_text(const Table& t) {
  std::vector<std::size_t> width(t.columns().size());
  for (std::size_t c = 0; c < width.size(); ++c) {
    width[c] = t.columns()[c].size();
    for (const auto& row : t.rows()) width[c] = std::max(width[c], row[c].display().size());
  }
  std::string out;
  if (!t.title.empty()) out += t.title + "\n";
  auto line = [&](auto&& cell_text) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string s = cell_text(c);
      // First column (usually a label) left-aligned, numbers right-aligned.
      out += c == 0 ? fmt::format("{:<{}}", s, width[c]) : fmt::format("  {:>{}}", s, width[c]);
    }
    out += '\n';
  };
  line([&](std::size_t c) { return t.columns()[c]; });
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out += std::string(total - 2, '-') + "\n";
  for (const auto& row : t.rows()) line([&](std::size_t c) { return row[c].display(); });
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// CSV keeps numbers machine-readable: display units, no suffix.
std::string csv_value(const Cell& cell) {
  switch (cell.kind()) {
    case Cell::Kind::na:
      return "NA";
    case Cell::Kind::text:
      return csv_escape(cell.label());
    case Cell::Kind::count:
      return fmt::format("{}", static_cast<std::int64_t>(cell.value()));
    default:
      return fmt::format("{:.6g}", cell.display_value());
  }
}

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns().size(); ++c)
    out += (c ? "," : "") + csv_escape(t.columns()[c]);
  out += '\n';
  for (const auto& row : t.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_value(row[c]);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows()) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      switch (cell.kind()) {
        case Cell::Kind::na:
          obj[t.columns()[c]] = nullptr;
          break;
        case Cell::Kind::text:
          obj[t.columns()[c]] = cell.label();
          break;
        case Cell::Kind::count:
          obj[t.columns()[c]] = static_cast<std::int64_t>(cell.value());
          break;
        default:
          obj[t.columns()[c]] = cell.display_value();
      }
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json out;
  if (!t.title.empty()) out["title"] = t.title;
  out["columns"] = t.columns();
  out["rows"] = std::move(rows);
  return out;
}

}  // namespace

std::string render(const Table& table, OutputFormat format) {
  switch (format) {
    case OutputFormat::table:
      return render_text(table);
    case OutputFormat::csv:
      return render_csv(table);
    case OutputFormat::json:
      return to_json(table).dump(2) + "\n";
  }
  return {};
}

std::string render(const std::vector<Table>& tables, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : tables) arr.push_back(to_json(t));
    return arr.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += '\n';
    out += render(tables[i], format);
  }
  return out;
}

}  // namespace vlaperf
