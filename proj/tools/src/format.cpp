#include "format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace oscsing::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("csv row width does not match the columns");
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const HeaderBlock& header, const CsvTable& table) {
  for (const auto& [k, v] : header) os << "# " << k << '=' << v << "\r\n";
  for (const auto& [op, cols] : table.sources) os << "# source." << op << '=' << cols << "\r\n";
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_field(cells[i]);
    }
    os << "\r\n";
  };
  line(table.columns);
  for (const auto& r : table.rows) line(r);
}

}  // namespace oscsing::cli
