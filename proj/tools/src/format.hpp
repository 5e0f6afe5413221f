#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oscsing::cli {

// Shortest decimal form that reads back to the same double.
std::string format_real(double v);

// RFC-4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

struct CsvTable {
  std::vector<std::string> columns;
  // Operation behind each group of columns, e.g. {"kernel_fourier", "re,im"}.
  std::vector<std::pair<std::string, std::string>> sources;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

using HeaderBlock = std::vector<std::pair<std::string, std::string>>;

// '#'-prefixed key=value header lines, then the column row and the body,
// with CRLF line ends.
void write_csv(std::ostream& os, const HeaderBlock& header, const CsvTable& table);

}  // namespace oscsing::cli
