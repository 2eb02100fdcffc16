#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ejb {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based line number (header is line 1) where each row starts.
  std::vector<std::size_t> row_lines;
};

/// RFC 4180 style reader: quoted fields, doubled quotes, CRLF or LF, optional
/// UTF-8 BOM. Blank lines are skipped. The first record is the header.
CsvTable parse_delimited(std::string_view text, char delimiter = ',');

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string csv_field(std::string_view value, char delimiter = ',');

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace ejb
