#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ordmix {

/// Parsed CSV: a mandatory header row and rows of equal width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // 1-based source line on which each row starts

  /// Column index of `name`; MissingColumn error when absent.
  int column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Strict RFC 4180 reader: comma separator, double-quote quoting with ""
/// escapes, CRLF or LF line ends, every row as wide as the header.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// printf %.{digits}g.
std::string format_number(double value, int significant_digits = 6);
/// Shortest form that round-trips a double (%.17g).
std::string format_full(double value);

}  // namespace ordmix
