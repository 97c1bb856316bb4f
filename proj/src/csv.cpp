#include "ordmix/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ordmix/error.hpp"

namespace ordmix {

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<int>(c);
  }
  throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in header");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  int line = 1;
  int record_line = 1;

  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
  };
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size())
        throw Error(ErrorCode::ParseError, "line " + std::to_string(record_line) + ": expected " +
                                               std::to_string(table.header.size()) + " fields, found " +
                                               std::to_string(record.size()));
      table.rows.push_back(std::move(record));
      table.row_lines.push_back(record_line);
    }
    record.clear();
    record_has_content = false;
  };

  char ch;
  while (is.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (is.peek() == '"') {
          is.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || field_was_quoted) fail("quote inside an unquoted field");
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (is.peek() != '\n') fail("bare carriage return");
        break;
      case '\n':
        if (record_has_content || !field.empty()) {
          end_record();
        } else if (!table.header.empty() || !record.empty()) {
          fail("empty line");
        } else {
          fail("missing header row");
        }
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) fail("text after a closing quote");
        field.push_back(ch);
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) fail("unterminated quoted field");
  if (record_has_content || !field.empty()) end_record();
  if (table.header.empty()) throw Error(ErrorCode::ParseError, "missing header row");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

std::string format_number(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return buf;
}

std::string format_full(double value) { return format_number(value, 17); }

}  // namespace ordmix
