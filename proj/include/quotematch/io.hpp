#pragma once

// Small file helpers shared by the loaders: whole-file reads, line splitting
// with BOM/CRLF tolerance, and a minimal RFC 4180 CSV reader/writer.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quotematch/error.hpp"
#include "quotematch/utf8.hpp"

namespace quotematch::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed: " + path.string());
}

// Splits on '\n', drops a trailing '\r' per line and a leading BOM. A final
// empty line after the last newline is not returned.
inline std::vector<std::string> split_lines(std::string_view content) {
  content = utf8::strip_bom(content);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  return split_lines(read_file(path));
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Index of a header column; throws ParseError when absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError("missing CSV column '" + std::string(name) + "'", 1);
  }
};

inline CsvTable parse_csv(std::string_view content, char sep = ',') {
  content = utf8::strip_bom(content);
  std::vector<CsvRow> records;
  CsvRow cur;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  std::size_t line = 1;
  cur.line = 1;
  auto end_record = [&] {
    cur.fields.push_back(std::move(field));
    field.clear();
    const bool blank = cur.fields.size() == 1 && cur.fields[0].empty();
    if (!blank) records.push_back(std::move(cur));
    cur = CsvRow{};
    any = false;
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (!any) cur.line = line;
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == sep) {
      cur.fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field", cur.line);
  if (any) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record();
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front().fields);
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  for (const auto& r : t.rows) {
    if (r.fields.size() != t.header.size())
      throw ParseError("expected " + std::to_string(t.header.size()) + " CSV fields, got " +
                           std::to_string(r.fields.size()),
                       r.line);
  }
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path, char sep = ',') {
  return parse_csv(read_file(path), sep);
}

inline std::string csv_escape(std::string_view f) {
  if (f.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

// Fixed-point formatting with a stable number of decimals.
inline std::string fixed(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace quotematch::io
