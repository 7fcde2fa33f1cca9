#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "splitreg/errors.hpp"
#include "splitreg/format.hpp"

namespace splitreg {

/// Quotes a CSV cell only when needed (comma, quote, or newline inside).
inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line += ',';
    line += csv_escape(cells[i]);
  }
  return line;
}

/// Writes a CSV file atomically: the content lands under a temporary name and
/// is renamed into place, so a failed run never leaves a partial file behind.
/// `comments` go first, one "# "-prefixed line each.
inline void write_csv_atomic(const std::string& path, const std::vector<std::string>& comments,
                             const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  std::filesystem::path target(path);
  std::filesystem::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_csv_atomic: cannot open '" + temp.string() + "' for writing");
    for (const auto& c : comments) out << "# " << c << '\n';
    out << csv_join(header) << '\n';
    for (const auto& row : rows) out << csv_join(row) << '\n';
    out.flush();
    if (!out) throw Error("write_csv_atomic: write to '" + temp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw Error("write_csv_atomic: rename to '" + path + "' failed: " + ec.message());
  }
}

/// Minimal strict CSV reader for numeric tables with a header row. Quoted
/// cells are not supported on input (none of our inputs produce them).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_numeric_csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      std::size_t pos = line.find(',', start);
      cells.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw Error("read_numeric_csv: " + path + " line " + std::to_string(line_no) +
                  " has " + std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(table.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells)
      row.push_back(parse_double(cell, path + " line " + std::to_string(line_no)));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw Error("read_numeric_csv: " + path + " has no header row");
  return table;
}

}  // namespace splitreg
