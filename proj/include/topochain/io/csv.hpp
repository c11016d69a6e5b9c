#ifndef TOPOCHAIN_IO_CSV_HPP
#define TOPOCHAIN_IO_CSV_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "topochain/errors.hpp"

namespace topochain::io {

/// Numeric table with named columns. Values print with 17 significant
/// digits so csv output round-trips doubles exactly.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int width() const { return static_cast<int>(columns.size()); }
  bool empty() const { return rows.empty() || columns.empty(); }

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw ConfigError("Table: row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC-4180: quote a cell when it contains a comma, a quote, or a newline.
inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const Table& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(table.columns[c]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

/// Write through a temporary file and rename, so a file either exists with
/// its full content or not at all.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace topochain::io

#endif
