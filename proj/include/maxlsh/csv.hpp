#pragma once

// Matrix CSV exchange format: one row per line, comma-separated decimal
// literals with '.' separator, no header, UTF-8, '\n' line endings.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "maxlsh/matrix.hpp"

namespace maxlsh {

/// Malformed CSV input; carries the 1-based line and column of the offense.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, int line, int column)
      : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

inline Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::vector<double> row;
    int col_no = 0;
    std::size_t pos = 0;
    while (true) {
      ++col_no;
      std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const char* begin = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      // reject empty cells, trailing junk, and non-finite values
      while (end && *end == ' ') ++end;
      if (end == begin || (end && *end != '\0')) throw CsvError("non-numeric cell '" + cell + "'", line_no, col_no);
      if (!std::isfinite(v)) throw CsvError("non-finite cell '" + cell + "'", line_no, col_no);
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw CsvError("ragged row: expected " + std::to_string(rows.front().size()) + " cells, got " +
                         std::to_string(row.size()),
                     line_no, static_cast<int>(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("empty matrix", 1, 1);
  Matrix out(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
  return out;
}

inline Matrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_csv(std::ostream& out, const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_csv_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out, m);
}

}  // namespace maxlsh
