#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuffle {

/// Fixed significant-digit rendering, locale independent. General numeric
/// output uses 6 digits; log-likelihoods use 12.
inline std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::string(buf);
}

inline std::string fmt_sig6(double v) { return fmt_sig(v, 6); }
inline std::string fmt_sig12(double v) { return fmt_sig(v, 12); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("short write: " + path);
}

/// Splits a line on commas and/or whitespace, dropping empty fields.
inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Parses rows of numbers from text. Blank lines and '#' comments are
/// skipped; fields may be separated by commas or whitespace.
inline std::vector<std::vector<double>> parse_numeric_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::vector<std::string> fields = split_fields(line);
    if (fields.empty()) continue;
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + f + "'");
      }
      if (pos != f.size()) throw std::invalid_argument("not a number: '" + f + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  try {
    return parse_numeric_rows(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

/// Reads a file expected to hold exactly one observation row.
inline std::vector<double> read_single_row(const std::string& path) {
  const std::vector<std::vector<double>> rows = read_numeric_rows(path);
  if (rows.size() != 1) {
    throw std::invalid_argument(path + ": expected exactly one data row, found " +
                                std::to_string(rows.size()));
  }
  return rows[0];
}

/// Reads a single row of nonnegative integer counts.
inline std::vector<long long> read_count_row(const std::string& path) {
  const std::vector<double> row = read_single_row(path);
  std::vector<long long> counts;
  counts.reserve(row.size());
  for (double v : row) {
    if (v < 0 || v != std::floor(v)) {
      throw std::invalid_argument(path + ": counts must be nonnegative integers");
    }
    counts.push_back(static_cast<long long>(v));
  }
  return counts;
}

}  // namespace shuffle
