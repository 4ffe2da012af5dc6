#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eosvac/error.hpp"

namespace eosvac::io {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& token, std::size_t line_no) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
  }
  return value;
}

/// Comma-separated numeric table with a mandatory header line. Lines that
/// are blank or start with '#' are skipped (metadata blocks).
inline std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split_commas(t);
    if (!seen_header) {
      if (cells != header) {
        std::string expected;
        for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
        throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(header.size()) + " columns, got " +
                                              std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, line_no));
    rows.push_back(std::move(row));
  }
  if (!seen_header) throw Error(ErrorCode::FormatError, "missing header line");
  return rows;
}

inline std::vector<std::vector<double>> read_numeric_csv_file(const std::string& path,
                                                              const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_numeric_csv(in, header);
}

}  // namespace eosvac::io
