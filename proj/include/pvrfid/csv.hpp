#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "pvrfid/error.hpp"

namespace pvrfid {

// Fixed 6-significant-digit rendering used by every CSV writer. to_chars is
// locale independent, so output is stable across hosts.
inline std::string format_sig6(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

// Shortest representation that parses back to the same double.
inline std::string format_roundtrip(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Strict, locale-independent number parse; the whole token must be consumed.
inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

using Column2 = std::vector<std::pair<double, double>>;

// Two-column numeric CSV with an exact header line and strictly increasing
// first column. LF line endings only.
inline Column2 parse_two_column_csv(std::string_view text, std::string_view header,
                                    std::string_view source = "<memory>") {
  auto fail = [&](std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::parse_error,
                std::string(source) + ":" + std::to_string(line) + ": " + msg);
  };
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  Column2 rows;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find('\r') != std::string_view::npos) fail(line_no, "CR line ending");
    if (!saw_header) {
      if (line != header) fail(line_no, "expected header '" + std::string(header) + "'");
      saw_header = true;
      continue;
    }
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      fail(line_no, "expected two comma-separated fields");
    double a = 0.0;
    double b = 0.0;
    if (!parse_double(line.substr(0, comma), a) || !parse_double(line.substr(comma + 1), b))
      fail(line_no, "malformed number");
    if (!rows.empty() && !(a > rows.back().first))
      fail(line_no, "first column must be strictly increasing");
    rows.emplace_back(a, b);
  }
  if (!saw_header) fail(1, "missing header");
  return rows;
}

inline Column2 read_two_column_csv(const std::filesystem::path& path, std::string_view header) {
  return parse_two_column_csv(read_text_file(path), header, path.string());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  detail::require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << content;
}

}  // namespace pvrfid
