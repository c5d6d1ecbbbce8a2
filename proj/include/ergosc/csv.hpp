#pragma once

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace ergosc {

struct ResultRow {
  std::string experiment;
  /// Flattened key=value pairs joined by ';'.
  std::string param;
  std::string metric;
  double value = 0.0;
  std::string fingerprint;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* csv_header = "experiment,param,metric,value,fingerprint";

/// Git-style blob hash: SHA-1 of "blob <len>\0<content>", lowercase hex.
inline std::string content_fingerprint(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) == 1, ErrorKind::IoFailure,
          "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest text that reads back to the same double, for parameter fields.
inline std::string short_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header << '\n';
  for (const auto& r : rows)
    out << csv_field(r.experiment) << ',' << csv_field(r.param) << ',' << csv_field(r.metric) << ','
        << format_value(r.value) << ',' << csv_field(r.fingerprint) << '\n';
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  require(!rows.empty(), ErrorKind::IoFailure, "no rows to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
  write_csv(out, rows);
  out.flush();
  require(static_cast<bool>(out), ErrorKind::IoFailure, "write to '" + path + "' failed");
}

/// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  require(!quoted, ErrorKind::ParseError, "unterminated quoted field");
  return out;
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(std::getline(in, line) && line == csv_header, ErrorKind::ParseError, "missing CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    const auto f = split_csv_record(line);
    require(f.size() == 5, ErrorKind::ParseError, "CSV record does not have 5 fields");
    char* end = nullptr;
    const double v = std::strtod(f[3].c_str(), &end);
    require(end == f[3].c_str() + f[3].size() && !f[3].empty(), ErrorKind::ParseError, "bad value '" + f[3] + "'");
    rows.push_back({f[0], f[1], f[2], v, f[4]});
  }
  return rows;
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoFailure, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace ergosc
