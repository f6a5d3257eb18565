#pragma once
// Plot-ready CSV: header row, LF endings, shortest round-trip decimals.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "tsrm/errors.hpp"
#include "tsrm/tsrm_contour.hpp"

namespace tsrm {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

template <class T>
std::string format_field(const T& v) {
  if constexpr (std::is_floating_point_v<T>) return format_number(static_cast<double>(v));
  else if constexpr (std::is_integral_v<T>) return std::to_string(v);
  else return std::string(v);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  template <class... Ts>
  void row(const Ts&... vs) {
    if (sizeof...(Ts) != header_.size()) throw domain_error("csv: row width does not match header");
    rows_.push_back({format_field(vs)...});
  }
  void row_strings(std::vector<std::string> r) {
    if (r.size() != header_.size()) throw domain_error("csv: row width does not match header");
    rows_.push_back(std::move(r));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += r[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw io_error("write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Parse the plain CSV this module writes (no quoting).
inline CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::vector<std::string> cells;
    std::string_view l(text.data() + pos, nl - pos);
    std::size_t c = 0;
    while (true) {
      const std::size_t comma = l.find(',', c);
      cells.emplace_back(l.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    lines.push_back(std::move(cells));
    pos = nl + 1;
  }
  if (lines.empty()) throw io_error("csv: missing header");
  CsvTable t(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) t.row_strings(lines[i]);
  return t;
}

inline double parse_number(std::string_view s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw io_error("csv: bad number '" + std::string(s) + "'");
  return v;
}

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
inline std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static constexpr char hex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i, h >>= 4) buf[i] = hex[h & 15];
  buf[16] = 0;
  return buf;
}

inline CsvTable trace_table(const TsrmTrace& tr) {
  CsvTable t({"t", "x", "h"});
  for (const auto& s : tr.samples) t.row(s.t, s.x, s.h);
  return t;
}

inline CsvTable local_time_table(const LocalTimeProfile& lp) {
  CsvTable t({"x", "L"});
  for (std::size_t i = 0; i < lp.cells.size(); ++i) {
    const coord s = lp.strip_lo + static_cast<coord>(i);
    t.row(lp.x_of(s), lp.value(s));
  }
  return t;
}

}  // namespace tsrm
