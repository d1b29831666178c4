#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace socnet::csv {

struct Row {
  int line = 0;  // 1-based line number in the source stream
  std::vector<std::string> fields;
};

// Plain comma-separated parsing. Fields may not contain commas or newlines;
// identifiers in this toolkit never do. Trailing '\r' is stripped, blank
// lines are skipped.
std::vector<Row> read_rows(std::istream& in);

// Shortest round-trip decimal representation (std::to_chars), so exported
// artifacts are byte-stable across runs.
std::string format_double(double v);

std::string field(const std::string& s);
std::string field(const char* s);
std::string field(double v);
std::string field(int v);
std::string field(long long v);
std::string field(unsigned long long v);

inline void write_row_impl(std::ostream& out, bool) { out << '\n'; }

template <typename T, typename... Rest>
void write_row_impl(std::ostream& out, bool first, const T& v, const Rest&... rest) {
  if (!first) out << ',';
  out << field(v);
  write_row_impl(out, false, rest...);
}

template <typename... Ts>
void write_row(std::ostream& out, const Ts&... fields) {
  write_row_impl(out, true, fields...);
}

}  // namespace socnet::csv
