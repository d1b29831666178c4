#include "socnet/csv.hpp"

#include <charconv>
#include <cstdio>

namespace socnet::csv {

std::vector<Row> read_rows(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Row row;
    row.line = lineno;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        row.fields.push_back(line.substr(start));
        break;
      }
      row.fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string field(const std::string& s) { return s; }
std::string field(const char* s) { return std::string(s); }
std::string field(double v) { return format_double(v); }
std::string field(int v) { return std::to_string(v); }
std::string field(long long v) { return std::to_string(v); }
std::string field(unsigned long long v) { return std::to_string(v); }

}  // namespace socnet::csv
