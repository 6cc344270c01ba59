#include "negdro/harness/results.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace negdro::harness {

bool operator<(const ResultRow& a, const ResultRow& b) {
  return std::tie(a.method, a.p, a.n, a.gamma, a.replicate) < std::tie(b.method, b.p, b.n, b.gamma, b.replicate);
}

void ResultTable::sort() { std::stable_sort(rows.begin(), rows.end()); }

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " '" + s + "' contains a CSV delimiter");
  }
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* col) {
  if (s.empty()) bad_line(line, std::string(col) + " is empty");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) bad_line(line, std::string(col) + " '" + s + "' is not a number");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, std::size_t line, const char* col) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    bad_line(line, std::string(col) + " '" + s + "' is not an integer");
  }
  return v;
}

}  // namespace

void write_csv(const ResultTable& table, std::ostream& out) {
  out << kCsvHeader << '\n';
  std::vector<const ResultRow*> order;
  for (const auto& r : table.rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ResultRow* a, const ResultRow* b) { return *a < *b; });
  for (const ResultRow* row : order) {
    const ResultRow& r = *row;
    check_field(r.method, "method");
    check_field(r.status, "status");
    out << r.method << ',' << r.replicate << ',' << fmt(r.gamma) << ',' << r.n << ',' << r.p << ',';
    if (r.l2_error) out << fmt(*r.l2_error);
    out << ',' << fmt(r.runtime_ms) << ',' << r.status << ',';
    for (std::size_t i = 0; i < r.selected_subset.size(); ++i) {
      if (i > 0) out << ';';
      out << r.selected_subset[i] + 1;
    }
    out << '\n';
  }
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "' for writing");
  write_csv(table, out);
  if (!out) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path.string() + "'");
}

ResultTable read_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "line 1: missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) bad_line(lineno, "unexpected header");

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) bad_line(lineno, "expected 9 fields, found " + std::to_string(f.size()));
    ResultRow r;
    r.method = f[0];
    if (r.method.empty()) bad_line(lineno, "method is empty");
    r.replicate = parse_int<std::size_t>(f[1], lineno, "replicate");
    if (r.replicate < 1) bad_line(lineno, "replicate labels start at 1");
    r.gamma = parse_double(f[2], lineno, "gamma");
    r.n = parse_int<std::size_t>(f[3], lineno, "n");
    r.p = parse_int<int>(f[4], lineno, "p");
    if (!f[5].empty()) {
      r.l2_error = parse_double(f[5], lineno, "l2_error");
      if (!(*r.l2_error >= 0.0)) bad_line(lineno, "l2_error must be >= 0");
    }
    r.runtime_ms = parse_double(f[6], lineno, "runtime_ms");
    r.status = f[7];
    if (r.status.empty()) bad_line(lineno, "status is empty");
    if (!f[8].empty()) {
      for (const auto& tok : split(f[8], ';')) {
        const int j = parse_int<int>(tok, lineno, "selected_subset");
        if (j < 1) bad_line(lineno, "selected_subset labels start at 1");
        r.selected_subset.push_back(j - 1);
      }
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

ResultTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  return read_csv(in);
}

}  // namespace negdro::harness
