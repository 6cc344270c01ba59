#pragma once

#include "negdro/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace negdro::harness {

struct ResultRow {
  std::string method;
  std::size_t replicate = 1;  // 1-based
  double gamma = 0.0;
  std::size_t n = 0;  // per-environment sample size
  int p = 0;
  std::optional<double> l2_error;  // empty when the method produced no estimate
  double runtime_ms = 0.0;
  std::string status = "ok";
  IndexSet selected_subset;  // 0-based; written 1-based, ';'-joined

  bool operator==(const ResultRow&) const = default;
};

/// Ordering used when writing: method, p, n, gamma, replicate.
bool operator<(const ResultRow& a, const ResultRow& b);

struct ResultTable {
  std::vector<ResultRow> rows;

  void sort();
  bool operator==(const ResultTable&) const = default;
};

inline constexpr const char* kCsvHeader = "method,replicate,gamma,n,p,l2_error,runtime_ms,status,selected_subset";

/// Numbers use 17 significant digits, so reading back is lossless.
void write_csv(const ResultTable& table, std::ostream& out);
void write_csv(const ResultTable& table, const std::filesystem::path& path);

/// Throws ParseError naming the 1-based line number of the first bad line.
ResultTable read_csv(std::istream& in);
ResultTable read_csv(const std::filesystem::path& path);

}  // namespace negdro::harness
