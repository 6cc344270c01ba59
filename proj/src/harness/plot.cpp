#include "negdro/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace negdro::harness {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

bool is_numeric_column(const std::string& c) {
  return c == "replicate" || c == "gamma" || c == "n" || c == "p" || c == "l2_error" || c == "runtime_ms";
}

bool is_column(const std::string& c) {
  return is_numeric_column(c) || c == "method" || c == "status" || c == "selected_subset";
}

std::optional<double> numeric(const ResultRow& r, const std::string& c) {
  if (c == "replicate") return static_cast<double>(r.replicate);
  if (c == "gamma") return r.gamma;
  if (c == "n") return static_cast<double>(r.n);
  if (c == "p") return static_cast<double>(r.p);
  if (c == "l2_error") return r.l2_error;
  if (c == "runtime_ms") return r.runtime_ms;
  return std::nullopt;
}

std::string num(double v, const char* format = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string label(const ResultRow& r, const std::string& c) {
  if (c == "method") return r.method;
  if (c == "status") return r.status;
  if (c == "selected_subset") {
    std::string s;
    for (std::size_t i = 0; i < r.selected_subset.size(); ++i) {
      if (i > 0) s += ';';
      s += std::to_string(r.selected_subset[i] + 1);
    }
    return s;
  }
  const auto v = numeric(r, c);
  return v ? num(*v) : std::string("NA");
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;
  bool log;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double inverse(double t) const { return log ? std::pow(10.0, t) : t; }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis a{log ? std::log10(lo) : lo, log ? std::log10(hi) : hi, log};
  if (a.hi - a.lo <= 1e-12 * std::max(1.0, std::abs(a.hi))) {
    const double pad = std::max(0.5, 0.05 * std::abs(a.hi));
    a.lo -= pad;
    a.hi += pad;
  }
  return a;
}

void check_log(const std::vector<std::pair<std::size_t, double>>& vals, const std::string& col) {
  std::vector<std::size_t> bad;
  for (const auto& [row, v] : vals) {
    if (!(v > 0.0)) bad.push_back(row);
  }
  if (bad.empty()) return;
  std::string rows;
  for (std::size_t i = 0; i < bad.size() && i < 20; ++i) rows += (i ? ", " : "") + std::to_string(bad[i]);
  if (bad.size() > 20) rows += ", ...";
  throw Error(ErrorCode::EmptySelection,
              "log scale on '" + col + "' needs positive values; non-positive in rows " + rows);
}

}  // namespace

std::string render_svg(const ResultTable& table, const PlotSpec& spec) {
  for (const auto* c : {&spec.x, &spec.y, &spec.group_by}) {
    if (!is_column(*c)) throw Error(ErrorCode::InvalidArgument, "unknown column '" + *c + "'");
  }
  if (!is_numeric_column(spec.x)) throw Error(ErrorCode::InvalidArgument, "x column '" + spec.x + "' is not numeric");
  if (!is_numeric_column(spec.y)) throw Error(ErrorCode::InvalidArgument, "y column '" + spec.y + "' is not numeric");

  std::vector<std::pair<std::size_t, double>> xs;
  std::vector<std::pair<std::size_t, double>> ys;
  std::map<std::string, std::map<double, std::pair<double, std::size_t>>> sums;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const auto x = numeric(r, spec.x);
    const auto y = numeric(r, spec.y);
    if (!x || !y) continue;
    xs.emplace_back(i + 1, *x);
    ys.emplace_back(i + 1, *y);
    auto& cell = sums[label(r, spec.group_by)][*x];
    cell.first += *y;
    ++cell.second;
  }
  if (sums.empty()) {
    throw Error(ErrorCode::EmptySelection, "no rows carry both '" + spec.x + "' and '" + spec.y + "'");
  }
  if (spec.log_x) check_log(xs, spec.x);
  if (spec.log_y) check_log(ys, spec.y);

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& [group, cells] : sums) {
    for (const auto& [x, acc] : cells) series[group].emplace_back(x, acc.first / static_cast<double>(acc.second));
  }

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& [g, pts] : series) {
    for (const auto& [x, y] : pts) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  const Axis ax = make_axis(xlo, xhi, spec.log_x);
  const Axis ay = make_axis(ylo, yhi, spec.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (ax.transform(x) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (ay.transform(y) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int k = 0; k < kTicks; ++k) {
    const double f = static_cast<double>(k) / (kTicks - 1);
    const double tx = ax.lo + f * (ax.hi - ax.lo);
    const double sx = kLeft + f * pw;
    svg << "<line x1=\"" << num(sx) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(sx) << "\" y2=\""
        << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(sx) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << num(ax.inverse(tx), "%.3g") << "</text>\n";
    const double ty = ay.lo + f * (ay.hi - ay.lo);
    const double sy = kTop + ph - f * ph;
    svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(sy) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy + 4) << "\" text-anchor=\"end\">"
        << num(ay.inverse(ty), "%.3g") << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
      << escape(spec.x) << (spec.log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num(kTop + ph / 2) << ")\">" << "mean " << escape(spec.y) << (spec.log_y ? " (log scale)" : "")
      << "</text>\n";

  std::size_t idx = 0;
  for (const auto& [group, pts] : series) {
    const char* color = kPalette[idx % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      svg << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * static_cast<double>(idx);
    const double lx = kLeft + pw + 15;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(group) << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

void plot_svg(const ResultTable& table, const PlotSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_svg(table, spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "' for writing");
  out << svg;
}

}  // namespace negdro::harness
