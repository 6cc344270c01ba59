#pragma once

#include "negdro/harness/results.hpp"

#include <filesystem>
#include <string>

namespace negdro::harness {

struct PlotSpec {
  std::string x = "gamma";
  std::string y = "l2_error";
  std::string group_by = "method";
  bool log_x = false;
  bool log_y = false;
};

/// Standalone SVG line chart: y averaged over rows sharing (group, x), one
/// polyline per group, legend and axis labels. x and y must be numeric
/// columns; rows without a y value are skipped. Throws EmptySelection when
/// nothing is left to draw or a log axis meets non-positive values (the
/// message lists the offending 1-based row numbers).
std::string render_svg(const ResultTable& table, const PlotSpec& spec);
void plot_svg(const ResultTable& table, const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace negdro::harness
