#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace concomitant::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string colour = "#1f77b4";
  bool dashed = false;
  /// Scatter markers instead of a polyline.
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Grey vertical guide lines.
  std::vector<double> guides;
};

/// Self-contained SVG line/scatter plot with linear axes fitted to the data.
void write_svg(const std::filesystem::path& path, const Plot& plot);

/// Qualitative palette, cycled.
std::string palette(std::size_t i);

}  // namespace concomitant::cli
