#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fastslow::app {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Marker {
  double at = 0.0;
  std::string label;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Marker> vlines;
  std::vector<Marker> hlines;
  /// Fixed axis ranges; otherwise taken from the finite data.
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
};

/// Roughly `target` round tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

/// Standalone SVG line chart. Points outside the axis ranges or non-finite
/// break the polyline.
std::string render_svg(const Plot& plot);

}  // namespace fastslow::app
