#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dumbbell {

/// matplotlib's default ten-color cycle.
const std::vector<std::string>& default_color_cycle();

/// Splits a space-separated color list; throws ConfigError when empty.
std::vector<std::string> parse_color_cycle(const std::string& text);

struct PlotSeries {
  std::string label;
  std::string color;
  /// Points in data coordinates. A NaN y breaks a line.
  std::vector<std::pair<double, double>> points;
  bool scatter = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::string> note;  // shown under the title
  std::vector<PlotSeries> series;
  std::optional<std::pair<double, double>> y_range;
  int width = 960;
  int height = 540;
};

/// Renders a line/scatter chart with axes, ticks and a legend. Scatter
/// points that fall on the same half-pixel are drawn once.
std::string render_svg(const PlotSpec& spec);

}  // namespace dumbbell
