#include "dumbbell/svg_plot.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dumbbell/duration.hpp"

namespace dumbbell {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(ColorCycle, DefaultAndCustom) {
  const auto& d = default_color_cycle();
  ASSERT_EQ(d.size(), 10u);
  EXPECT_EQ(d.front(), "#1f77b4");
  EXPECT_EQ(parse_color_cycle("red  #00ff00 blue"), (std::vector<std::string>{"red", "#00ff00", "blue"}));
  EXPECT_THROW(parse_color_cycle("   "), ConfigError);
}

TEST(RenderSvg, StructureAndEscaping) {
  PlotSpec spec;
  spec.title = "Average throughput";
  spec.x_label = "Time (s)";
  spec.y_label = "Mbit/s";
  spec.note = "Aggregation interval: 0.5 s";
  spec.series.push_back(PlotSeries{"Flow 1: cubic ->", "#123456", {{0.25, 10}, {0.75, 20}, {1.25, 30}}, false});
  const std::string svg = render_svg(spec);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("Average throughput"), std::string::npos);
  EXPECT_NE(svg.find("Aggregation interval: 0.5 s"), std::string::npos);
  EXPECT_NE(svg.find("Flow 1: cubic -&gt;"), std::string::npos);
  EXPECT_NE(svg.find("#123456"), std::string::npos);
}

TEST(RenderSvg, NanBreaksLines) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PlotSpec joined, broken;
  joined.series.push_back(PlotSeries{"a", "#000001", {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, false});
  broken.series.push_back(PlotSeries{"a", "#000001", {{0, 1}, {1, 2}, {2, nan}, {3, 4}, {4, 5}}, false});
  EXPECT_EQ(count(render_svg(joined), " M"), 0u);
  EXPECT_EQ(count(render_svg(broken), " M"), 1u);
  EXPECT_EQ(count(render_svg(broken), "<path"), 1u);
}

TEST(RenderSvg, EmptyPlotStillRenders) {
  PlotSpec spec;
  spec.title = "Nothing";
  const std::string svg = render_svg(spec);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RenderSvg, ScatterDeduplicatesPixels) {
  PlotSpec spec;
  PlotSeries s{"pts", "#000002", {}, true};
  for (int i = 0; i < 1000; ++i) s.points.emplace_back(1.0, 1.0);
  s.points.emplace_back(100.0, 50.0);
  spec.series.push_back(s);
  EXPECT_EQ(count(render_svg(spec), "<circle"), 2u);
}

}  // namespace
}  // namespace dumbbell
