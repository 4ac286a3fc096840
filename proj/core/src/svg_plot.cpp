#include "dumbbell/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "dumbbell/duration.hpp"

namespace dumbbell {

namespace {

std::string fmt(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double nice_step(double span, int target_ticks) {
  if (span <= 0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double nice = 10.0;
  if (norm <= 1.0) {
    nice = 1.0;
  } else if (norm <= 2.0) {
    nice = 2.0;
  } else if (norm <= 2.5) {
    nice = 2.5;
  } else if (norm <= 5.0) {
    nice = 5.0;
  }
  return nice * mag;
}

int tick_decimals(double step) {
  for (int d = 0; d < 6; ++d) {
    const double scaled = step * std::pow(10.0, d);
    if (std::fabs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, scaled)) return d;
  }
  return 6;
}

}  // namespace

const std::vector<std::string>& default_color_cycle() {
  static const std::vector<std::string> colors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors;
}

std::vector<std::string> parse_color_cycle(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string c;
  while (in >> c) out.push_back(c);
  if (out.empty()) throw ConfigError("the color list is empty");
  return out;
}

std::string render_svg(const PlotSpec& spec) {
  const double left = 80, right = 24, top = spec.note ? 62 : 44, bottom = 56;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  x_min = std::min(x_min, 0.0);
  y_min = std::min(y_min, 0.0);
  if (spec.y_range) {
    y_min = spec.y_range->first;
    y_max = spec.y_range->second;
  }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) y_max = y_min + 1;
  const double x_step = nice_step(x_max - x_min, 10);
  const double y_step = nice_step(y_max - y_min, 8);
  x_max = std::ceil(x_max / x_step - 1e-9) * x_step;
  if (!spec.y_range) y_max = std::ceil(y_max / y_step - 1e-9) * y_step;

  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return top + ph - (y - y_min) / (y_max - y_min) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(spec.title) << "</text>\n";
  if (spec.note) {
    o << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"42\" text-anchor=\"middle\" fill=\"#555\">"
      << escape(*spec.note) << "</text>\n";
  }

  // grid and ticks
  o << "<g stroke=\"#e0e0e0\" stroke-width=\"1\">\n";
  for (double x = x_min; x <= x_max + x_step * 1e-6; x += x_step) {
    o << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(px(x)) << "\" y2=\""
      << fmt(top + ph) << "\"/>\n";
  }
  for (double y = y_min; y <= y_max + y_step * 1e-6; y += y_step) {
    o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
      << fmt(py(y)) << "\"/>\n";
  }
  o << "</g>\n<g fill=\"#333\">\n";
  const int xd = tick_decimals(x_step), yd = tick_decimals(y_step);
  for (double x = x_min; x <= x_max + x_step * 1e-6; x += x_step) {
    o << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << fmt(x, xd) << "</text>\n";
  }
  for (double y = y_min; y <= y_max + y_step * 1e-6; y += y_step) {
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">" << fmt(y, yd)
      << "</text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(spec.height - 14.0)
    << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << "</text>\n";

  // data
  for (const auto& s : spec.series) {
    if (s.scatter) {
      o << "<g fill=\"" << escape(s.color) << "\">\n";
      std::set<std::pair<long, long>> seen;
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        const double cx = px(x), cy = py(y);
        if (!seen.insert({std::lround(cx * 2), std::lround(cy * 2)}).second) continue;
        o << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"1.2\"/>\n";
      }
      o << "</g>\n";
      continue;
    }
    std::string path;
    bool pen_down = false;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : (path.empty() ? "M" : " M")) + fmt(px(x)) + ' ' + fmt(py(y));
      pen_down = true;
    }
    if (!path.empty()) {
      o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << escape(s.color)
        << "\" stroke-width=\"1.5\" stroke-linejoin=\"round\"/>\n";
    }
  }

  // legend
  double ly = top + 14;
  for (const auto& s : spec.series) {
    if (s.label.empty()) continue;
    const double lx = left + pw - 12;
    o << "<rect x=\"" << fmt(lx - 4) << "\" y=\"" << fmt(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
      << escape(s.color) << "\"/>\n";
    o << "<text x=\"" << fmt(lx - 10) << "\" y=\"" << fmt(ly) << "\" text-anchor=\"end\">" << escape(s.label)
      << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace dumbbell
