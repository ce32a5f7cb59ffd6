#pragma once

#include <string>
#include <vector>

namespace distgen {

// Minimal static line chart, enough to render sweep curves without an
// external plotting stack.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgChart& chart, int width = 640, int height = 420);

}  // namespace distgen
