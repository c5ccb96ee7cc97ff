#pragma once

// Minimal SVG 1.1 line charts: axes with ticks, a legend, one polyline per
// series and an optional shaded band (e.g. 25th-75th percentile).

#include <string>
#include <vector>

namespace hurl::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Either empty or the same length as x.
  std::vector<double> band_lo;
  std::vector<double> band_hi;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 720;
  int height = 440;
};

std::string render_line_chart(const Chart& chart);

}  // namespace hurl::svg
