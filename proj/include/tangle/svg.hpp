#pragma once

#include <string>
#include <vector>

namespace tangle {

/// One polyline of a chart. x and y must have equal length.
struct SvgSeries {
  std::string label;
  std::string color = "#4682b4";
  double stroke_width = 1.0;
  std::vector<double> x;
  std::vector<double> y;
};

/// Deterministic polyline chart: fixed viewBox, linear axes with rounded
/// tick steps, legend from the series labels. No external dependencies.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace tangle
