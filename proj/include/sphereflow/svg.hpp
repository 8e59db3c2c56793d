#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sphereflow {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal deterministic line plot.  Non-finite points are skipped; with
// log_y set, non-positive values are skipped as well and the y axis is
// rendered in log10 scale.
struct LinePlot {
  std::string title, x_label, y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

void write_svg(const LinePlot& plot, std::ostream& os);
void write_svg_file(const LinePlot& plot, const std::string& path);

}  // namespace sphereflow
