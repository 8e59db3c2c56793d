#include "sphereflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "sphereflow/numfmt.hpp"

namespace sphereflow {

namespace {

constexpr double kWidth = 860.0, kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 680.0;  // plot box, x
constexpr double kTop = 40.0, kBottom = 470.0;  // plot box, y

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool empty() const { return lo > hi; }
  void widen(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // avoid a zero-width scale for constant data
  void pad() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-300) {
      double d = std::max(0.5, std::abs(lo) * 0.1);
      lo -= d;
      hi += d;
    }
  }
};

double coord(double v, const Range& r, double s0, double s1) {
  return s0 + (v - r.lo) / (r.hi - r.lo) * (s1 - s0);
}

std::string num(double v) { return fmt_sig(v, 8); }

}  // namespace

void write_svg(const LinePlot& plot, std::ostream& os) {
  // collect drawable points per series
  std::vector<std::vector<std::pair<double, double>>> pts(plot.series.size());
  Range rx, ry;
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    std::size_t m = std::min(ser.x.size(), ser.y.size());
    for (std::size_t i = 0; i < m; ++i) {
      double x = ser.x[i], y = ser.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (plot.log_y) {
        if (y <= 0.0) continue;
        y = std::log10(y);
      }
      pts[s].emplace_back(x, y);
      rx.widen(x);
      ry.widen(y);
    }
  }
  rx.pad();
  ry.pad();

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" font-size=\"16\" "
        "font-family=\"sans-serif\" text-anchor=\"middle\">"
     << xml_escape(plot.title) << "</text>\n";

  // axes box, grid and tick labels (five ticks per axis)
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
     << kRight - kLeft << "\" height=\"" << kBottom - kTop
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
    double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
    double sx = coord(fx, rx, kLeft, kRight);
    double sy = coord(fy, ry, kBottom, kTop);
    os << "<line x1=\"" << num(sx) << "\" y1=\"" << kTop << "\" x2=\""
       << num(sx) << "\" y2=\"" << kBottom
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << num(sy) << "\" x2=\""
       << kRight << "\" y2=\"" << num(sy)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << num(sx) << "\" y=\"" << kBottom + 18
       << "\" font-size=\"11\" font-family=\"sans-serif\" "
          "text-anchor=\"middle\">"
       << fmt_sig(fx, 4) << "</text>\n";
    std::string ylab =
        plot.log_y ? fmt_sig(std::pow(10.0, fy), 3) : fmt_sig(fy, 4);
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy + 4)
       << "\" font-size=\"11\" font-family=\"sans-serif\" "
          "text-anchor=\"end\">"
       << ylab << "</text>\n";
  }
  os << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
     << "\" font-size=\"13\" font-family=\"sans-serif\" "
        "text-anchor=\"middle\">"
     << xml_escape(plot.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
     << "\" font-size=\"13\" font-family=\"sans-serif\" "
        "text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (kTop + kBottom) / 2 << ")\">" << xml_escape(plot.y_label)
     << "</text>\n";

  int legend_row = 0;
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    if (pts[s].size() < 2) continue;
    const char* color = kPalette[s % kPaletteSize];
    os << "<path fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < pts[s].size(); ++i) {
      os << (i == 0 ? "M" : " L") << num(coord(pts[s][i].first, rx, kLeft, kRight))
         << " " << num(coord(pts[s][i].second, ry, kBottom, kTop));
    }
    os << "\"/>\n";
    double ly = kTop + 14 + 18 * legend_row++;
    os << "<line x1=\"" << kRight + 12 << "\" y1=\"" << num(ly) << "\" x2=\""
       << kRight + 38 << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kRight + 44 << "\" y=\"" << num(ly + 4)
       << "\" font-size=\"11\" font-family=\"sans-serif\">"
       << xml_escape(plot.series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
}

void write_svg_file(const LinePlot& plot, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_svg(plot, os);
  os.close();
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace sphereflow
