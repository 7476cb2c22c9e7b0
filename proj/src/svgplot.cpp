#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "surfops/harness.hpp"

namespace surfops {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Mapper {
  double x_lo, x_hi, y_lo, y_hi;  // log10 ranges
  double px(double x) const {
    return kLeft + (std::log10(x) - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom -
           (std::log10(y) - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
  }
};

}  // namespace

void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                      const std::string& y_label, const std::vector<double>& guide_slopes,
                      const std::string& path) {
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i]));
      x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, std::log10(s.y[i]));
      y_hi = std::max(y_hi, std::log10(s.y[i]));
    }
  }
  if (x_lo > x_hi || y_lo > y_hi)
    throw std::invalid_argument("svg plot: no positive data");
  if (x_hi - x_lo < 0.5) x_hi = x_lo + 0.5;
  if (y_hi - y_lo < 0.5) y_hi = y_lo + 0.5;
  x_lo -= 0.05 * (x_hi - x_lo); x_hi += 0.05 * (x_hi - x_lo);
  y_lo -= 0.08 * (y_hi - y_lo); y_hi += 0.08 * (y_hi - y_lo);
  const Mapper map{x_lo, x_hi, y_lo, y_hi};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  char buf[512];

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  out << buf;

  // decade ticks
  for (int k = static_cast<int>(std::ceil(x_lo)); k <= static_cast<int>(std::floor(x_hi));
       ++k) {
    const double px = map.px(std::pow(10.0, k));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">1e%d</text>\n",
                  px, kTop, px, kHeight - kBottom, px, kHeight - kBottom + 18.0, k);
    out << buf;
  }
  for (int k = static_cast<int>(std::ceil(y_lo)); k <= static_cast<int>(std::floor(y_hi));
       ++k) {
    const double py = map.py(std::pow(10.0, k));
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n",
                  kLeft, py, kWidth - kRight, py, kLeft - 6.0, py + 4.0, k);
    out << buf;
  }

  // dash-dotted reference slopes anchored at the data corner
  for (double slope : guide_slopes) {
    const double gx0 = std::pow(10.0, x_lo + 0.1 * (x_hi - x_lo));
    const double gx1 = std::pow(10.0, x_hi - 0.1 * (x_hi - x_lo));
    const double gy0 = std::pow(10.0, y_hi - 0.12 * (y_hi - y_lo));
    const double gy1 = gy0 * std::pow(gx1 / gx0, slope);
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
                  "stroke-dasharray=\"8 3 2 3\"/>\n",
                  map.px(gx0), map.py(gy0), map.px(gx1), map.py(gy1));
    out << buf;
  }

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", map.px(series[s].x[i]),
                    map.py(series[s].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n",
                    map.px(series[s].x[i]), map.py(series[s].y[i]), color);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n",
                  kWidth - kRight - 170.0, kTop + 18.0 + 16.0 * s, color,
                  series[s].label.c_str());
    out << buf;
  }

  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                kLeft + (kWidth - kLeft - kRight) / 2, kHeight - 12.0, x_label.c_str());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 14 %.1f)\">%s</text>\n",
                14.0, kTop + (kHeight - kTop - kBottom) / 2,
                kTop + (kHeight - kTop - kBottom) / 2, y_label.c_str());
  out << buf;
  out << "</svg>\n";
}

}  // namespace surfops
