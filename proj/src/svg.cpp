#include "tangle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tangle/params.hpp"

namespace tangle {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// largest "nice" step (1/2/5 times a power of ten) giving <= 6 intervals
double nice_step(double range) {
  if (range <= 0.0) return 1.0;
  const double rough = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(rough)));
  for (const double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= rough) return mag * mult;
  }
  return mag * 10.0;
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const SvgSeries& s : series) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (!(x_min < x_max)) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (!(y_min < y_max)) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ofstream out(path);
  if (!out) throw Error(errc::io_error, "cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  const double x_step = nice_step(x_max - x_min);
  for (double v = std::ceil(x_min / x_step) * x_step; v <= x_max + 1e-12 * x_step;
       v += x_step) {
    out << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(v))
        << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kHeight - kBottom + 18)
        << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  const double y_step = nice_step(y_max - y_min);
  for (double v = std::ceil(y_min / y_step) * y_step; v <= y_max + 1e-12 * y_step;
       v += y_step) {
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(v)) << "\" x2=\""
        << num(kWidth - kRight) << "\" y2=\"" << num(py(v)) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(v) + 4)
        << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kHeight / 2 << ")\">"
      << y_label << "</text>\n";

  for (const SvgSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << s.stroke_width << "\" points=\"";
    for (size_t k = 0; k < s.x.size(); ++k) {
      if (k) out << ' ';
      out << num(px(s.x[k])) << ',' << num(py(s.y[k]));
    }
    out << "\"/>\n";
  }

  double legend_y = kTop + 16.0;
  for (const SvgSeries& s : series) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << num(kWidth - kRight - 150) << "\" y1=\"" << num(legend_y - 4)
        << "\" x2=\"" << num(kWidth - kRight - 120) << "\" y2=\"" << num(legend_y - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight - 112) << "\" y=\"" << num(legend_y) << "\">"
        << s.label << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
}

}  // namespace tangle
