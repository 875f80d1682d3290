#include "polfreq/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "polfreq/errors.hpp"

namespace polfreq::cli {

namespace {

constexpr double kWidth = 860, kHeight = 520;
constexpr double kLeft = 72, kRight = 832, kTop = 48, kBottom = 460;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1-2-5 tick spacing covering [lo, hi] with about 6 intervals.
double tick_step(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0.0)) return 1.0;
  double raw = span / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double nice = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      double lo = s.y[i], hi = s.y[i];
      if (i < s.y_err.size()) {
        lo -= s.y_err[i];
        hi += s.y_err[i];
      }
      y_min = std::min(y_min, lo);
      y_max = std::max(y_max, hi);
    }
  if (!std::isfinite(x_min) || !std::isfinite(y_min))
    throw Error("write_svg_chart: no data");
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  y_min = std::min(y_min, 0.0);
  double y_pad = 0.05 * (y_max - y_min);
  y_max += y_pad;

  auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  auto py = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ofstream out(path);
  if (!out) throw Error("write_svg_chart: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth
      << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << (kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-size=\"17\">" << title << "</text>\n";

  double xs = tick_step(x_min, x_max);
  double ys = tick_step(y_min, y_max);
  out << "<g stroke=\"#d0d0d0\" stroke-width=\"1\" font-size=\"12\" fill=\"#333\">\n";
  for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-9 * xs; x += xs) {
    out << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << kTop << "\" x2=\""
        << fmt(px(x)) << "\" y2=\"" << kBottom << "\"/>\n";
    out << "<text x=\"" << fmt(px(x)) << "\" y=\"" << (kBottom + 18)
        << "\" text-anchor=\"middle\" stroke=\"none\">" << fmt(x) << "</text>\n";
  }
  for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-9 * ys; y += ys) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(y)) << "\" x2=\""
        << kRight << "\" y2=\"" << fmt(py(y)) << "\"/>\n";
    out << "<text x=\"" << (kLeft - 8) << "\" y=\"" << fmt(py(y) + 4)
        << "\" text-anchor=\"end\" stroke=\"none\">" << fmt(y) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << (kRight - kLeft) << "\" height=\"" << (kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kHeight - 14)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << ((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << ((kTop + kBottom) / 2) << ")\">" << y_label << "</text>\n";

  for (const Series& s : series) {
    if (!s.y_err.empty()) {
      out << "<g stroke=\"" << s.color << "\" stroke-width=\"1.2\">\n";
      for (std::size_t i = 0; i < s.x.size() && i < s.y_err.size(); ++i) {
        if (s.y_err[i] <= 0.0) continue;
        double cx = px(s.x[i]);
        out << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(py(s.y[i] - s.y_err[i]))
            << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(py(s.y[i] + s.y_err[i]))
            << "\"/>\n";
      }
      out << "</g>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    out << "\"/>\n";
    if (s.markers) {
      out << "<g fill=\"" << s.color << "\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
            << "\" r=\"3\"/>\n";
      out << "</g>\n";
    }
  }

  double ly = kTop + 16;
  for (const Series& s : series) {
    out << "<line x1=\"" << (kRight - 170) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
        << (kRight - 140) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
        << "/>\n";
    out << "<text x=\"" << (kRight - 132) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"12\">" << s.name << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace polfreq::cli
