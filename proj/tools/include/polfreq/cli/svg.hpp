#pragma once

#include <string>
#include <vector>

namespace polfreq::cli {

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::string color = "#1f6fb2";
  bool dashed = false;
  bool markers = false;
  std::vector<double> y_err;  // optional, one per point
};

// Minimal self-contained polyline chart; deterministic output.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series);

}  // namespace polfreq::cli
