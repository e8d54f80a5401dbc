#pragma once

#include <string>
#include <vector>

#include "tslip/vec2.hpp"

namespace tslip {

/// Minimal static SVG line-plot writer: axes with auto ticks, polyline
/// series, optional reference lines, legend.  Self-contained output, no
/// external assets.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel,
          int width = 720, int height = 440);

  void add_series(const std::string& label, std::vector<Vec2> points,
                  const std::string& color, double stroke_width = 1.6,
                  bool dashed = false);
  void add_hline(double y, const std::string& color);
  void add_vline(double x, const std::string& color);

  /// Force the data range (otherwise computed from the series with padding).
  void set_xrange(double lo, double hi);
  void set_yrange(double lo, double hi);

  std::string render() const;
  void save(const std::string& path) const;

 private:
  struct Series {
    std::string label;
    std::vector<Vec2> pts;
    std::string color;
    double width;
    bool dashed;
  };
  std::string title_, xlabel_, ylabel_;
  int w_, h_;
  std::vector<Series> series_;
  std::vector<std::pair<double, std::string>> hlines_, vlines_;
  bool has_xrange_ = false, has_yrange_ = false;
  double xlo_ = 0, xhi_ = 1, ylo_ = 0, yhi_ = 1;
};

}  // namespace tslip
