#include "tslip/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tslip {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// ~n "nice" tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int n = 5) {
  const double span = hi - lo;
  if (!(span > 0.0) || !std::isfinite(span)) return {lo};
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel,
                 int width, int height)
    : title_(std::move(title)),
      xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)),
      w_(width),
      h_(height) {}

void SvgPlot::add_series(const std::string& label, std::vector<Vec2> points,
                         const std::string& color, double stroke_width,
                         bool dashed) {
  series_.push_back({label, std::move(points), color, stroke_width, dashed});
}

void SvgPlot::add_hline(double y, const std::string& color) {
  hlines_.emplace_back(y, color);
}

void SvgPlot::add_vline(double x, const std::string& color) {
  vlines_.emplace_back(x, color);
}

void SvgPlot::set_xrange(double lo, double hi) {
  xlo_ = lo;
  xhi_ = hi;
  has_xrange_ = true;
}

void SvgPlot::set_yrange(double lo, double hi) {
  ylo_ = lo;
  yhi_ = hi;
  has_yrange_ = true;
}

std::string SvgPlot::render() const {
  double xlo = xlo_, xhi = xhi_, ylo = ylo_, yhi = yhi_;
  if (!has_xrange_ || !has_yrange_) {
    double dxlo = std::numeric_limits<double>::infinity(), dxhi = -dxlo;
    double dylo = dxlo, dyhi = -dxlo;
    for (const Series& s : series_) {
      for (const Vec2& p : s.pts) {
        dxlo = std::min(dxlo, p.x);
        dxhi = std::max(dxhi, p.x);
        dylo = std::min(dylo, p.y);
        dyhi = std::max(dyhi, p.y);
      }
    }
    if (!std::isfinite(dxlo)) {
      dxlo = 0, dxhi = 1, dylo = 0, dyhi = 1;
    }
    if (dxhi - dxlo < 1e-12) dxhi = dxlo + 1.0;
    if (dyhi - dylo < 1e-12) dyhi = dylo + 1.0;
    const double px = 0.04 * (dxhi - dxlo), py = 0.06 * (dyhi - dylo);
    if (!has_xrange_) {
      xlo = dxlo - px;
      xhi = dxhi + px;
    }
    if (!has_yrange_) {
      ylo = dylo - py;
      yhi = dyhi + py;
    }
  }

  const double ml = 64, mr = 14, mt = 34, mb = 46;
  const double pw = w_ - ml - mr, ph = h_ - mt - mb;
  const auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
  const auto Y = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
      << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << ' ' << h_
      << "\">\n";
  svg << "<rect width=\"" << w_ << "\" height=\"" << h_
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w_ / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title_) << "</text>\n";

  // grid + ticks
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : ticks(xlo, xhi)) {
    const double px = X(t);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(mt) << "\" x2=\""
        << num(px) << "\" y2=\"" << num(mt + ph)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << num(mt + ph + 16)
        << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    const double py = Y(t);
    svg << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py) << "\" x2=\""
        << num(ml + pw) << "\" y2=\"" << num(py)
        << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  svg << "</g>\n";

  // reference lines
  for (const auto& [y, color] : hlines_) {
    if (y < ylo || y > yhi) continue;
    svg << "<line x1=\"" << num(ml) << "\" y1=\"" << num(Y(y)) << "\" x2=\""
        << num(ml + pw) << "\" y2=\"" << num(Y(y)) << "\" stroke=\"" << color
        << "\" stroke-width=\"1\" stroke-dasharray=\"5 3\"/>\n";
  }
  for (const auto& [x, color] : vlines_) {
    if (x < xlo || x > xhi) continue;
    svg << "<line x1=\"" << num(X(x)) << "\" y1=\"" << num(mt) << "\" x2=\""
        << num(X(x)) << "\" y2=\"" << num(mt + ph) << "\" stroke=\"" << color
        << "\" stroke-width=\"1\" stroke-dasharray=\"5 3\"/>\n";
  }

  // series (clipped to the plot area)
  svg << "<clipPath id=\"plot\"><rect x=\"" << num(ml) << "\" y=\"" << num(mt)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\"/></clipPath>\n";
  svg << "<g clip-path=\"url(#plot)\">\n";
  for (const Series& s : series_) {
    if (s.pts.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"" << num(s.width) << "\"";
    if (s.dashed) svg << " stroke-dasharray=\"6 3\"";
    svg << " points=\"";
    for (const Vec2& p : s.pts) {
      svg << num(X(p.x)) << ',' << num(Y(p.y)) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  // axes frame
  svg << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\""
      << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // axis labels
  svg << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(h_ - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << escape(xlabel_) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << num(mt + ph / 2) << ")\">" << escape(ylabel_) << "</text>\n";

  // legend
  double ly = mt + 12;
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    svg << "<line x1=\"" << num(ml + pw - 150) << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << num(ml + pw - 126) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6 3\"";
    svg << "/>\n";
    svg << "<text x=\"" << num(ml + pw - 120) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write " + path);
  out << render();
}

}  // namespace tslip
