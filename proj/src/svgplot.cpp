#include "fbcool/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fbcool {

namespace {

const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c",
                         "#000000", "#17becf", "#e377c2"};
constexpr int n_palette = 6;

struct Axis {
  double lo = 0.0, hi = 1.0;
  double tick = 1.0;

  double span() const { return hi - lo; }
};

Axis nice_axis(double lo, double hi) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  Axis a;
  a.lo = std::floor(lo / step) * step;
  a.hi = std::ceil(hi / step) * step;
  a.tick = step;
  return a;
}

std::string trim_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_svg_plot(std::ostream& os, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("svg plot: no series");

  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || s.x.size() < 2)
      throw std::invalid_argument("svg plot: series needs matching x/y, >= 2 points");
    x_lo = std::min(x_lo, s.x.minCoeff());
    x_hi = std::max(x_hi, s.x.maxCoeff());
    const ArrayXr lo = s.band.size() ? ArrayXr(s.y - s.band) : s.y;
    const ArrayXr hi = s.band.size() ? ArrayXr(s.y + s.band) : s.y;
    y_lo = std::min(y_lo, lo.minCoeff());
    y_hi = std::max(y_hi, hi.maxCoeff());
  }
  const Axis ax = nice_axis(x_lo, x_hi);
  const Axis ay = nice_axis(y_lo, y_hi);

  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;
  auto px = [&](double x) { return ml + (x - ax.lo) / ax.span() * pw; };
  auto py = [&](double y) { return mt + (ay.hi - y) / ay.span() * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
     << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width
     << ' ' << spec.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // frame and ticks
  os << "<g stroke=\"#444\" fill=\"none\" stroke-width=\"1\">\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
     << "\" height=\"" << ph << "\"/>\n";
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  for (double t = ax.lo; t <= ax.hi + 0.5 * ax.tick; t += ax.tick) {
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x
       << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
       << "\" text-anchor=\"middle\">" << trim_number(t) << "</text>\n";
  }
  for (double t = ay.lo; t <= ay.hi + 0.5 * ay.tick; t += ay.tick) {
    const double y = py(t);
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << y << "\" x2=\"" << ml
       << "\" y2=\"" << y << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << ml - 9 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\">" << trim_number(t) << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 12
     << "\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << mt + ph / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
     << ")\">" << spec.y_label << "</text>\n";
  if (!spec.title.empty())
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-size=\"15\">" << spec.title << "</text>\n";
  os << "</g>\n";

  auto polyline = [&](const ArrayXr& x, const ArrayXr& y, const char* color,
                      bool dotted) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << (dotted ? "1" : "1.8") << '"';
    if (dotted) os << " stroke-dasharray=\"2,4\"";
    os << " points=\"";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      os << px(x[i]) << ',' << py(y[i]);
      if (i + 1 < x.size()) os << ' ';
    }
    os << "\"/>\n";
  };

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % n_palette];
    if (series[s].band.size()) {
      polyline(series[s].x, series[s].y + series[s].band, color, true);
      polyline(series[s].x, series[s].y - series[s].band, color, true);
    }
    polyline(series[s].x, series[s].y, color, false);
  }

  // legend
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = mt + 12;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = ml + pw - 150;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24
       << "\" y2=\"" << ly - 4 << "\" stroke=\"" << palette[s % n_palette]
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << series[s].label
       << "</text>\n";
    ly += 18;
  }
  os << "</g>\n</svg>\n";
}

}  // namespace fbcool
