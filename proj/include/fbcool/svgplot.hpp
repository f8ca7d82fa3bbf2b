#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbcool/types.hpp"

namespace fbcool {

struct PlotSeries {
  std::string label;
  ArrayXr x;
  ArrayXr y;
  ArrayXr band;  // half-width of the dotted band around y; empty disables it
};

struct PlotSpec {
  std::string title;
  std::string x_label = "tau";
  std::string y_label = "mean energy";
  int width = 880;
  int height = 560;
};

// Vector line plot: solid mean per series, dotted y +- band, axes with ticks
// and a legend. Colors cycle through a fixed palette.
void write_svg_plot(std::ostream& os, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

}  // namespace fbcool
