#pragma once

#include <string>
#include <vector>

#include "fbcool/config.hpp"

namespace fbcool {

enum class FigurePreset { fig2, fig3, fig4 };
enum class FigureScale { full, desk };

struct FigureSeries {
  std::string label;
  RunConfig config;
};

FigurePreset figure_preset_from_name(const std::string& name);
const char* figure_preset_name(FigurePreset preset);

// Experiment families behind the energy-relaxation figures:
//   fig2: sweep of the measurement strength at eta = 6, c1 = 2, w = 3000;
//   fig3: sweep of the Lamb-Dicke parameter at alpha~ = 10, c1 = 2;
//   fig4: control sets {x}, {x,x^2}, {x,x^2,x^3} at alpha~ = 2, eta = 8,
//         all gains 2.
// Full scale uses the 500-path (fig2/fig3) and 100-path (fig4) ensembles;
// desk scale trims to 100/100/50 paths and halves the swept lists.
std::vector<FigureSeries> figure_series(FigurePreset preset, FigureScale scale,
                                        std::uint64_t base_seed);

}  // namespace fbcool
