#include "fbcool/figures.hpp"

#include <stdexcept>

namespace fbcool {

namespace {

RunConfig base_run(std::uint64_t seed) {
  RunConfig c;
  c.grid = GridSpec{512, 40.0};
  c.kernel.w = 3000.0;
  c.kernel.method = KernelMethod::gaussian;
  c.kernel.n_kappa = 64;
  c.kernel.quad_tol = 1e-10;
  c.dt = 1e-3;
  // the weakest-measurement series approach the common plateau slowly;
  // give them room to converge
  c.tau_max = 150.0;
  c.sample_stride = 0.05;
  c.init_center = 2.0;
  c.init_sigma2 = 0.5;
  c.rep = MeasurementRep::fourier;
  c.seed = seed;
  return c;
}

std::string trim_label(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

FigurePreset figure_preset_from_name(const std::string& name) {
  if (name == "fig2") return FigurePreset::fig2;
  if (name == "fig3") return FigurePreset::fig3;
  if (name == "fig4") return FigurePreset::fig4;
  throw ConfigError("unknown figure preset '" + name + "'");
}

const char* figure_preset_name(FigurePreset preset) {
  switch (preset) {
    case FigurePreset::fig2: return "fig2";
    case FigurePreset::fig3: return "fig3";
    case FigurePreset::fig4: return "fig4";
  }
  return "?";
}

std::vector<FigureSeries> figure_series(FigurePreset preset, FigureScale scale,
                                        std::uint64_t base_seed) {
  const bool desk = scale == FigureScale::desk;
  std::vector<FigureSeries> out;
  std::uint64_t seed = base_seed;

  switch (preset) {
    case FigurePreset::fig2: {
      const std::vector<double> alphas =
          desk ? std::vector<double>{2.0, 20.0, 160.0}
               : std::vector<double>{2.0, 10.0, 20.0, 40.0, 80.0, 160.0};
      for (double a : alphas) {
        RunConfig c = base_run(seed++);
        c.alpha_tilde = a;
        c.eta = 6.0;
        // the weak integrator bias of the plateau grows with alpha~; this
        // sweep compares plateaus across two orders of magnitude in alpha~,
        // so it runs at half the default step
        c.dt = 5e-4;
        c.control.c = {2.0, 0.0, 0.0, 0.0};
        c.paths = desk ? 100 : 500;
        out.push_back({"alpha=" + trim_label(a), c});
      }
      break;
    }
    case FigurePreset::fig3: {
      const std::vector<double> etas = desk ? std::vector<double>{4.0, 8.0}
                                            : std::vector<double>{4.0, 6.0, 8.0, 10.0};
      for (double e : etas) {
        RunConfig c = base_run(seed++);
        c.alpha_tilde = 10.0;
        c.eta = e;
        c.control.c = {2.0, 0.0, 0.0, 0.0};
        c.paths = desk ? 100 : 500;
        out.push_back({"eta=" + trim_label(e), c});
      }
      break;
    }
    case FigurePreset::fig4: {
      const std::vector<std::pair<std::string, std::array<double, 4>>> sets = {
          {"x", {2.0, 0.0, 0.0, 0.0}},
          {"x,x^2", {2.0, 2.0, 0.0, 0.0}},
          {"x,x^2,x^3", {2.0, 2.0, 2.0, 0.0}},
      };
      for (const auto& [label, gains] : sets) {
        RunConfig c = base_run(seed++);
        c.alpha_tilde = 2.0;
        c.eta = 8.0;
        // the higher-order gains transiently soften the trap; tails travel
        // far before the filter re-collapses them, so this preset needs the
        // enlarged box (same resolution as the default grid)
        c.grid = GridSpec{1024, 80.0};
        c.control.c = gains;
        c.paths = desk ? 50 : 100;
        out.push_back({label, c});
      }
      break;
    }
  }
  return out;
}

}  // namespace fbcool
