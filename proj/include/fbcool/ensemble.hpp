#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "fbcool/dynamics.hpp"

namespace fbcool {

struct EnsembleStats {
  ArrayXr tau;
  ArrayXr mean_energy;
  ArrayXr stderr_energy;  // sigma / sqrt(N) over completed paths
  int n_requested = 0;
  int n_completed = 0;
  int n_overflowed = 0;
  int n_failed = 0;
  bool valid = true;
  std::string invalid_reason;
};

// Mean and standard error over completed paths only, accumulated in index
// order so the result is bit-identical for any worker count. More than 10%
// failed/overflowed paths marks the run invalid.
EnsembleStats aggregate_stats(const std::vector<TrajectoryRecord>& records,
                              int n_requested);

std::pair<EnsembleStats, std::vector<TrajectoryRecord>> run_ensemble(
    const TrajectoryConfig& config, int paths, int workers);

struct SteadyStateSummary {
  bool reached = false;
  double tau_onset = -1.0;
  double energy = 0.0;
  double energy_stderr = 0.0;  // mean stderr over the plateau (samples within
                               // a path are autocorrelated; no 1/sqrt(T) gain)
  double window_width = 0.0;
  double slope_tol = 0.0;
};

// Earliest sliding window whose fitted slope satisfies
// |slope| < slope_tol * mean and stays so for every later window; the plateau
// value is the mean from that onset to the end of the series.
SteadyStateSummary steady_state(const EnsembleStats& stats,
                                double window_width = 2.0,
                                double slope_tol = 0.02);

// stats.csv: columns tau,mean_energy,stderr (17 significant digits, LF).
void write_stats_csv(std::ostream& os, const EnsembleStats& stats);
void read_stats_csv(std::istream& is, EnsembleStats& stats);

// paths/NNNN.csv: columns tau,energy,x,p,norm_deficit.
void write_path_csv(std::ostream& os, const TrajectoryRecord& record);
void read_path_csv(std::istream& is, TrajectoryRecord& record);

}  // namespace fbcool
