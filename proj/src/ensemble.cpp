#include "fbcool/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fbcool/csv.hpp"

namespace fbcool {

EnsembleStats aggregate_stats(const std::vector<TrajectoryRecord>& records,
                              int n_requested) {
  EnsembleStats stats;
  stats.n_requested = n_requested;
  Eigen::Index n_samples = -1;
  for (const auto& rec : records) {
    switch (rec.status) {
      case PathStatus::completed:
        ++stats.n_completed;
        if (n_samples < 0) n_samples = rec.samples();
        break;
      case PathStatus::overflowed:
        ++stats.n_overflowed;
        break;
      case PathStatus::failed:
        ++stats.n_failed;
        break;
    }
  }
  const int bad = stats.n_overflowed + stats.n_failed;
  if (bad > 0.1 * n_requested) {
    stats.valid = false;
    stats.invalid_reason = "more than 10% of paths failed or overflowed";
  }
  if (stats.n_completed < 2) {
    stats.valid = false;
    stats.invalid_reason = "fewer than 2 completed paths";
    return stats;
  }

  stats.tau = ArrayXr::Zero(n_samples);
  stats.mean_energy = ArrayXr::Zero(n_samples);
  stats.stderr_energy = ArrayXr::Zero(n_samples);
  for (const auto& rec : records) {
    if (rec.status != PathStatus::completed) continue;
    stats.tau = rec.tau;  // all completed paths share the sample grid
    stats.mean_energy += rec.energy;
  }
  stats.mean_energy /= stats.n_completed;
  for (const auto& rec : records) {
    if (rec.status != PathStatus::completed) continue;
    stats.stderr_energy += (rec.energy - stats.mean_energy).square();
  }
  const double n = stats.n_completed;
  stats.stderr_energy = (stats.stderr_energy / (n - 1.0) / n).sqrt();
  return stats;
}

std::pair<EnsembleStats, std::vector<TrajectoryRecord>> run_ensemble(
    const TrajectoryConfig& config, int paths, int workers) {
  config.validate();
  if (paths < 2) throw std::domain_error("run_ensemble: paths must be >= 2");
  if (workers < 1) workers = 1;
  workers = std::min(workers, paths);

  std::vector<TrajectoryRecord> records(paths);
  if (workers == 1) {
    SseIntegrator integrator(config.grid, config.dynamics, config.law);
    for (int i = 0; i < paths; ++i)
      records[i] = run_trajectory_with(integrator, config, i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      SseIntegrator integrator(config.grid, config.dynamics, config.law);
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= paths) break;
        records[i] = run_trajectory_with(integrator, config, i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return {aggregate_stats(records, paths), std::move(records)};
}

SteadyStateSummary steady_state(const EnsembleStats& stats,
                                double window_width, double slope_tol) {
  SteadyStateSummary out;
  out.window_width = window_width;
  out.slope_tol = slope_tol;
  const Eigen::Index n = stats.tau.size();
  if (n < 4) throw std::domain_error("steady_state: series too short");
  const double stride = stats.tau[1] - stats.tau[0];
  const Eigen::Index win = static_cast<Eigen::Index>(std::round(window_width / stride)) + 1;
  if (win < 3 || win > n / 2)
    throw std::domain_error("steady_state: need at least 2 windows in range");

  const Eigen::Index last_start = n - win;
  std::vector<bool> flat(last_start + 1);
  for (Eigen::Index i = 0; i <= last_start; ++i) {
    // least-squares slope over the window
    double st = 0.0, se = 0.0, stt = 0.0, ste = 0.0;
    for (Eigen::Index j = i; j < i + win; ++j) {
      st += stats.tau[j];
      se += stats.mean_energy[j];
    }
    const double tbar = st / win;
    const double ebar = se / win;
    for (Eigen::Index j = i; j < i + win; ++j) {
      stt += (stats.tau[j] - tbar) * (stats.tau[j] - tbar);
      ste += (stats.tau[j] - tbar) * (stats.mean_energy[j] - ebar);
    }
    const double slope = ste / stt;
    flat[i] = std::abs(slope) < slope_tol * std::max(std::abs(ebar), 1e-12);
  }

  Eigen::Index onset = -1;
  for (Eigen::Index i = last_start; i >= 0; --i) {
    if (!flat[i]) break;
    onset = i;
  }
  if (onset < 0) return out;  // not reached

  out.reached = true;
  out.tau_onset = stats.tau[onset];
  double esum = 0.0, ssum = 0.0;
  const Eigen::Index count = n - onset;
  for (Eigen::Index j = onset; j < n; ++j) {
    esum += stats.mean_energy[j];
    ssum += stats.stderr_energy[j];
  }
  out.energy = esum / count;
  out.energy_stderr = ssum / count;
  return out;
}

void write_stats_csv(std::ostream& os, const EnsembleStats& stats) {
  os << "tau,mean_energy,stderr\n";
  for (Eigen::Index i = 0; i < stats.tau.size(); ++i)
    os << format_g17(stats.tau[i]) << ',' << format_g17(stats.mean_energy[i])
       << ',' << format_g17(stats.stderr_energy[i]) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void read_stats_csv(std::istream& is, EnsembleStats& stats) {
  std::string line;
  if (!std::getline(is, line) || line != "tau,mean_energy,stderr")
    throw std::runtime_error("stats.csv: missing or malformed header");
  std::vector<double> tau, mean, err;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string ctx = "stats.csv line " + std::to_string(line_no);
    if (fields.size() != 3)
      throw std::runtime_error(ctx + ": expected 3 fields");
    tau.push_back(parse_double(fields[0], ctx + " field tau"));
    mean.push_back(parse_double(fields[1], ctx + " field mean_energy"));
    err.push_back(parse_double(fields[2], ctx + " field stderr"));
  }
  stats.tau = Eigen::Map<ArrayXr>(tau.data(), tau.size());
  stats.mean_energy = Eigen::Map<ArrayXr>(mean.data(), mean.size());
  stats.stderr_energy = Eigen::Map<ArrayXr>(err.data(), err.size());
}

void write_path_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "tau,energy,x,p,norm_deficit\n";
  for (Eigen::Index i = 0; i < record.samples(); ++i)
    os << format_g17(record.tau[i]) << ',' << format_g17(record.energy[i])
       << ',' << format_g17(record.x[i]) << ',' << format_g17(record.p[i])
       << ',' << format_g17(record.norm_deficit[i]) << '\n';
}

void read_path_csv(std::istream& is, TrajectoryRecord& record) {
  std::string line;
  if (!std::getline(is, line) || line != "tau,energy,x,p,norm_deficit")
    throw std::runtime_error("path csv: missing or malformed header");
  std::vector<double> tau, energy, x, p, deficit;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string ctx = "path csv line " + std::to_string(line_no);
    if (fields.size() != 5)
      throw std::runtime_error(ctx + ": expected 5 fields");
    tau.push_back(parse_double(fields[0], ctx + " field tau"));
    energy.push_back(parse_double(fields[1], ctx + " field energy"));
    x.push_back(parse_double(fields[2], ctx + " field x"));
    p.push_back(parse_double(fields[3], ctx + " field p"));
    deficit.push_back(parse_double(fields[4], ctx + " field norm_deficit"));
  }
  record.tau = Eigen::Map<ArrayXr>(tau.data(), tau.size());
  record.energy = Eigen::Map<ArrayXr>(energy.data(), energy.size());
  record.x = Eigen::Map<ArrayXr>(x.data(), x.size());
  record.p = Eigen::Map<ArrayXr>(p.data(), p.size());
  record.norm_deficit = Eigen::Map<ArrayXr>(deficit.data(), deficit.size());
}

}  // namespace fbcool
