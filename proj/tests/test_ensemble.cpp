#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fbcool/ensemble.hpp"

using namespace fbcool;

namespace {

KernelTable production_table() {
  KernelConfig kc;
  kc.w = 3000.0;
  kc.n_kappa = 64;
  kc.quad_tol = 1e-10;
  return tabulate_kernel(kc);
}

TrajectoryConfig small_config(double alpha, double tau_max) {
  TrajectoryConfig cfg;
  cfg.grid = GridSpec{128, 24.0};
  cfg.dynamics =
      DynamicsParams{alpha, 2.0, production_table(), 1e-3, MeasurementRep::fourier};
  cfg.tau_max = tau_max;
  cfg.sample_stride = 0.05;
  cfg.init_center = 2.0;
  cfg.init_sigma2 = 0.5;
  cfg.seed = 4242;
  return cfg;
}

TrajectoryRecord synthetic_record(std::uint64_t index, PathStatus status,
                                  int samples) {
  TrajectoryRecord r;
  r.index = index;
  r.status = status;
  r.tau = ArrayXr::LinSpaced(samples, 0.0, 0.05 * (samples - 1));
  r.energy = ArrayXr::Constant(samples, 1.0 + 0.01 * index);
  r.x = ArrayXr::Zero(samples);
  r.p = ArrayXr::Zero(samples);
  r.norm_deficit = ArrayXr::Zero(samples);
  return r;
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("deterministic ensemble: constant mean, zero spread") {
    TrajectoryConfig cfg = small_config(0.0, 1.0);
    auto [stats, records] = run_ensemble(cfg, 4, 1);
    REQUIRE(stats.valid);
    for (Eigen::Index i = 0; i < stats.tau.size(); ++i) {
      CHECK(stats.mean_energy[i] == doctest::Approx(2.5).epsilon(1e-6));
      CHECK(stats.stderr_energy[i] < 1e-12);
    }
  }

  TEST_CASE("standard error scales like 1/sqrt(N)") {
    std::vector<int> sizes{25, 100, 400};
    std::vector<double> spread;
    for (int n : sizes) {
      TrajectoryConfig cfg = small_config(1.0, 0.5);
      auto [stats, records] = run_ensemble(cfg, n, 1);
      REQUIRE(stats.valid);
      // use the late-time stderr, averaged over the last few samples
      double s = 0.0;
      for (Eigen::Index i = stats.tau.size() - 3; i < stats.tau.size(); ++i)
        s += stats.stderr_energy[i];
      spread.push_back(s / 3.0);
    }
    const double exponent = std::log(spread[2] / spread[0]) /
                            std::log(double(sizes[2]) / sizes[0]);
    CHECK(exponent == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(spread[0] / spread[2] == doctest::Approx(4.0).epsilon(0.35));
  }

  TEST_CASE("bit-identical aggregation for any worker count") {
    TrajectoryConfig cfg = small_config(1.0, 0.5);
    auto [s1, r1] = run_ensemble(cfg, 8, 1);
    auto [s4, r4] = run_ensemble(cfg, 8, 4);
    REQUIRE(s1.tau.size() == s4.tau.size());
    for (Eigen::Index i = 0; i < s1.tau.size(); ++i) {
      CHECK(s1.mean_energy[i] == s4.mean_energy[i]);
      CHECK(s1.stderr_energy[i] == s4.stderr_energy[i]);
    }
    for (int p = 0; p < 8; ++p)
      for (Eigen::Index i = 0; i < r1[p].samples(); ++i)
        CHECK(r1[p].energy[i] == r4[p].energy[i]);
  }

  TEST_CASE("failure accounting and the 10% validity rule") {
    std::vector<TrajectoryRecord> records;
    for (int i = 0; i < 9; ++i)
      records.push_back(synthetic_record(i, PathStatus::completed, 21));
    records.push_back(synthetic_record(9, PathStatus::overflowed, 5));
    records.push_back(synthetic_record(10, PathStatus::failed, 3));
    EnsembleStats stats = aggregate_stats(records, 11);
    CHECK(stats.n_completed == 9);
    CHECK(stats.n_overflowed == 1);
    CHECK(stats.n_failed == 1);
    CHECK(stats.n_completed + stats.n_overflowed + stats.n_failed == 11);
    CHECK(!stats.valid);  // 2 of 11 > 10%

    for (int i = 11; i < 30; ++i)
      records.push_back(synthetic_record(i, PathStatus::completed, 21));
    stats = aggregate_stats(records, 30);
    CHECK(stats.valid);  // 2 of 30 <= 10%
    CHECK(stats.n_completed == 28);
  }

  TEST_CASE("steady-state detector on synthetic series") {
    EnsembleStats stats;
    const int n = 601;
    stats.tau = ArrayXr::LinSpaced(n, 0.0, 30.0);
    stats.stderr_energy = ArrayXr::Constant(n, 0.01);
    stats.n_completed = 100;
    stats.n_requested = 100;

    // exponential relaxation toward 0.5
    stats.mean_energy = 0.5 + 2.0 * (-stats.tau).exp();
    SteadyStateSummary ss = steady_state(stats, 2.0, 0.02);
    CHECK(ss.reached);
    CHECK(ss.tau_onset > 3.0);
    CHECK(ss.tau_onset < 8.0);
    CHECK(ss.energy == doctest::Approx(0.5).epsilon(0.02));

    // strict linear growth never flattens
    stats.mean_energy = 1.0 + 0.2 * stats.tau;
    ss = steady_state(stats, 2.0, 0.02);
    CHECK(!ss.reached);

    // constant series is flat from the first window
    stats.mean_energy = ArrayXr::Constant(n, 0.75);
    ss = steady_state(stats, 2.0, 0.02);
    CHECK(ss.reached);
    CHECK(ss.tau_onset == 0.0);
    CHECK(ss.energy == doctest::Approx(0.75));
  }

  TEST_CASE("csv round trips are exact") {
    TrajectoryConfig cfg = small_config(1.0, 0.25);
    const TrajectoryRecord rec = run_trajectory(cfg, 0);
    std::stringstream ss;
    write_path_csv(ss, rec);
    TrajectoryRecord back;
    read_path_csv(ss, back);
    REQUIRE(back.samples() == rec.samples());
    for (Eigen::Index i = 0; i < rec.samples(); ++i) {
      CHECK(back.tau[i] == rec.tau[i]);
      CHECK(back.energy[i] == rec.energy[i]);
      CHECK(back.x[i] == rec.x[i]);
      CHECK(back.p[i] == rec.p[i]);
      CHECK(back.norm_deficit[i] == rec.norm_deficit[i]);
    }

    auto [stats, records] = run_ensemble(cfg, 4, 1);
    std::stringstream s2;
    write_stats_csv(s2, stats);
    EnsembleStats stats_back;
    read_stats_csv(s2, stats_back);
    for (Eigen::Index i = 0; i < stats.tau.size(); ++i) {
      CHECK(stats_back.tau[i] == stats.tau[i]);
      CHECK(stats_back.mean_energy[i] == stats.mean_energy[i]);
      CHECK(stats_back.stderr_energy[i] == stats.stderr_energy[i]);
    }
  }

  TEST_CASE("malformed csv input is rejected with context") {
    std::stringstream bad_header("tau,energy\n0,1\n");
    TrajectoryRecord rec;
    CHECK_THROWS_WITH_AS(read_path_csv(bad_header, rec),
                         doctest::Contains("header"), std::runtime_error);

    std::stringstream bad_field("tau,mean_energy,stderr\n0,oops,0\n");
    EnsembleStats stats;
    CHECK_THROWS_WITH_AS(read_stats_csv(bad_field, stats),
                         doctest::Contains("line 2"), std::runtime_error);

    std::stringstream missing_col("tau,mean_energy,stderr\n0,1\n");
    CHECK_THROWS_WITH_AS(read_stats_csv(missing_col, stats),
                         doctest::Contains("3 fields"), std::runtime_error);
  }
}
