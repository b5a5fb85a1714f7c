#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "thermofrac/verify.hpp"

using namespace thermofrac;

TEST(Sneddon, AnalyticFactor) {
  EXPECT_NEAR(sneddon_k_i(1e-4, 10.0), 1e-4 * std::sqrt(10.0 * std::numbers::pi), 1e-18);
}

TEST(Sneddon, ErrorMetricExamples) {
  const double k = 2.0;
  EXPECT_DOUBLE_EQ(sif_error({k, k}, k, k), 0.0);
  // one tip off by delta
  EXPECT_NEAR(sif_error({k, k + 0.1}, k, k), 0.1 / (2.0 * k), 1e-15);
  // K_II error is normalised with K_I,an
  EXPECT_NEAR(sif_error({0.3, -0.4}, 0.0, k), 0.5 / (2.0 * k), 1e-15);
}

TEST(Sneddon, MeshSizesHalve) {
  const auto h = sneddon_mesh_sizes(4);
  ASSERT_EQ(h.size(), 4u);
  EXPECT_DOUBLE_EQ(h[0], 1.25);
  EXPECT_DOUBLE_EQ(h[3], 1.25 / 8.0);
}

TEST(Sneddon, ClosedCrackIsRejected) {
  SneddonSetup s;
  s.h = 2.5;
  s.pressure = -1e-4;
  EXPECT_THROW(run_sneddon(s), std::runtime_error);
}

TEST(Sneddon, ReferenceFileUsesFinestMesh) {
  std::istringstream in("h,nu,error_i,error_ii\n0.5,0.2,0.3,0\n0.25,0.2,0.1,0\n1,0.2,0.9,0\n0.5,0.4,0.7,0\n");
  const auto ref = read_sneddon_reference(in);
  ASSERT_EQ(ref.size(), 2u);
  EXPECT_DOUBLE_EQ(ref.at(0.2), 0.1);
  EXPECT_DOUBLE_EQ(ref.at(0.4), 0.7);
}

TEST(Sneddon, StoredReferenceCoversAllRatios) {
  std::ifstream in(std::string(THERMOFRAC_TEST_DATA_DIR) + "/sneddon_reference.csv");
  ASSERT_TRUE(in.good());
  const auto ref = read_sneddon_reference(in);
  for (double nu : sneddon_poisson_ratios()) {
    ASSERT_TRUE(ref.count(nu)) << nu;
    EXPECT_GT(ref.at(nu), 0.0);
    EXPECT_LT(ref.at(nu), 1.0);
  }
}

TEST(Sneddon, ChecksFlagEachProperty) {
  auto make = [](double h, double nu, double ei, double eii) {
    SneddonResult r;
    r.setup.h = h;
    r.setup.poisson_ratio = nu;
    r.error_i = ei;
    r.error_ii = eii;
    return r;
  };
  std::map<double, double> ref{{0.2, 0.1}};
  auto c = check_sneddon({make(1, 0.2, 0.11, 0.0), make(0.5, 0.2, 0.1, 0.0)}, ref);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_TRUE(all_pass(c));
  c = check_sneddon({make(1, 0.2, 0.11, 0.02), make(0.5, 0.2, 0.1, 0.0)}, ref);
  EXPECT_FALSE(c[0].pass);
  c = check_sneddon({make(1, 0.2, 0.2, 0.0), make(0.5, 0.2, 0.09, 0.0)}, ref);
  EXPECT_FALSE(c[1].pass);
  EXPECT_FALSE(c[2].pass);
}

namespace {

SpeedRun synthetic_run(double h, double dt, double onset, int splits, double t_end) {
  SpeedRun r;
  r.h = h;
  r.dt = dt;
  double len = 0.25;
  int grown = 0;
  r.size.emplace_back(0.0, len);
  for (double t = dt; t <= t_end + 1e-9; t += dt) {
    if (t >= onset && grown < splits) {
      len += h;
      ++grown;
    }
    r.size.emplace_back(t, len);
  }
  analyse_speed_run(r);
  return r;
}

}  // namespace

TEST(SpeedStudy, OnsetAndSlopeOfSteadyGrowth) {
  const auto r = synthetic_run(0.1, 10.0, 50.0, 4, 200.0);
  EXPECT_FALSE(r.inconclusive);
  EXPECT_DOUBLE_EQ(r.onset_time, 50.0);
  EXPECT_EQ(r.splits, 4);
  // one face per step from t = 40 to t = 80
  EXPECT_NEAR(r.mean_speed, 0.01, 1e-12);
}

TEST(SpeedStudy, NoGrowthIsInconclusive) {
  const auto r = synthetic_run(0.1, 10.0, 1e9, 4, 200.0);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_EQ(r.splits, 0);
}

TEST(SpeedStudy, ChecksOnConsistentMatrix) {
  std::vector<SpeedRun> runs;
  // speed 1e-3: h = 0.1 needs 100 s per face, h = 0.2 needs 200 s; only dt = 400 is too coarse
  for (double h : {0.2, 0.1}) {
    for (double dt : {400.0, 50.0, 25.0}) {
      const double onset = (h > 0.15 ? 1000.0 : 1100.0);
      SpeedRun r;
      r.h = h;
      r.dt = dt;
      double len = 0.25;
      r.size.emplace_back(0.0, len);
      double next = std::ceil(onset / dt) * dt;
      for (double t = dt; t <= 3000.0 + 1e-9; t += dt) {
        if (t >= next - 1e-9) {
          len += h;
          next = std::max(t + dt, t + h / 1e-3);
        }
        r.size.emplace_back(t, len);
      }
      analyse_speed_run(r);
      r.resolution_warnings = dt == 400.0 ? 3 : 0;
      runs.push_back(r);
    }
  }
  const auto checks = check_speed_study(runs);
  ASSERT_EQ(checks.size(), 4u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << c.detail;

  runs[5].onset_time = runs[2].onset_time - 25.0;  // finer mesh earlier at the smallest dt
  EXPECT_FALSE(check_speed_study(runs)[2].pass);
}

TEST(SpeedStudy, MissingWarningFailsResolutionCheck) {
  std::vector<SpeedRun> runs{synthetic_run(0.1, 100.0, 500.0, 5, 1500.0), synthetic_run(0.1, 10.0, 500.0, 5, 1500.0),
                             synthetic_run(0.2, 100.0, 400.0, 5, 1500.0), synthetic_run(0.2, 10.0, 400.0, 5, 1500.0)};
  const auto checks = check_speed_study(runs);
  EXPECT_FALSE(checks[3].pass);
}

TEST(SpeedStudy, CsvRows) {
  const auto r = synthetic_run(0.1, 10.0, 20.0, 1, 30.0);
  std::ostringstream os;
  write_speed_csv(os, {r});
  EXPECT_EQ(os.str(), "h,dt,t,size\n0.1,10,0,0.25\n0.1,10,10,0.25\n0.1,10,20,0.35\n0.1,10,30,0.35\n");
}
