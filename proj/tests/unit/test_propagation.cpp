#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "thermofrac/propagation.hpp"
#include "thermofrac/simulation.hpp"
#include "thermofrac/verify.hpp"

using namespace thermofrac;

TEST(Sif, ClosedFormExample) {
  // G = 1, nu = 0.25 (kappa = 2), r = 2 pi: sqrt(2 pi / r) G / (kappa + 1) = 1/3
  const double factor = sif_factor(1.0, 0.25, 2.0 * std::numbers::pi);
  EXPECT_NEAR(factor, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(factor * 3.0, 1.0, 1e-15);
}

TEST(Sif, SneddonIsLinearInPressure) {
  SneddonSetup s;
  s.h = 2.5;
  const auto r1 = run_sneddon(s);
  s.pressure *= 2.0;
  const auto r2 = run_sneddon(s);
  ASSERT_EQ(r1.sifs.size(), 2u);
  for (int t = 0; t < 2; ++t) {
    EXPECT_NEAR(r2.sifs[t].k_i / r1.sifs[t].k_i, 2.0, 1e-10);
  }
}

TEST(Sif, SymmetricCrackHasEqualTips) {
  SneddonSetup s;
  s.h = 2.5;
  const auto r = run_sneddon(s);
  ASSERT_EQ(r.sifs.size(), 2u);
  EXPECT_GT(r.sifs[0].k_i, 0.0);
  EXPECT_NEAR(r.sifs[0].k_i, r.sifs[1].k_i, 1e-10 * r.sifs[0].k_i);
  EXPECT_NEAR(r.sifs[0].k_ii, 0.0, 1e-10 * r.sifs[0].k_i);
  EXPECT_NEAR(r.sifs[0].r, r.sifs[1].r, 1e-14);
  EXPECT_NEAR(r.sifs[0].r, 1.25, 1e-14);
}

class SplitFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    SpeedSetup s;
    s.h = 1.0 / 8.0;
    problem = speed_problem(s);
    disc.build(problem);
    layout = DofLayout(problem.grid);
    x = initial_state(problem, layout);
    // open the left fracture so that its tip is supercritical
    const auto& fr = problem.grid.fractures[0];
    for (int lc = 0; lc < layout.mortar_cells(fr.interface_k); ++lc) {
      x(layout.w(fr.interface_k, lc, 1)) = -1e-3 * problem.grid.interfaces[fr.interface_k].normal.y();
    }
    problem.params.critical_sif = 1.0;
  }

  Problem problem;
  Discretization disc;
  DofLayout layout;
  Vec x;
};

TEST_F(SplitFixture, SplitAddsOneCellAndFlagsIt) {
  const int cells_before = problem.grid.fractures[0].grid.num_cells();
  const double p0 = problem.params.reference_pressure;
  const auto result = evaluate_and_propagate(problem, disc, layout, x);
  ASSERT_TRUE(result.grid_changed());
  ASSERT_EQ(result.events.size(), 1u);
  const auto& ev = result.events[0];
  EXPECT_EQ(ev.status, SplitStatus::kSplit);
  EXPECT_EQ(ev.fracture, 0);
  EXPECT_EQ(problem.grid.fractures[0].grid.num_cells(), cells_before + 1);
  EXPECT_NEAR(problem.grid.fractures[0].length(), 0.25 + 0.125, 1e-14);
  EXPECT_EQ(layout.size(), DofLayout::expected_size(problem.grid));
  EXPECT_EQ(x.size(), layout.size());
  EXPECT_TRUE(check_consistency(problem.grid).empty());
  EXPECT_NO_THROW(disc.check_current(problem.grid));

  const int nc = ev.new_fracture_cell;
  for (int lc = 0; lc < layout.fracture_cells(0); ++lc) {
    EXPECT_EQ(result.mass_correction[0][lc] != 0, lc == nc) << "cell " << lc;
  }
  EXPECT_DOUBLE_EQ(x(layout.pf(0, nc)), p0);
  EXPECT_DOUBLE_EQ(x(layout.tf(0, nc)), 0.0);
  EXPECT_DOUBLE_EQ(x(layout.lam(0, nc, 0)), 0.0);
  for (int ii : {problem.grid.fractures[0].interface_j, problem.grid.fractures[0].interface_k}) {
    EXPECT_DOUBLE_EQ(x(layout.eta(ii, nc)), 0.0);
  }
}

TEST_F(SplitFixture, MassCorrectionAddsResidualApertureStorage) {
  const auto result = evaluate_and_propagate(problem, disc, layout, x);
  ASSERT_TRUE(result.grid_changed());
  const int nc = result.events[0].new_fracture_cell;
  StepData step;
  step.dt = 7.0;
  step.x_prev = x;
  step.divu_prev = cell_divergence(problem, disc, layout, x);
  const auto regimes = classify_all(problem, layout, x, x);
  const auto plain = assemble(problem, disc, layout, x, step, regimes);
  step.mass_correction = result.mass_correction;
  const auto corrected = assemble(problem, disc, layout, x, step, regimes);
  Vec diff = corrected.residual - plain.residual;
  const double len = problem.grid.fractures[0].grid.cell_volumes[nc];
  EXPECT_NEAR(std::abs(diff(layout.pf(0, nc))), len * problem.params.residual_aperture / step.dt, 1e-15);
  diff(layout.pf(0, nc)) = 0.0;
  EXPECT_EQ(diff.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(SplitFixture, SubcriticalTipDoesNotSplit) {
  problem.params.critical_sif = 1e30;
  const int size = layout.size();
  const auto result = evaluate_and_propagate(problem, disc, layout, x);
  EXPECT_FALSE(result.grid_changed());
  EXPECT_EQ(layout.size(), size);
  EXPECT_EQ(result.sifs.size(), 2u);  // one tip per fracture
}

TEST(PropagationMonitor, WarnsOnConsecutiveSplitsOfTheSameTip) {
  PropagationMonitor mon;
  PropagationResult r1;
  PropagationEvent ev;
  ev.status = SplitStatus::kSplit;
  ev.fracture = 0;
  ev.tip_face = 3;
  ev.new_tip_face = 7;
  r1.events.push_back(ev);
  EXPECT_TRUE(mon.check(10.0, 1.0, 0.1, r1).empty());
  PropagationResult r2;
  ev.tip_face = 7;
  ev.new_tip_face = 9;
  r2.events.push_back(ev);
  const auto w = mon.check(11.0, 1.0, 0.1, r2);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("an upper bound on the time step must be honoured"), std::string::npos);
  PropagationResult r3;
  EXPECT_TRUE(mon.check(12.0, 1.0, 0.1, r3).empty());
}

TEST(PropagationLog, CsvHasOneRowPerTip) {
  PropagationLog log;
  PropagationResult r;
  SifEstimate s;
  s.fracture = 1;
  s.tip_face = 4;
  s.k_i = 2.5;
  r.sifs.push_back(s);
  log.record(3.0, r);
  std::ostringstream os;
  log.write_csv(os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,fracture,tip_face,k_i,k_ii,action");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}
