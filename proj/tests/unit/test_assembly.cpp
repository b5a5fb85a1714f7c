#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermofrac/assembly.hpp"
#include "thermofrac/simulation.hpp"
#include "thermofrac/verify.hpp"

using namespace thermofrac;

namespace {

// Perturbation of every unknown around the reference state with a prescribed
// normal jump on every fracture cell. Fracture pressure and temperature are
// uniform and equal to the fracture end values, so the lagged aperture
// dependence of the fracture transmissibilities multiplies zero gradients.
Vec perturbed_state(const Problem& p, const DofLayout& L, double jump_n) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x = initial_state(p, L);
  for (int c = 0; c < L.num_cells(); ++c) {
    x(L.u(c, 0)) += 1e-6 * u(rng);
    x(L.u(c, 1)) += 1e-6 * u(rng);
    x(L.pm(c)) += 1e5 * u(rng);
    x(L.tm(c)) += 5.0 * u(rng);
  }
  for (int fi = 0; fi < L.num_fractures(); ++fi) {
    const auto& fr = p.grid.fractures[fi];
    for (int lc = 0; lc < L.fracture_cells(fi); ++lc) {
      x(L.pf(fi, lc)) = p.fracture_ends[fi].pressure;
      x(L.tf(fi, lc)) = p.fracture_ends[fi].temperature;
      x(L.lam(fi, lc, 0)) = jump_n > 0.0 ? 0.0 : -1e5;
      x(L.lam(fi, lc, 1)) = jump_n > 0.0 ? 0.0 : 3e4 * u(rng);
    }
    const auto& ik = p.grid.interfaces[fr.interface_k];
    for (int i = 0; i < ik.num_cells(); ++i) {
      const Vec2 w = jump_n * fr.normal + 1e-6 * u(rng) * fr.tangent;
      x(L.w(fr.interface_k, i, 0)) = w.x();
      x(L.w(fr.interface_k, i, 1)) = w.y();
    }
  }
  for (int ii = 0; ii < L.num_interfaces(); ++ii) {
    for (int lc = 0; lc < L.mortar_cells(ii); ++lc) {
      x(L.eta(ii, lc)) = 1e-9 * u(rng);
      x(L.qc(ii, lc)) = 1e-3 * u(rng);
      x(L.qa(ii, lc)) = 1e-3 * u(rng);
    }
  }
  return x;
}

double step_size(VarClass c) {
  switch (c) {
    case VarClass::kDisplacement:
    case VarClass::kMortarDisplacement: return 1e-12;
    case VarClass::kPressure: return 1e-2;
    case VarClass::kTemperature: return 1e-6;
    case VarClass::kContact: return 1e-2;
    case VarClass::kFlux: return 1e-13;
  }
  return 1e-8;
}

struct FdResult {
  double worst = 0.0;
  int row = -1;
  int col = -1;
};

/// Largest row-scaled difference between the Jacobian and central differences
/// of the residual, skipping the (row, column) pairs rejected by `skip`.
template <class Skip>
FdResult compare_with_fd(const Problem& p, const DofLayout& L, const Vec& x, Skip skip) {
  Discretization disc;
  disc.build(p);
  StepData step;
  step.dt = 50.0;
  step.x_prev = initial_state(p, L);
  step.divu_prev = cell_divergence(p, disc, L, step.x_prev);
  const auto regimes = classify_all(p, L, x, step.x_prev);
  const Eigen::MatrixXd J(assemble(p, disc, L, x, step, regimes).jacobian);
  const Vec row_scale = J.cwiseAbs().rowwise().maxCoeff();
  FdResult out;
  for (int j = 0; j < L.size(); ++j) {
    const double e = std::max(step_size(L.var_class(j)), 1e-4 * std::abs(x(j)));
    Vec xp = x, xm = x;
    xp(j) += e;
    xm(j) -= e;
    const Vec fd = (assemble(p, disc, L, xp, step, regimes).residual -
                    assemble(p, disc, L, xm, step, regimes).residual) / (2.0 * e);
    for (int i = 0; i < L.size(); ++i) {
      if (skip(i, j)) continue;
      const double err = std::abs(fd(i) - J(i, j)) / (row_scale(i) > 0.0 ? row_scale(i) : 1.0);
      if (err > out.worst) out = {err, i, j};
    }
  }
  return out;
}

Problem fd_problem() {
  SpeedSetup s;
  s.h = 1.0 / 8.0;
  Problem p = speed_problem(s);
  p.fracture_ends[0].pressure = p.params.reference_pressure + 2e5;
  p.fracture_ends[0].temperature = -3.0;
  return p;
}

std::string describe(const DofLayout& L, const FdResult& r) {
  if (r.row < 0) return "";
  return std::string("row ") + std::to_string(r.row) + " (" + var_class_name(L.var_class(r.row)) + ") col " +
         std::to_string(r.col) + " (" + var_class_name(L.var_class(r.col)) + ")";
}

}  // namespace

TEST(Assembly, JacobianMatchesFiniteDifferencesWithClosedFractures) {
  // At the residual aperture every aperture-dependent coefficient is constant,
  // so the Jacobian must be exact in every entry.
  const Problem p = fd_problem();
  const DofLayout L(p.grid);
  const Vec x = perturbed_state(p, L, -1e-6);
  const auto r = compare_with_fd(p, L, x, [](int, int) { return false; });
  EXPECT_LT(r.worst, 1e-6) << describe(L, r);
}

TEST(Assembly, JacobianMatchesFiniteDifferencesWithOpenFractures) {
  // Interface transmissibilities are lagged in the aperture, so the interface
  // flux rows are not compared against mortar displacement columns.
  const Problem p = fd_problem();
  const DofLayout L(p.grid);
  const Vec x = perturbed_state(p, L, 1e-5);
  const auto r = compare_with_fd(p, L, x, [&](int i, int j) {
    return L.var_class(i) == VarClass::kFlux && L.var_class(j) == VarClass::kMortarDisplacement;
  });
  EXPECT_LT(r.worst, 1e-6) << describe(L, r);
}
