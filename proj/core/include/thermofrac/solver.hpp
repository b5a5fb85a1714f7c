#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermofrac/assembly.hpp"

namespace thermofrac {

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double dt = 1.0;
  double t_end = 1.0;
  int max_iterations = 20;
  int max_halvings = 4;
  /// Repeated contact-regime patterns tolerated before a step is declared cycling.
  int max_regime_cycles = 3;
  double residual_tolerance = 1e-8;
  double update_tolerance = 1e-10;
  /// Characteristic magnitude per variable class, used when the iterate of
  /// that class is smaller (indexed by VarClass).
  std::array<double, kNumVarClasses> scales{1e-12, 1e-12, 1e-3, 1e-6, 1e-3, 1e-15};

  void validate() const;
};

/// Receives one line per Newton iteration.
using ProgressSink = std::function<void(const std::string&)>;

/// Scaled norms per variable class.
using ClassNorms = std::array<double, kNumVarClasses>;

/// Row-wise scaled residual R_i / max_j |J_ij|, reduced per class and divided
/// by max(|x_c|_inf, scale_c).
ClassNorms residual_norms(const LinearSystem& sys, const DofLayout& layout, const Vec& x, const SolverOptions& opt);
/// |dx_c|_inf / max(|x_c|_inf, scale_c).
ClassNorms update_norms(const Vec& dx, const DofLayout& layout, const Vec& x, const SolverOptions& opt);

/// Direct sparse solve of J dx = rhs with row and column equilibration. The
/// factorisation is kept so that further right-hand sides can reuse it.
class LinearSolver {
 public:
  void factorize(const SpMat& jacobian, const DofLayout* layout = nullptr);
  Vec solve(const Vec& rhs) const;
  bool ready() const { return ready_; }
  /// |J dx - rhs| / |rhs| of the last solve.
  double last_relative_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  bool ready_ = false;
  mutable double last_residual_ = 0.0;
};

Vec linear_solve(const SpMat& jacobian, const Vec& rhs);

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  std::string reason;
  ClassNorms residual{};
  ClassNorms update{};
  std::vector<std::vector<Regime>> regimes;
};

/// Classifies every fracture cell from the current iterate.
std::vector<std::vector<Regime>> classify_all(const Problem& problem, const DofLayout& layout, const Vec& x,
                                              const Vec& x_prev);

/// Semi-smooth Newton on one time step. `x` holds the initial guess and
/// receives the last iterate.
NewtonResult newton_solve(const Problem& problem, const Discretization& disc, const DofLayout& layout, Vec& x,
                          const StepData& step, const SolverOptions& opt, const ProgressSink& progress = {},
                          int step_index = 0);

struct StepReport {
  int iterations = 0;
  int halvings = 0;    // deepest halving level used
  int substeps = 1;
  /// Worst relative mass and energy imbalance over the substeps.
  double mass_error = 0.0;
  double energy_error = 0.0;
};

/// Advances `x` by dt, halving the step on Newton failure (two substeps per
/// halving, at most opt.max_halvings levels). The mass correction is applied
/// in the first substep only. Throws ConvergenceError when halving is exhausted.
StepReport advance(const Problem& problem, const Discretization& disc, const DofLayout& layout, Vec& x, double dt,
                   const std::vector<std::vector<char>>& mass_correction, const SolverOptions& opt,
                   const ProgressSink& progress = {}, int step_index = 0);

}  // namespace thermofrac
