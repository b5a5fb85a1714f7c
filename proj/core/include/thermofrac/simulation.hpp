#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thermofrac/propagation.hpp"
#include "thermofrac/solver.hpp"

namespace thermofrac {

/// State after one completed time step, passed to output hooks.
struct StepInfo {
  int step = 0;
  double time = 0.0;
  const Problem* problem = nullptr;
  const Discretization* disc = nullptr;
  const DofLayout* layout = nullptr;
  const Vec* x = nullptr;
  const StepReport* report = nullptr;
  const PropagationResult* propagation = nullptr;
};
using StepHook = std::function<void(const StepInfo&)>;

/// Backward-Euler time loop with propagation after every converged step.
class Simulation {
 public:
  Simulation(Problem problem, SolverOptions options);

  void set_progress(ProgressSink sink) { progress_ = std::move(sink); }
  void add_step_hook(StepHook hook) { hooks_.push_back(std::move(hook)); }

  /// One step of size options.dt (shortened to hit t_end). Returns false once t_end is reached.
  bool step();
  void run();

  double time() const { return time_; }
  int steps() const { return step_; }
  const Problem& problem() const { return problem_; }
  const Discretization& discretization() const { return disc_; }
  const DofLayout& layout() const { return layout_; }
  const Vec& state() const { return x_; }
  Vec& state() { return x_; }
  const PropagationLog& propagation_log() const { return log_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Length of every fracture after each step (first entry: initial state).
  const std::vector<std::pair<double, std::vector<double>>>& fracture_sizes() const { return sizes_; }
  double worst_mass_error() const { return worst_mass_; }
  double worst_energy_error() const { return worst_energy_; }

 private:
  void record_sizes();

  Problem problem_;
  SolverOptions options_;
  Discretization disc_;
  DofLayout layout_;
  Vec x_;
  double time_ = 0.0;
  int step_ = 0;
  std::vector<std::vector<char>> correction_;
  ProgressSink progress_;
  std::vector<StepHook> hooks_;
  PropagationLog log_;
  PropagationMonitor monitor_;
  std::vector<std::string> warnings_;
  std::vector<std::pair<double, std::vector<double>>> sizes_;
  double worst_mass_ = 0.0;
  double worst_energy_ = 0.0;
};

/// Reference state: p = p0, T = T0, everything else zero; fracture pressures
/// at the fixed value in mechanics-only mode.
Vec initial_state(const Problem& problem, const DofLayout& layout);

}  // namespace thermofrac
