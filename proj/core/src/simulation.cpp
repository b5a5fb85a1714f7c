#include "thermofrac/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace thermofrac {

Vec initial_state(const Problem& problem, const DofLayout& layout) {
  Vec x = Vec::Zero(layout.size());
  const double p0 = problem.params.reference_pressure;
  for (int c = 0; c < layout.num_cells(); ++c) x(layout.pm(c)) = p0;
  for (int fi = 0; fi < layout.num_fractures(); ++fi) {
    for (int lc = 0; lc < layout.fracture_cells(fi); ++lc) {
      x(layout.pf(fi, lc)) = problem.mechanics_only ? problem.fixed_fracture_pressure : p0;
    }
  }
  return x;
}

Simulation::Simulation(Problem problem, SolverOptions options)
    : problem_(std::move(problem)), options_(std::move(options)) {
  problem_.validate();
  options_.validate();
  disc_.build(problem_);
  layout_ = DofLayout(problem_.grid);
  x_ = initial_state(problem_, layout_);
  record_sizes();
}

void Simulation::record_sizes() {
  std::vector<double> len;
  for (const auto& fr : problem_.grid.fractures) len.push_back(fr.length());
  sizes_.emplace_back(time_, std::move(len));
}

bool Simulation::step() {
  const double remaining = options_.t_end - time_;
  if (remaining <= 1e-12 * std::max(1.0, options_.t_end)) return false;
  const double dt = std::min(options_.dt, remaining);
  ++step_;
  const StepReport report = advance(problem_, disc_, layout_, x_, dt, correction_, options_, progress_, step_);
  time_ += dt;
  worst_mass_ = std::max(worst_mass_, report.mass_error);
  worst_energy_ = std::max(worst_energy_, report.energy_error);

  PropagationResult prop = evaluate_and_propagate(problem_, disc_, layout_, x_);
  log_.record(time_, prop);
  for (auto& w : monitor_.check(time_, dt, problem_.grid.h, prop)) {
    if (progress_) progress_("warning: " + w);
    warnings_.push_back(std::move(w));
  }
  correction_ = prop.grid_changed() ? prop.mass_correction : std::vector<std::vector<char>>{};
  record_sizes();

  StepInfo info{step_, time_, &problem_, &disc_, &layout_, &x_, &report, &prop};
  for (const auto& h : hooks_) h(info);
  return true;
}

void Simulation::run() {
  while (step()) {
  }
}

}  // namespace thermofrac
