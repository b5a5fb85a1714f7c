#include "thermofrac/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

namespace thermofrac {

double sif_factor(double shear_modulus, double poisson_ratio, double r) {
  if (!(r > 0.0)) throw GridError("displacement correlation distance must be positive");
  const double kappa = 3.0 - 4.0 * poisson_ratio;
  return std::sqrt(2.0 * std::numbers::pi / r) * shear_modulus / (kappa + 1.0);
}

std::vector<SifEstimate> compute_sifs(const Problem& problem, const DofLayout& layout, const Vec& x) {
  const auto& mdg = problem.grid;
  const auto kin = fracture_kinematics(problem, layout, x);
  std::vector<SifEstimate> out;
  for (int fi = 0; fi < static_cast<int>(mdg.fractures.size()); ++fi) {
    const Fracture& fr = mdg.fractures[fi];
    const auto& fg = fr.grid;
    for (int e = 0; e < fg.num_faces(); ++e) {
      if (!fg.has_tag(e, face_tag::kFractureTip)) continue;
      SifEstimate s;
      s.fracture = fi;
      s.tip_face = e;
      s.cell = fg.any_cell(e);
      s.r = (fg.face_centers[e] - fg.cell_centers[s.cell]).norm();
      s.e_perp = (fg.face_centers[e] - fg.cell_centers[s.cell]).normalized();
      s.e_n = fr.normal;
      const double factor = sif_factor(problem.params.shear_modulus(), problem.params.poisson_ratio, s.r);
      s.k_i = factor * kin.jump_n[fi][s.cell];
      s.k_ii = factor * kin.jump_t[fi][s.cell] * s.e_perp.dot(fr.tangent);
      out.push_back(s);
    }
  }
  return out;
}

bool PropagationResult::grid_changed() const {
  return std::any_of(events.begin(), events.end(), [](const PropagationEvent& e) { return e.status == SplitStatus::kSplit; });
}

void initialise_new_cells(const Problem& problem, const DofLayout& layout, const std::vector<PropagationEvent>& events,
                          const Vec& face_displacement, Vec& x) {
  const auto& mdg = problem.grid;
  const auto& prm = problem.params;
  for (const auto& ev : events) {
    if (ev.status != SplitStatus::kSplit) continue;
    const int fi = ev.fracture;
    const int lc = ev.new_fracture_cell;
    x(layout.pf(fi, lc)) = prm.reference_pressure;
    x(layout.tf(fi, lc)) = 0.0;
    x(layout.lam(fi, lc, 0)) = 0.0;
    x(layout.lam(fi, lc, 1)) = 0.0;
    const Fracture& fr = mdg.fractures[fi];
    for (int side = 0; side < 2; ++side) {
      const int ii = side == 0 ? fr.interface_j : fr.interface_k;
      const int mc = ev.new_mortar_cells[side];
      for (int d = 0; d < 2; ++d) x(layout.w(ii, mc, d)) = face_displacement(2 * ev.split_face + d);
      x(layout.eta(ii, mc)) = 0.0;
      x(layout.qc(ii, mc)) = 0.0;
      x(layout.qa(ii, mc)) = 0.0;
    }
  }
}

PropagationResult evaluate_and_propagate(Problem& problem, Discretization& disc, DofLayout& layout, Vec& x) {
  PropagationResult result;
  result.sifs = compute_sifs(problem, layout, x);

  std::vector<const SifEstimate*> critical;
  for (const auto& s : result.sifs) {
    if (s.k_i >= problem.params.critical_sif) critical.push_back(&s);
  }
  if (critical.empty()) return result;

  // Displacement traces from the operators of the grid before splitting.
  const auto& mo = disc.mech();
  const int nc = problem.grid.matrix.num_cells();
  Vec u(2 * nc);
  for (int i = 0; i < 2 * nc; ++i) u(i) = x(layout.u(i / 2, i % 2));
  const Vec trace = mo.bound_displacement_cell * u + mo.bound_displacement_face * mech_boundary_vector(problem, layout, x) +
                    mo.bound_displacement_scalar * scalar_stress(problem, layout, x);

  const DofLayout old_layout = layout;
  for (const SifEstimate* s : critical) {
    result.events.push_back(split_tip_face(problem.grid, s->fracture, s->tip_face));
  }
  if (!result.grid_changed()) return result;

  layout = DofLayout(problem.grid);
  x = remap(old_layout, layout, x, 0.0);
  initialise_new_cells(problem, layout, result.events, trace, x);

  result.mass_correction.resize(problem.grid.fractures.size());
  for (std::size_t fi = 0; fi < problem.grid.fractures.size(); ++fi) {
    result.mass_correction[fi].assign(problem.grid.fractures[fi].grid.num_cells(), 0);
  }
  for (const auto& ev : result.events) {
    if (ev.status != SplitStatus::kSplit) continue;
    result.mass_correction[ev.fracture][ev.new_fracture_cell] = 1;
    result.affected_nodes.insert(result.affected_nodes.end(), ev.affected_nodes.begin(), ev.affected_nodes.end());
  }
  std::sort(result.affected_nodes.begin(), result.affected_nodes.end());
  result.affected_nodes.erase(std::unique(result.affected_nodes.begin(), result.affected_nodes.end()),
                              result.affected_nodes.end());
  disc.update(problem, result.affected_nodes);
  return result;
}

namespace {

const char* action_name(SplitStatus s) {
  switch (s) {
    case SplitStatus::kSplit: return "split";
    case SplitStatus::kBlocked: return "blocked";
    case SplitStatus::kCoalescence: return "coalescence";
  }
  return "unknown";
}

}  // namespace

void PropagationLog::record(double time, const PropagationResult& result) {
  for (const auto& s : result.sifs) {
    std::string action = "none";
    for (const auto& ev : result.events) {
      if (ev.fracture == s.fracture && ev.tip_face == s.tip_face) action = action_name(ev.status);
    }
    rows_.push_back({time, s.fracture, s.tip_face, s.k_i, s.k_ii, action});
  }
}

void PropagationLog::write_csv(std::ostream& os) const {
  os << "time,fracture,tip_face,k_i,k_ii,action\n";
  for (const auto& r : rows_) {
    os << fmt::format("{:.10g},{},{},{:.10g},{:.10g},{}\n", r.time, r.fracture, r.tip_face, r.k_i, r.k_ii, r.action);
  }
}

std::vector<std::string> PropagationMonitor::check(double time, double dt, double h, const PropagationResult& result) {
  std::vector<std::string> warnings;
  for (const auto& ev : result.events) {
    if (ev.status != SplitStatus::kSplit) continue;
    const auto key = std::make_pair(ev.fracture, ev.tip_face);
    if (std::find(fresh_tips_.begin(), fresh_tips_.end(), key) != fresh_tips_.end()) {
      warnings.push_back(fmt::format(
          "t = {:.6g} s: tip of fracture {} is supercritical right after its previous split; the propagation "
          "speed may exceed h/dt = {:.3e} m/s and an upper bound on the time step must be honoured",
          time, ev.fracture, h / dt));
    }
  }
  fresh_tips_.clear();
  for (const auto& ev : result.events) {
    if (ev.status == SplitStatus::kSplit) fresh_tips_.emplace_back(ev.fracture, ev.new_tip_face);
  }
  return warnings;
}

}  // namespace thermofrac
