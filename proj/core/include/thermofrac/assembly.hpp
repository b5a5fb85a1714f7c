#pragma once

#include <vector>

#include "thermofrac/contact.hpp"
#include "thermofrac/discretization.hpp"
#include "thermofrac/problem.hpp"
#include "thermofrac/state.hpp"

namespace thermofrac {

/// Previous time level and step-specific sources.
struct StepData {
  double dt = 1.0;
  Vec x_prev;
  /// Integrated div u per matrix cell at the previous time level.
  Vec divu_prev;
  /// Per fracture and fracture cell: 1 if the cell was created by the
  /// preceding propagation step and carries the -a_res/dt mass correction.
  std::vector<std::vector<char>> mass_correction;
};

struct LinearSystem {
  SpMat jacobian;
  Vec residual;
};

/// Quantities derived from an iterate that several modules need.
struct FractureKinematics {
  std::vector<std::vector<double>> jump_n, jump_t, aperture;
};
FractureKinematics fracture_kinematics(const Problem& problem, const DofLayout& layout, const Vec& x);

/// Contact point of every fracture cell (lambda from x, jumps from x and x_prev).
std::vector<std::vector<ContactPoint>> contact_points(const Problem& problem, const DofLayout& layout, const Vec& x,
                                                      const Vec& x_prev);

/// Face boundary vectors of the three matrix discretisations for an iterate.
Vec flow_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x);
Vec heat_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x);
Vec mech_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x);
/// Isotropic stress alpha (p - p0) + beta_eff K T per matrix cell.
Vec scalar_stress(const Problem& problem, const DofLayout& layout, const Vec& x);
/// rho g per matrix cell (interleaved), density from the iterate.
Vec gravity_source(const Problem& problem, const DofLayout& layout, const Vec& x);

/// Integrated div u per matrix cell.
Vec cell_divergence(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x);
/// Darcy flux on every matrix face (stored normal direction).
Vec matrix_darcy_flux(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x);
/// Matrix face tractions (interleaved per face).
Vec matrix_tractions(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x);

/// Residual and Jacobian of the full mixed-dimensional system. Rows follow the
/// unknown ordering: each unknown's block is paired with its equation.
LinearSystem assemble(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                      const StepData& step, const std::vector<std::vector<Regime>>& regimes);

/// Fluid volume change and its budget for one step, used for the mass audit.
struct BalanceAudit {
  double storage_change = 0.0;  // accumulation summed over all subdomains (times dt)
  double boundary_inflow = 0.0;  // through domain boundary faces and fracture ends (times dt)
  double sources = 0.0;          // volumetric sources and propagation corrections (times dt)
  double scale = 0.0;            // gross budget: sum of absolute cell and face contributions
  double relative_error() const;
};
/// Fluid mass and T0-scaled energy budgets of a converged step.
BalanceAudit mass_audit(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                        const StepData& step);
BalanceAudit energy_audit(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                          const StepData& step);

}  // namespace thermofrac
