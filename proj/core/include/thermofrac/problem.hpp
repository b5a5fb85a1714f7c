#pragma once

#include <vector>

#include "thermofrac/boundary.hpp"
#include "thermofrac/contact.hpp"
#include "thermofrac/grid.hpp"
#include "thermofrac/parameters.hpp"

namespace thermofrac {

/// Per-face boundary data. Dirichlet values are potentials / displacements;
/// Neumann values are face-integrated fluxes / tractions in the stored normal
/// direction.
struct ScalarBoundary {
  BoundaryKinds kinds;
  std::vector<double> values;
  double value(int f) const { return f < static_cast<int>(values.size()) ? values[f] : 0.0; }
  bool is_dirichlet(int f) const {
    return f < static_cast<int>(kinds.kind.size()) && kinds.kind[f] == BcKind::kDirichlet;
  }
};

struct VectorBoundary {
  BoundaryKinds kinds;
  std::vector<Vec2> values;
  Vec2 value(int f) const { return f < static_cast<int>(values.size()) ? values[f] : Vec2::Zero(); }
};

/// Condition at fracture ends lying on the domain boundary; no-flow unless Dirichlet.
struct FractureEnd {
  bool dirichlet = false;
  double pressure = 0.0;
  double temperature = 0.0;
};

struct Problem {
  MixedDimGrid grid;
  Parameters params;
  ScalarBoundary flow;
  ScalarBoundary heat;
  VectorBoundary mech;
  std::vector<FractureEnd> fracture_ends;

  /// Elastostatic mode: pressures, temperatures and interface fluxes are pinned,
  /// with every fracture cell held at `fixed_fracture_pressure`.
  bool mechanics_only = false;
  double fixed_fracture_pressure = 0.0;

  /// Contact parameters c_n = scale_n * G / h, c_t = scale_t * G / h.
  double contact_scale_n = 100.0;
  double contact_scale_t = 100.0;

  ContactCoefficients contact() const;
  /// Boundary data sized for the current grid (new faces get no condition).
  void validate() const;
};

/// Sides of the rectangular domain.
enum class DomainSide { kLeft, kRight, kBottom, kTop };
/// Side of a domain-boundary face, using its centre.
DomainSide face_side(const MixedDimGrid& mdg, int face);

}  // namespace thermofrac
