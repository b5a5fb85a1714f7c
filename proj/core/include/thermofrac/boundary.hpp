#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "thermofrac/grid.hpp"

namespace thermofrac {

enum class BcKind : std::uint8_t { kUnassigned, kNeumann, kDirichlet };

/// Boundary condition type per matrix face. Interior faces are ignored.
/// Fracture-surface faces are set by the discretisation itself (Neumann for
/// flow and heat, Dirichlet for mechanics) and need not be assigned.
struct BoundaryKinds {
  std::vector<BcKind> kind;

  static BoundaryKinds uniform(const SubdomainGrid& g, BcKind k);
};

class DiscretizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolved boundary kind used by the discretisation for a face.
BcKind effective_kind(const SubdomainGrid& g, const BoundaryKinds& bc, int face, BcKind fracture_kind);

}  // namespace thermofrac
