#include "thermofrac/boundary.hpp"

#include <string>

namespace thermofrac {

BoundaryKinds BoundaryKinds::uniform(const SubdomainGrid& g, BcKind k) {
  BoundaryKinds b;
  b.kind.assign(g.num_faces(), BcKind::kUnassigned);
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.has_tag(f, face_tag::kDomainBoundary)) b.kind[f] = k;
  }
  return b;
}

BcKind effective_kind(const SubdomainGrid& g, const BoundaryKinds& bc, int face, BcKind fracture_kind) {
  if (g.has_tag(face, face_tag::kFractureSurface)) return fracture_kind;
  if (g.num_neighbours(face) == 2) return BcKind::kUnassigned;
  const BcKind k = face < static_cast<int>(bc.kind.size()) ? bc.kind[face] : BcKind::kUnassigned;
  if (k == BcKind::kUnassigned) {
    throw DiscretizationError("boundary face " + std::to_string(face) + " has no boundary condition");
  }
  return k;
}

}  // namespace thermofrac
