#include "thermofrac/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace thermofrac {

ContactCoefficients Problem::contact() const {
  ContactCoefficients cc;
  cc.friction = params.friction;
  cc.dilation_angle_deg = params.dilation_angle_deg;
  const double g_over_h = params.shear_modulus() / grid.h;
  cc.c_n = contact_scale_n * g_over_h;
  cc.c_t = contact_scale_t * g_over_h;
  return cc;
}

void Problem::validate() const {
  params.validate();
  if (fracture_ends.size() != grid.fractures.size()) {
    throw std::invalid_argument("fracture end conditions do not match the number of fractures");
  }
  if (!(contact_scale_n > 0.0 && contact_scale_t > 0.0)) {
    throw std::invalid_argument("contact scales must be positive");
  }
  const auto& m = grid.matrix;
  for (int f = 0; f < m.num_faces(); ++f) {
    if (!m.has_tag(f, face_tag::kDomainBoundary)) continue;
    for (const auto* k : {&flow.kinds, &heat.kinds, &mech.kinds}) {
      if (f >= static_cast<int>(k->kind.size()) || k->kind[f] == BcKind::kUnassigned) {
        throw std::invalid_argument("boundary face " + std::to_string(f) + " lacks a boundary condition");
      }
    }
  }
}

DomainSide face_side(const MixedDimGrid& mdg, int face) {
  const Vec2 x = mdg.matrix.face_centers[face];
  const double tol = 1e-9 * std::max(1.0, (mdg.upper - mdg.lower).norm());
  if (std::abs(x.x() - mdg.lower.x()) < tol) return DomainSide::kLeft;
  if (std::abs(x.x() - mdg.upper.x()) < tol) return DomainSide::kRight;
  if (std::abs(x.y() - mdg.lower.y()) < tol) return DomainSide::kBottom;
  if (std::abs(x.y() - mdg.upper.y()) < tol) return DomainSide::kTop;
  throw std::invalid_argument("face " + std::to_string(face) + " is not on the domain boundary");
}

}  // namespace thermofrac
