#pragma once

#include <vector>

#include "thermofrac/mpfa.hpp"

namespace thermofrac {

struct Lame {
  double mu = 0.0;      // shear modulus G
  double lambda = 0.0;  // first Lame parameter
};

/// Face tractions T = stress * u + bound_stress * bc + stress_scalar * q, with u
/// and bc interleaved (x, y) per cell / face, bc holding Dirichlet displacements
/// or integrated Neumann tractions, and q the isotropic scalar stress per cell
/// subtracted from the elastic stress (alpha*p + beta*K*T). Tractions act in
/// the stored face normal direction. Face displacements and the cell-wise
/// integrated divergence are reconstructed from the same local problems; the
/// div_scalar map is the stabilisation term of the Biot coupling.
struct StressOperators {
  SpMat stress;                      // 2 faces x 2 cells
  SpMat bound_stress;                // 2 faces x 2 faces
  SpMat stress_scalar;               // 2 faces x cells
  SpMat bound_displacement_cell;     // 2 faces x 2 cells
  SpMat bound_displacement_face;     // 2 faces x 2 faces
  SpMat bound_displacement_scalar;   // 2 faces x cells
  SpMat div_u;                       // cells x 2 cells
  SpMat div_bc;                      // cells x 2 faces
  SpMat div_scalar;                  // cells x cells
};

/// Multi-point stress approximation with weak symmetry: one rotation unknown
/// per interaction region, balanced by the volume-weighted skew stress.
class Mpsa {
 public:
  void discretize(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc);
  void update(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc,
              const std::vector<int>& nodes);

  const StressOperators& operators() const { return ops_; }
  /// Number of regions whose local system needed the least-squares fallback.
  int singular_regions() const;

 private:
  struct RegionData {
    std::vector<Eigen::Triplet<double>> stress, bstress, sscalar, bd_cell, bd_face, bd_scalar, div_u, div_bc,
        div_scalar;
    bool singular = false;
  };
  void compute_region(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc, int node);
  void assemble(const SubdomainGrid& g);

  std::vector<RegionData> regions_;
  StressOperators ops_;
};

}  // namespace thermofrac
