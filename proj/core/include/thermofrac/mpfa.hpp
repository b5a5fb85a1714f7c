#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "thermofrac/boundary.hpp"
#include "thermofrac/grid.hpp"

namespace thermofrac {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Face flux F = flux * p + bound_flux * bc + vector_source * v, where bc holds
/// Dirichlet values or integrated Neumann fluxes per face (in the stored normal
/// direction) and v is a per-cell vector source (e.g. rho*g), interleaved.
/// The face potential is reconstructed in the same way by the bound_pressure_* maps.
struct FluxOperators {
  SpMat flux;                       // faces x cells
  SpMat bound_flux;                 // faces x faces
  SpMat vector_source;              // faces x 2 cells
  SpMat bound_pressure_cell;        // faces x cells
  SpMat bound_pressure_face;        // faces x faces
  SpMat bound_pressure_vector_source;  // faces x 2 cells
};

/// MPFA-O on vertex interaction regions with continuity points at face centres.
/// Keeps the contribution of every region so that a grid change only needs
/// the regions around modified nodes to be recomputed.
class Mpfa {
 public:
  /// `tensor` holds one conductivity tensor per matrix cell.
  void discretize(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor, const BoundaryKinds& bc);
  /// Recomputes the regions of the given nodes (existing or newly appended).
  void update(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor, const BoundaryKinds& bc,
              const std::vector<int>& nodes);

  const FluxOperators& operators() const { return ops_; }

 private:
  struct RegionData {
    std::vector<Eigen::Triplet<double>> flux, bound_flux, vsrc, bp_cell, bp_face, bp_vsrc;
  };
  void compute_region(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor,
                      const BoundaryKinds& bc, int node);
  void assemble(const SubdomainGrid& g);

  std::vector<RegionData> regions_;
  FluxOperators ops_;
};

/// Convenience wrapper for isotropic scalar conductivities.
std::vector<Eigen::Matrix2d> isotropic_tensors(const std::vector<double>& k);

}  // namespace thermofrac
