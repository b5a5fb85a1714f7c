#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "thermofrac/mpfa.hpp"
#include "thermofrac/mpsa.hpp"
#include "thermofrac/problem.hpp"

namespace thermofrac {

class StaleDiscretizationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Matrix operators for one grid revision, plus the products with the cell
/// divergence that the assembly reuses every Newton iteration.
class Discretization {
 public:
  void build(const Problem& problem);
  /// Recomputes the interaction regions around the nodes touched by a split.
  void update(const Problem& problem, const std::vector<int>& affected_nodes);
  /// Throws if the grid changed since the operators were computed.
  void check_current(const MixedDimGrid& mdg) const;

  std::uint64_t revision() const { return revision_; }
  const FluxOperators& flow() const { return flow_.operators(); }
  const FluxOperators& heat() const { return heat_.operators(); }
  const StressOperators& mech() const { return mech_.operators(); }
  int singular_regions() const { return mech_.singular_regions(); }

  /// Signed face-cell incidence (cells x faces) and its vector counterpart.
  const SpMat& div() const { return div_; }
  const SpMat& div_vector() const { return div2_; }

  // div * operator products
  SpMat mass_flux, mass_bound, mass_vsrc;
  SpMat heat_flux, heat_bound;
  SpMat momentum_u, momentum_bound, momentum_scalar;

 private:
  void finish(const Problem& problem);

  Mpfa flow_, heat_;
  Mpsa mech_;
  SpMat div_, div2_;
  std::uint64_t revision_ = 0;
  bool built_ = false;
};

}  // namespace thermofrac
