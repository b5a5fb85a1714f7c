#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thermofrac/grid.hpp"

namespace thermofrac {

enum class VarClass { kDisplacement, kMortarDisplacement, kPressure, kTemperature, kContact, kFlux };
inline constexpr int kNumVarClasses = 6;
const char* var_class_name(VarClass c);

/// Global unknown numbering. Blocks are stored in the order
/// [u, p_matrix, T_matrix, p_frac, T_frac, lambda, u_mortar, eta, q_cond, q_adv];
/// vector unknowns are interleaved per entity. Temperatures are deviations from T0.
/// Contact tractions are stored as (lambda_n, lambda_t) in the fracture basis.
class DofLayout {
 public:
  DofLayout() = default;
  explicit DofLayout(const MixedDimGrid& mdg);

  int size() const { return total_; }
  int num_cells() const { return num_cells_; }
  int num_fracture_cells() const { return frac_offset_.back(); }
  int num_mortar_cells() const { return mortar_offset_.back(); }
  int fracture_cells(int fi) const { return frac_offset_[fi + 1] - frac_offset_[fi]; }
  int mortar_cells(int ii) const { return mortar_offset_[ii + 1] - mortar_offset_[ii]; }
  int num_fractures() const { return static_cast<int>(frac_offset_.size()) - 1; }
  int num_interfaces() const { return static_cast<int>(mortar_offset_.size()) - 1; }

  int u(int c, int d) const { return off_[0] + 2 * c + d; }
  int pm(int c) const { return off_[1] + c; }
  int tm(int c) const { return off_[2] + c; }
  int pf(int fi, int lc) const { return off_[3] + frac_offset_[fi] + lc; }
  int tf(int fi, int lc) const { return off_[4] + frac_offset_[fi] + lc; }
  int lam(int fi, int lc, int d) const { return off_[5] + 2 * (frac_offset_[fi] + lc) + d; }
  int w(int ii, int lc, int d) const { return off_[6] + 2 * (mortar_offset_[ii] + lc) + d; }
  int eta(int ii, int lc) const { return off_[7] + mortar_offset_[ii] + lc; }
  int qc(int ii, int lc) const { return off_[8] + mortar_offset_[ii] + lc; }
  int qa(int ii, int lc) const { return off_[9] + mortar_offset_[ii] + lc; }

  VarClass var_class(int dof) const;
  /// Entity-count formula: 4 matrix cells + 4 fracture cells + 5 mortar cells.
  static int expected_size(const MixedDimGrid& mdg);

 private:
  int num_cells_ = 0;
  std::vector<int> frac_offset_{0};
  std::vector<int> mortar_offset_{0};
  std::array<int, 11> off_{};
  int total_ = 0;
};

/// Copies every value whose entity exists in both layouts; entities appended
/// since `from` was built get `fill`.
Eigen::VectorXd remap(const DofLayout& from, const DofLayout& to, const Eigen::VectorXd& x, double fill = 0.0);

}  // namespace thermofrac
