#include "thermofrac/state.hpp"

#include <algorithm>
#include <stdexcept>

namespace thermofrac {

const char* var_class_name(VarClass c) {
  switch (c) {
    case VarClass::kDisplacement: return "u";
    case VarClass::kMortarDisplacement: return "u_mortar";
    case VarClass::kPressure: return "p";
    case VarClass::kTemperature: return "T";
    case VarClass::kContact: return "lambda";
    case VarClass::kFlux: return "flux";
  }
  return "?";
}

DofLayout::DofLayout(const MixedDimGrid& mdg) : num_cells_(mdg.matrix.num_cells()) {
  for (const auto& f : mdg.fractures) frac_offset_.push_back(frac_offset_.back() + f.grid.num_cells());
  for (const auto& i : mdg.interfaces) mortar_offset_.push_back(mortar_offset_.back() + i.num_cells());
  const int nfc = frac_offset_.back();
  const int nmc = mortar_offset_.back();
  const std::array<int, 10> sizes{2 * num_cells_, num_cells_, num_cells_, nfc, nfc, 2 * nfc, 2 * nmc, nmc, nmc, nmc};
  off_[0] = 0;
  for (int b = 0; b < 10; ++b) off_[b + 1] = off_[b] + sizes[b];
  total_ = off_[10];
}

VarClass DofLayout::var_class(int dof) const {
  if (dof < 0 || dof >= total_) throw std::out_of_range("dof out of range");
  const int block = static_cast<int>(std::upper_bound(off_.begin(), off_.end(), dof) - off_.begin()) - 1;
  switch (block) {
    case 0: return VarClass::kDisplacement;
    case 1:
    case 3: return VarClass::kPressure;
    case 2:
    case 4: return VarClass::kTemperature;
    case 5: return VarClass::kContact;
    case 6: return VarClass::kMortarDisplacement;
    default: return VarClass::kFlux;
  }
}

int DofLayout::expected_size(const MixedDimGrid& mdg) {
  return 4 * mdg.matrix.num_cells() + 4 * mdg.num_fracture_cells() + 5 * mdg.num_mortar_cells();
}

Eigen::VectorXd remap(const DofLayout& from, const DofLayout& to, const Eigen::VectorXd& x, double fill) {
  if (from.num_cells() != to.num_cells() || from.num_fractures() != to.num_fractures() ||
      from.num_interfaces() != to.num_interfaces() || x.size() != from.size()) {
    throw std::invalid_argument("remap: incompatible layouts");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Constant(to.size(), fill);
  for (int c = 0; c < from.num_cells(); ++c) {
    y(to.u(c, 0)) = x(from.u(c, 0));
    y(to.u(c, 1)) = x(from.u(c, 1));
    y(to.pm(c)) = x(from.pm(c));
    y(to.tm(c)) = x(from.tm(c));
  }
  for (int fi = 0; fi < from.num_fractures(); ++fi) {
    for (int lc = 0; lc < std::min(from.fracture_cells(fi), to.fracture_cells(fi)); ++lc) {
      y(to.pf(fi, lc)) = x(from.pf(fi, lc));
      y(to.tf(fi, lc)) = x(from.tf(fi, lc));
      y(to.lam(fi, lc, 0)) = x(from.lam(fi, lc, 0));
      y(to.lam(fi, lc, 1)) = x(from.lam(fi, lc, 1));
    }
  }
  for (int ii = 0; ii < from.num_interfaces(); ++ii) {
    for (int lc = 0; lc < std::min(from.mortar_cells(ii), to.mortar_cells(ii)); ++lc) {
      y(to.w(ii, lc, 0)) = x(from.w(ii, lc, 0));
      y(to.w(ii, lc, 1)) = x(from.w(ii, lc, 1));
      y(to.eta(ii, lc)) = x(from.eta(ii, lc));
      y(to.qc(ii, lc)) = x(from.qc(ii, lc));
      y(to.qa(ii, lc)) = x(from.qa(ii, lc));
    }
  }
  return y;
}

}  // namespace thermofrac
