#include "thermofrac/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "thermofrac/fv_operators.hpp"

namespace thermofrac {

namespace {

/// Target row per matrix row (-1 to skip), optionally scaled.
struct RowMap {
  std::vector<int> index;
  std::vector<double> scale;
};

/// Source of each matrix column: an unknown times a scale, or a known value.
struct ColMap {
  std::vector<int> index;
  std::vector<double> scale;
  Vec known;
};

class Builder {
 public:
  explicit Builder(const Vec& x) : x_(x), r_(Vec::Zero(x.size())) { t_.reserve(16 * x.size()); }

  void jac(int row, int col, double v) {
    if (v != 0.0) t_.emplace_back(row, col, v);
  }
  void lin(int row, int col, double v) {
    jac(row, col, v);
    r_(row) += v * x_(col);
  }
  void res(int row, double v) { r_(row) += v; }

  void matrix(const SpMat& m, const RowMap& rows, const ColMap& cols, double s = 1.0) {
    for (int k = 0; k < m.outerSize(); ++k) {
      const int col = cols.index[k];
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        const int row = rows.index[it.row()];
        if (row < 0) continue;
        const double v = s * it.value() * (rows.scale.empty() ? 1.0 : rows.scale[it.row()]);
        if (col >= 0) {
          lin(row, col, v * cols.scale[k]);
        } else {
          r_(row) += v * cols.known(k);
        }
      }
    }
  }

  LinearSystem finish() {
    LinearSystem ls;
    ls.jacobian.resize(x_.size(), x_.size());
    ls.jacobian.setFromTriplets(t_.begin(), t_.end());
    ls.residual = std::move(r_);
    return ls;
  }

 private:
  const Vec& x_;
  Vec r_;
  std::vector<Eigen::Triplet<double>> t_;
};

ColMap unknown_columns(int n, const std::function<int(int)>& dof, double scale = 1.0) {
  ColMap c;
  c.index.resize(n);
  c.scale.assign(n, scale);
  c.known = Vec::Zero(n);
  for (int i = 0; i < n; ++i) c.index[i] = dof(i);
  return c;
}

ColMap known_columns(const Vec& values) {
  ColMap c;
  c.index.assign(values.size(), -1);
  c.scale.assign(values.size(), 0.0);
  c.known = values;
  return c;
}

RowMap rows_of(int n, const std::function<int(int)>& dof) {
  RowMap r;
  r.index.resize(n);
  for (int i = 0; i < n; ++i) r.index[i] = dof(i);
  return r;
}

/// Mortar cell index of every fracture cell on one interface.
std::vector<int> mortar_of_cell(const MortarInterface& intf, int num_fracture_cells) {
  std::vector<int> m(num_fracture_cells, -1);
  for (int i = 0; i < intf.num_cells(); ++i) m[intf.fracture_cells[i]] = i;
  return m;
}

struct FractureMaps {
  int ij, ik;
  std::vector<int> mj, mk;
};

FractureMaps fracture_maps(const MixedDimGrid& mdg, int fi) {
  const Fracture& fr = mdg.fractures[fi];
  FractureMaps m{fr.interface_j, fr.interface_k, {}, {}};
  m.mj = mortar_of_cell(mdg.interfaces[m.ij], fr.grid.num_cells());
  m.mk = mortar_of_cell(mdg.interfaces[m.ik], fr.grid.num_cells());
  return m;
}

/// Column map of the flux-type boundary vector: interface unknowns on fracture
/// faces, prescribed values elsewhere.
ColMap flux_bc_columns(const Problem& problem, const DofLayout& layout, const ScalarBoundary& bc,
                       int (DofLayout::*dof)(int, int) const) {
  const auto& mdg = problem.grid;
  const auto& g = mdg.matrix;
  ColMap c;
  c.index.assign(g.num_faces(), -1);
  c.scale.assign(g.num_faces(), 0.0);
  c.known = Vec::Zero(g.num_faces());
  for (int f = 0; f < g.num_faces(); ++f) {
    const int ii = mdg.face_interface[f];
    if (ii >= 0) {
      const auto& intf = mdg.interfaces[ii];
      c.index[f] = (layout.*dof)(ii, mdg.face_mortar_cell[f]);
      c.scale[f] = intf.orientation() * g.face_areas[f];
    } else if (g.has_tag(f, face_tag::kDomainBoundary)) {
      c.known(f) = bc.value(f);
    }
  }
  return c;
}

ColMap mech_bc_columns(const Problem& problem, const DofLayout& layout) {
  const auto& mdg = problem.grid;
  const auto& g = mdg.matrix;
  const int nf = g.num_faces();
  ColMap c;
  c.index.assign(2 * nf, -1);
  c.scale.assign(2 * nf, 0.0);
  c.known = Vec::Zero(2 * nf);
  for (int f = 0; f < nf; ++f) {
    const int ii = mdg.face_interface[f];
    for (int d = 0; d < 2; ++d) {
      if (ii >= 0) {
        c.index[2 * f + d] = layout.w(ii, mdg.face_mortar_cell[f], d);
        c.scale[2 * f + d] = 1.0;
      } else if (g.has_tag(f, face_tag::kDomainBoundary)) {
        c.known(2 * f + d) = problem.mech.value(f)(d);
      }
    }
  }
  return c;
}

struct ScalarStressColumns {
  ColMap p, t, constant;
};

ScalarStressColumns scalar_stress_columns(const Problem& problem, const DofLayout& layout) {
  const auto& prm = problem.params;
  const int nc = problem.grid.matrix.num_cells();
  ScalarStressColumns s;
  s.p = unknown_columns(nc, [&](int c) { return layout.pm(c); }, prm.biot_alpha);
  s.t = unknown_columns(nc, [&](int c) { return layout.tm(c); },
                        prm.effective_thermal_expansion() * prm.bulk_modulus);
  s.constant = known_columns(Vec::Constant(nc, -prm.biot_alpha * prm.reference_pressure));
  return s;
}

double cell_density(const Parameters& prm, double p, double t) {
  return density(p - prm.reference_pressure, t, prm);
}

/// Advective heat carried across a matrix face by the Darcy flux `flux`
/// (stored normal direction). Returns the upstream temperature unknown in
/// `up_dof` (-1 if the value is prescribed or absent).
double face_advection(const Problem& problem, const DofLayout& layout, const Vec& x, int f, double flux,
                      int& up_dof) {
  const auto& g = problem.grid.matrix;
  const double rc = problem.params.fluid_volumetric_heat();
  up_dof = -1;
  const int up = g.face_cells[f][flux > 0.0 ? 0 : 1];
  if (up >= 0) {
    up_dof = layout.tm(up);
    return rc * x(up_dof) * flux;
  }
  if (problem.heat.is_dirichlet(f)) return rc * problem.heat.value(f) * flux;
  return 0.0;
}

struct EndFlux {
  double transmissibility = 0.0;
  double conduction = 0.0;
  double flux = 0.0;  // Darcy flux out of the cell through the fracture end
};

EndFlux fracture_end_flux(const Problem& problem, const DofLayout& layout, const Vec& x,
                          const FractureKinematics& kin, int fi, int e) {
  const auto& prm = problem.params;
  const auto& fg = problem.grid.fractures[fi].grid;
  const int c = fg.any_cell(e);
  const double d = (fg.face_centers[e] - fg.cell_centers[c]).norm();
  const double a = kin.aperture[fi][c];
  const auto& end = problem.fracture_ends[fi];
  EndFlux out;
  out.transmissibility = a * fracture_permeability(a) / prm.viscosity / d;
  out.conduction = a * prm.fluid_conductivity / d;
  const double p = x(layout.pf(fi, c));
  const double rho = cell_density(prm, p, x(layout.tf(fi, c)));
  out.flux = out.transmissibility * (p - end.pressure) +
             out.transmissibility * rho * prm.gravity.dot(fg.face_centers[e] - fg.cell_centers[c]);
  return out;
}

bool is_dirichlet_end(const Problem& problem, int fi, int e) {
  const auto& fg = problem.grid.fractures[fi].grid;
  return fg.num_neighbours(e) == 1 && fg.has_tag(e, face_tag::kDomainBoundary) &&
         problem.fracture_ends[fi].dirichlet;
}

void check_sizes(const DofLayout& layout, const Vec& x) {
  if (x.size() != layout.size()) {
    throw std::invalid_argument("state vector has " + std::to_string(x.size()) + " entries, layout expects " +
                                std::to_string(layout.size()));
  }
}

}  // namespace

FractureKinematics fracture_kinematics(const Problem& problem, const DofLayout& layout, const Vec& x) {
  check_sizes(layout, x);
  const auto& mdg = problem.grid;
  FractureKinematics k;
  const int nfr = static_cast<int>(mdg.fractures.size());
  k.jump_n.resize(nfr);
  k.jump_t.resize(nfr);
  k.aperture.resize(nfr);
  for (int fi = 0; fi < nfr; ++fi) {
    const Fracture& fr = mdg.fractures[fi];
    const auto maps = fracture_maps(mdg, fi);
    const int n = fr.grid.num_cells();
    k.jump_n[fi].resize(n);
    k.jump_t[fi].resize(n);
    k.aperture[fi].resize(n);
    for (int lc = 0; lc < n; ++lc) {
      Vec2 jump;
      for (int d = 0; d < 2; ++d) jump(d) = x(layout.w(maps.ik, maps.mk[lc], d)) - x(layout.w(maps.ij, maps.mj[lc], d));
      k.jump_n[fi][lc] = jump.dot(fr.normal);
      k.jump_t[fi][lc] = jump.dot(fr.tangent);
      k.aperture[fi][lc] = aperture(k.jump_n[fi][lc], problem.params.residual_aperture);
    }
  }
  return k;
}

std::vector<std::vector<ContactPoint>> contact_points(const Problem& problem, const DofLayout& layout, const Vec& x,
                                                      const Vec& x_prev) {
  const auto kin = fracture_kinematics(problem, layout, x);
  const auto prev = fracture_kinematics(problem, layout, x_prev);
  std::vector<std::vector<ContactPoint>> pts(kin.jump_n.size());
  for (std::size_t fi = 0; fi < pts.size(); ++fi) {
    pts[fi].resize(kin.jump_n[fi].size());
    for (std::size_t lc = 0; lc < pts[fi].size(); ++lc) {
      auto& cp = pts[fi][lc];
      cp.lambda_n = x(layout.lam(fi, lc, 0));
      cp.lambda_t = x(layout.lam(fi, lc, 1));
      cp.jump_n = kin.jump_n[fi][lc];
      cp.jump_t = kin.jump_t[fi][lc];
      cp.jump_t_prev = prev.jump_t[fi][lc];
    }
  }
  return pts;
}

namespace {

Vec apply(const ColMap& c, const Vec& x) {
  Vec v = c.known;
  for (std::size_t i = 0; i < c.index.size(); ++i) {
    if (c.index[i] >= 0) v(i) = c.scale[i] * x(c.index[i]);
  }
  return v;
}

}  // namespace

Vec flow_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x) {
  return apply(flux_bc_columns(problem, layout, problem.flow, &DofLayout::eta), x);
}

Vec heat_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x) {
  return apply(flux_bc_columns(problem, layout, problem.heat, &DofLayout::qc), x);
}

Vec mech_boundary_vector(const Problem& problem, const DofLayout& layout, const Vec& x) {
  return apply(mech_bc_columns(problem, layout), x);
}

Vec scalar_stress(const Problem& problem, const DofLayout& layout, const Vec& x) {
  const auto s = scalar_stress_columns(problem, layout);
  return apply(s.p, x) + apply(s.t, x) + s.constant.known;
}

Vec gravity_source(const Problem& problem, const DofLayout& layout, const Vec& x) {
  const auto& prm = problem.params;
  const int nc = problem.grid.matrix.num_cells();
  Vec v = Vec::Zero(2 * nc);
  if (prm.gravity.squaredNorm() == 0.0) return v;
  for (int c = 0; c < nc; ++c) {
    v.segment<2>(2 * c) = cell_density(prm, x(layout.pm(c)), x(layout.tm(c))) * prm.gravity;
  }
  return v;
}

Vec cell_divergence(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x) {
  check_sizes(layout, x);
  const auto& mo = disc.mech();
  const int nc = problem.grid.matrix.num_cells();
  Vec u(2 * nc);
  for (int i = 0; i < 2 * nc; ++i) u(i) = x(layout.u(i / 2, i % 2));
  return mo.div_u * u + mo.div_bc * mech_boundary_vector(problem, layout, x) +
         mo.div_scalar * scalar_stress(problem, layout, x);
}

Vec matrix_darcy_flux(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x) {
  check_sizes(layout, x);
  const auto& fo = disc.flow();
  const int nc = problem.grid.matrix.num_cells();
  Vec p(nc);
  for (int c = 0; c < nc; ++c) p(c) = x(layout.pm(c));
  return fo.flux * p + fo.bound_flux * flow_boundary_vector(problem, layout, x) +
         fo.vector_source * gravity_source(problem, layout, x);
}

Vec matrix_tractions(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x) {
  check_sizes(layout, x);
  const auto& mo = disc.mech();
  const int nc = problem.grid.matrix.num_cells();
  Vec u(2 * nc);
  for (int i = 0; i < 2 * nc; ++i) u(i) = x(layout.u(i / 2, i % 2));
  return mo.stress * u + mo.bound_stress * mech_boundary_vector(problem, layout, x) +
         mo.stress_scalar * scalar_stress(problem, layout, x);
}

LinearSystem assemble(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                      const StepData& step, const std::vector<std::vector<Regime>>& regimes) {
  disc.check_current(problem.grid);
  check_sizes(layout, x);
  check_sizes(layout, step.x_prev);
  if (!(step.dt > 0.0)) throw std::invalid_argument("time step must be positive");

  const auto& mdg = problem.grid;
  const auto& g = mdg.matrix;
  const auto& prm = problem.params;
  const int nc = g.num_cells();
  const int nf = g.num_faces();
  const int nfr = static_cast<int>(mdg.fractures.size());
  const double dt = step.dt;
  const Vec& xp = step.x_prev;
  const auto& fo = disc.flow();
  const auto& ho = disc.heat();
  const auto& mo = disc.mech();

  Builder b(x);

  const ColMap col_u = unknown_columns(2 * nc, [&](int i) { return layout.u(i / 2, i % 2); });
  const ColMap col_p = unknown_columns(nc, [&](int c) { return layout.pm(c); });
  const ColMap col_t = unknown_columns(nc, [&](int c) { return layout.tm(c); });
  const ColMap col_flow_bc = flux_bc_columns(problem, layout, problem.flow, &DofLayout::eta);
  const ColMap col_heat_bc = flux_bc_columns(problem, layout, problem.heat, &DofLayout::qc);
  const ColMap col_mech_bc = mech_bc_columns(problem, layout);
  const auto col_q = scalar_stress_columns(problem, layout);

  const RowMap rows_u = rows_of(2 * nc, [&](int i) { return layout.u(i / 2, i % 2); });
  const RowMap rows_p = rows_of(nc, [&](int c) { return layout.pm(c); });
  const RowMap rows_t = rows_of(nc, [&](int c) { return layout.tm(c); });
  const RowMap rows_traction = rows_of(2 * nf, [&](int i) {
    const int ii = mdg.face_interface[i / 2];
    return ii >= 0 ? layout.w(ii, mdg.face_mortar_cell[i / 2], i % 2) : -1;
  });

  auto add_stress_terms = [&](const SpMat& su, const SpMat& sb, const SpMat& sq, const RowMap& rows, double s) {
    b.matrix(su, rows, col_u, s);
    b.matrix(sb, rows, col_mech_bc, s);
    b.matrix(sq, rows, col_q.p, s);
    b.matrix(sq, rows, col_q.t, s);
    b.matrix(sq, rows, col_q.constant, s);
  };

  // Momentum balance and traction balance on fracture faces.
  add_stress_terms(disc.momentum_u, disc.momentum_bound, disc.momentum_scalar, rows_u, 1.0);
  add_stress_terms(mo.stress, mo.bound_stress, mo.stress_scalar, rows_traction, 1.0);
  for (int ii = 0; ii < static_cast<int>(mdg.interfaces.size()); ++ii) {
    const auto& intf = mdg.interfaces[ii];
    const Fracture& fr = mdg.fractures[intf.fracture];
    for (int i = 0; i < intf.num_cells(); ++i) {
      const int lc = intf.fracture_cells[i];
      const double area = g.face_areas[intf.matrix_faces[i]];
      for (int d = 0; d < 2; ++d) {
        const int row = layout.w(ii, i, d);
        b.lin(row, layout.lam(intf.fracture, lc, 0), -area * fr.normal(d));
        b.lin(row, layout.lam(intf.fracture, lc, 1), -area * fr.tangent(d));
        b.lin(row, layout.pf(intf.fracture, lc), area * fr.normal(d));
        b.res(row, -area * prm.reference_pressure * fr.normal(d));
      }
    }
  }

  // Contact conditions.
  const auto cc = problem.contact();
  const auto points = contact_points(problem, layout, x, xp);
  std::vector<FractureMaps> maps;
  for (int fi = 0; fi < nfr; ++fi) maps.push_back(fracture_maps(mdg, fi));
  for (int fi = 0; fi < nfr; ++fi) {
    const Fracture& fr = mdg.fractures[fi];
    const auto& m = maps[fi];
    for (int lc = 0; lc < fr.grid.num_cells(); ++lc) {
      const ContactRows cr = contact_rows(regimes.at(fi).at(lc), points[fi][lc], cc);
      for (int r = 0; r < 2; ++r) {
        const int row = layout.lam(fi, lc, r);
        b.res(row, cr.r[r]);
        b.jac(row, layout.lam(fi, lc, 0), cr.d_lambda[r][0]);
        b.jac(row, layout.lam(fi, lc, 1), cr.d_lambda[r][1]);
        for (int d = 0; d < 2; ++d) {
          const double dj = cr.d_jump[r][0] * fr.normal(d) + cr.d_jump[r][1] * fr.tangent(d);
          b.jac(row, layout.w(m.ik, m.mk[lc], d), dj);
          b.jac(row, layout.w(m.ij, m.mj[lc], d), -dj);
        }
      }
    }
  }

  if (problem.mechanics_only) {
    for (int c = 0; c < nc; ++c) {
      b.lin(layout.pm(c), layout.pm(c), 1.0);
      b.res(layout.pm(c), -prm.reference_pressure);
      b.lin(layout.tm(c), layout.tm(c), 1.0);
    }
    for (int fi = 0; fi < nfr; ++fi) {
      for (int lc = 0; lc < layout.fracture_cells(fi); ++lc) {
        b.lin(layout.pf(fi, lc), layout.pf(fi, lc), 1.0);
        b.res(layout.pf(fi, lc), -problem.fixed_fracture_pressure);
        b.lin(layout.tf(fi, lc), layout.tf(fi, lc), 1.0);
      }
    }
    for (int ii = 0; ii < layout.num_interfaces(); ++ii) {
      for (int i = 0; i < layout.mortar_cells(ii); ++i) {
        for (int dof : {layout.eta(ii, i), layout.qc(ii, i), layout.qa(ii, i)}) b.lin(dof, dof, 1.0);
      }
    }
    return b.finish();
  }

  const auto kin = fracture_kinematics(problem, layout, x);
  const auto kin_prev = fracture_kinematics(problem, layout, xp);
  const Vec rho_g = gravity_source(problem, layout, x);
  const double rc = prm.fluid_volumetric_heat();
  const double t0 = prm.reference_temperature;
  const double beta_f = prm.fluid_thermal_expansion;

  // Matrix mass balance.
  const double storage = prm.storage_coefficient();
  for (int c = 0; c < nc; ++c) {
    const double v = g.cell_volumes[c];
    const int row = layout.pm(c);
    b.lin(row, layout.pm(c), v * storage / dt);
    b.res(row, -v * storage * xp(layout.pm(c)) / dt);
    b.lin(row, layout.tm(c), -v * beta_f / dt);
    b.res(row, v * beta_f * xp(layout.tm(c)) / dt);
    b.res(row, -prm.biot_alpha * step.divu_prev(c) / dt);
    b.res(row, -v * prm.matrix_fluid_source);
  }
  add_stress_terms(mo.div_u, mo.div_bc, mo.div_scalar, rows_p, prm.biot_alpha / dt);
  b.matrix(disc.mass_flux, rows_p, col_p);
  b.matrix(disc.mass_bound, rows_p, col_flow_bc);
  if (prm.gravity.squaredNorm() > 0.0) {
    const Vec grav = disc.mass_vsrc * rho_g;
    for (int c = 0; c < nc; ++c) b.res(layout.pm(c), grav(c));
  }

  // Matrix energy balance, multiplied by T0.
  const double rc_eff = prm.effective_heat_capacity();
  const double thermo_mech = t0 * prm.solid_thermal_expansion * prm.bulk_modulus;
  for (int c = 0; c < nc; ++c) {
    const double v = g.cell_volumes[c];
    const int row = layout.tm(c);
    b.lin(row, layout.tm(c), v * rc_eff / dt);
    b.res(row, -v * rc_eff * xp(layout.tm(c)) / dt);
    b.lin(row, layout.pm(c), -t0 * v * beta_f / dt);
    b.res(row, t0 * v * beta_f * xp(layout.pm(c)) / dt);
    b.res(row, -thermo_mech * step.divu_prev(c) / dt);
    b.res(row, -t0 * v * prm.matrix_heat_source);
  }
  add_stress_terms(mo.div_u, mo.div_bc, mo.div_scalar, rows_t, thermo_mech / dt);
  b.matrix(disc.heat_flux, rows_t, col_t);
  b.matrix(disc.heat_bound, rows_t, col_heat_bc);

  // Advection across matrix faces; fracture faces carry the interface flux.
  const Vec darcy = matrix_darcy_flux(problem, disc, layout, x);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> flux_rm(fo.flux), bound_rm(fo.bound_flux);
  for (int f = 0; f < nf; ++f) {
    const int ii = mdg.face_interface[f];
    if (ii >= 0) {
      const int c = g.any_cell(f);
      const double s = g.face_sign(c, f) * mdg.interfaces[ii].orientation() * g.face_areas[f];
      b.lin(layout.tm(c), layout.qa(ii, mdg.face_mortar_cell[f]), s);
      continue;
    }
    int up_dof = -1;
    const double adv = face_advection(problem, layout, x, f, darcy(f), up_dof);
    double theta_up = 0.0;
    if (up_dof >= 0) {
      theta_up = x(up_dof);
    } else if (g.face_cells[f][darcy(f) > 0.0 ? 0 : 1] < 0 && problem.heat.is_dirichlet(f)) {
      theta_up = problem.heat.value(f);
    }
    for (int slot = 0; slot < 2; ++slot) {
      const int c = g.face_cells[f][slot];
      if (c < 0) continue;
      const double sign = slot == 0 ? 1.0 : -1.0;
      const int row = layout.tm(c);
      b.res(row, sign * adv);
      if (up_dof >= 0) b.jac(row, up_dof, sign * rc * darcy(f));
      const double coef = sign * rc * theta_up;
      if (coef == 0.0) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(flux_rm, f); it; ++it) {
        b.jac(row, layout.pm(it.col()), coef * it.value());
      }
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(bound_rm, f); it; ++it) {
        if (col_flow_bc.index[it.col()] >= 0) {
          b.jac(row, col_flow_bc.index[it.col()], coef * it.value() * col_flow_bc.scale[it.col()]);
        }
      }
    }
  }

  // Fracture mass and energy balances.
  for (int fi = 0; fi < nfr; ++fi) {
    const Fracture& fr = mdg.fractures[fi];
    const auto& fg = fr.grid;
    const auto& m = maps[fi];
    const double qf = prm.fracture_fluid_source;
    for (int lc = 0; lc < fg.num_cells(); ++lc) {
      const double len = fg.cell_volumes[lc];
      const double a = kin.aperture[fi][lc];
      const double a_prev = kin_prev.aperture[fi][lc];
      const bool open = kin.jump_n[fi][lc] > 0.0;
      const int ip = layout.pf(fi, lc);
      const int it = layout.tf(fi, lc);
      const double dp = x(ip) - xp(ip);
      const double dth = x(it) - xp(it);
      const double theta = x(it);
      const double c = prm.compressibility;

      double da_mass = 0.0;
      b.res(ip, len * (a * (c * dp - beta_f * dth) + (a - a_prev)) / dt - len * a * qf);
      b.jac(ip, ip, len * a * c / dt);
      b.jac(ip, it, -len * a * beta_f / dt);
      if (open) da_mass = len * ((c * dp - beta_f * dth) + 1.0) / dt - len * qf;
      b.lin(ip, layout.eta(m.ij, m.mj[lc]), -len);
      b.lin(ip, layout.eta(m.ik, m.mk[lc]), -len);
      if (fi < static_cast<int>(step.mass_correction.size()) &&
          lc < static_cast<int>(step.mass_correction[fi].size()) && step.mass_correction[fi][lc]) {
        b.res(ip, len * prm.residual_aperture / dt);
      }

      double da_energy = 0.0;
      b.res(it, len * (rc * theta * (a - a_prev) + rc * a * dth - t0 * beta_f * a * dp) / dt -
                    len * a * qf * rc * theta);
      b.jac(it, it, len * (rc * (a - a_prev) + rc * a) / dt - len * a * qf * rc);
      b.jac(it, ip, -len * t0 * beta_f * a / dt);
      if (open) da_energy = len * (rc * theta + rc * dth - t0 * beta_f * dp) / dt - len * qf * rc * theta;
      for (int side = 0; side < 2; ++side) {
        const int ii = side == 0 ? m.ij : m.ik;
        const int mc = side == 0 ? m.mj[lc] : m.mk[lc];
        b.lin(it, layout.qc(ii, mc), -len);
        b.lin(it, layout.qa(ii, mc), -len);
      }

      for (int d = 0; d < 2; ++d) {
        for (auto [row, da] : {std::pair{ip, da_mass}, std::pair{it, da_energy}}) {
          if (da == 0.0) continue;
          b.jac(row, layout.w(m.ik, m.mk[lc], d), da * fr.normal(d));
          b.jac(row, layout.w(m.ij, m.mj[lc], d), -da * fr.normal(d));
        }
      }
    }

    // Darcy and Fourier fluxes along the fracture, transmissibilities lagged.
    for (int e = 0; e < fg.num_faces(); ++e) {
      const int c0 = fg.face_cells[e][0];
      const int c1 = fg.face_cells[e][1];
      if (c0 >= 0 && c1 >= 0) {
        const double d0 = (fg.face_centers[e] - fg.cell_centers[c0]).norm();
        const double d1 = (fg.face_centers[e] - fg.cell_centers[c1]).norm();
        const double a0 = kin.aperture[fi][c0];
        const double a1 = kin.aperture[fi][c1];
        const double tp = two_point_transmissibility(a0 * fracture_permeability(a0) / prm.viscosity, d0,
                                                     a1 * fracture_permeability(a1) / prm.viscosity, d1);
        const double tc = two_point_transmissibility(a0 * prm.fluid_conductivity, d0, a1 * prm.fluid_conductivity, d1);
        const int p0i = layout.pf(fi, c0), p1i = layout.pf(fi, c1);
        const int t0i = layout.tf(fi, c0), t1i = layout.tf(fi, c1);
        double grav = 0.0;
        if (prm.gravity.squaredNorm() > 0.0) {
          const double rho = 0.5 * (cell_density(prm, x(p0i), x(t0i)) + cell_density(prm, x(p1i), x(t1i)));
          grav = tp * rho * prm.gravity.dot(fg.cell_centers[c1] - fg.cell_centers[c0]);
        }
        const double flux = tp * (x(p0i) - x(p1i)) + grav;
        const int up = flux > 0.0 ? t0i : t1i;
        const double heat = tc * (x(t0i) - x(t1i)) + rc * x(up) * flux;
        for (int slot = 0; slot < 2; ++slot) {
          const double s = slot == 0 ? 1.0 : -1.0;
          const int rp = slot == 0 ? p0i : p1i;
          const int rt = slot == 0 ? t0i : t1i;
          b.res(rp, s * flux);
          b.jac(rp, p0i, s * tp);
          b.jac(rp, p1i, -s * tp);
          b.res(rt, s * heat);
          b.jac(rt, t0i, s * tc);
          b.jac(rt, t1i, -s * tc);
          b.jac(rt, up, s * rc * flux);
          b.jac(rt, p0i, s * rc * x(up) * tp);
          b.jac(rt, p1i, -s * rc * x(up) * tp);
        }
      } else if (is_dirichlet_end(problem, fi, e)) {
        const int c = fg.any_cell(e);
        const auto ef = fracture_end_flux(problem, layout, x, kin, fi, e);
        const auto& end = problem.fracture_ends[fi];
        const int ip = layout.pf(fi, c), it = layout.tf(fi, c);
        b.res(ip, ef.flux);
        b.jac(ip, ip, ef.transmissibility);
        const double theta_up = ef.flux > 0.0 ? x(it) : end.temperature;
        b.res(it, ef.conduction * (x(it) - end.temperature) + rc * theta_up * ef.flux);
        b.jac(it, it, ef.conduction + (ef.flux > 0.0 ? rc * ef.flux : 0.0));
        b.jac(it, ip, rc * theta_up * ef.transmissibility);
      }
    }
  }

  // Interface fluxes.
  RowMap rows_eta, rows_qc;
  rows_eta.index.assign(nf, -1);
  rows_eta.scale.assign(nf, 0.0);
  rows_qc = rows_eta;
  const Vec bp_grav = fo.bound_pressure_vector_source * rho_g;
  for (int ii = 0; ii < static_cast<int>(mdg.interfaces.size()); ++ii) {
    const auto& intf = mdg.interfaces[ii];
    const int fi = intf.fracture;
    for (int i = 0; i < intf.num_cells(); ++i) {
      const int f = intf.matrix_faces[i];
      const int lc = intf.fracture_cells[i];
      const int cm = g.any_cell(f);
      const auto coef = interface_coefficients(kin.aperture[fi][lc], prm.viscosity, prm.fluid_conductivity);
      const int ie = layout.eta(ii, i), iqc = layout.qc(ii, i), iqa = layout.qa(ii, i);
      const int ip = layout.pf(fi, lc), it = layout.tf(fi, lc);

      b.lin(ie, ie, 1.0);
      b.lin(ie, ip, coef.mass);
      rows_eta.index[f] = ie;
      rows_eta.scale[f] = -coef.mass;
      b.res(ie, -coef.mass * bp_grav(f));
      if (prm.gravity.squaredNorm() > 0.0) {
        const double rho = 0.5 * (cell_density(prm, x(ip), x(it)) +
                                  cell_density(prm, x(layout.pm(cm)), x(layout.tm(cm))));
        b.res(ie, -coef.normal_permeability / prm.viscosity * rho * prm.gravity.dot(intf.normal));
      }

      b.lin(iqc, iqc, 1.0);
      b.lin(iqc, it, coef.conduction);
      rows_qc.index[f] = iqc;
      rows_qc.scale[f] = -coef.conduction;

      const double eta = x(ie);
      const int up = eta > 0.0 ? layout.tm(cm) : it;
      b.lin(iqa, iqa, 1.0);
      b.res(iqa, -rc * eta * x(up));
      b.jac(iqa, ie, -rc * x(up));
      b.jac(iqa, up, -rc * eta);
    }
  }
  b.matrix(fo.bound_pressure_cell, rows_eta, col_p);
  b.matrix(fo.bound_pressure_face, rows_eta, col_flow_bc);
  b.matrix(ho.bound_pressure_cell, rows_qc, col_t);
  b.matrix(ho.bound_pressure_face, rows_qc, col_heat_bc);

  return b.finish();
}

double BalanceAudit::relative_error() const {
  const double imbalance = storage_change - boundary_inflow - sources;
  return std::abs(imbalance) / std::max(scale, 1e-300);
}

namespace {

double magnitude(const BalanceAudit& a) {
  return std::max({std::abs(a.storage_change), std::abs(a.boundary_inflow), std::abs(a.sources)});
}

}  // namespace

BalanceAudit mass_audit(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                        const StepData& step) {
  const auto& mdg = problem.grid;
  const auto& g = mdg.matrix;
  const auto& prm = problem.params;
  const Vec& xp = step.x_prev;
  const double dt = step.dt;
  BalanceAudit out;
  const Vec divu = cell_divergence(problem, disc, layout, x);
  for (int c = 0; c < g.num_cells(); ++c) {
    const double v = g.cell_volumes[c];
    const double ds = v * prm.storage_coefficient() * (x(layout.pm(c)) - xp(layout.pm(c))) +
                      prm.biot_alpha * (divu(c) - step.divu_prev(c)) -
                      v * prm.fluid_thermal_expansion * (x(layout.tm(c)) - xp(layout.tm(c)));
    out.storage_change += ds;
    out.scale += std::abs(ds);
    out.sources += dt * v * prm.matrix_fluid_source;
    out.scale += std::abs(dt * v * prm.matrix_fluid_source);
  }
  const Vec darcy = matrix_darcy_flux(problem, disc, layout, x);
  for (int f = 0; f < g.num_faces(); ++f) {
    if (!g.has_tag(f, face_tag::kDomainBoundary) || mdg.face_interface[f] >= 0) continue;
    const int c = g.any_cell(f);
    out.boundary_inflow -= dt * g.face_sign(c, f) * darcy(f);
    out.scale += std::abs(dt * darcy(f));
  }
  const auto kin = fracture_kinematics(problem, layout, x);
  const auto kin_prev = fracture_kinematics(problem, layout, xp);
  for (int fi = 0; fi < static_cast<int>(mdg.fractures.size()); ++fi) {
    const auto& fg = mdg.fractures[fi].grid;
    for (int lc = 0; lc < fg.num_cells(); ++lc) {
      const double len = fg.cell_volumes[lc];
      const double a = kin.aperture[fi][lc];
      const int ip = layout.pf(fi, lc), it = layout.tf(fi, lc);
      const double ds = len * (a * (prm.compressibility * (x(ip) - xp(ip)) -
                                    prm.fluid_thermal_expansion * (x(it) - xp(it))) +
                               (a - kin_prev.aperture[fi][lc]));
      out.storage_change += ds;
      out.scale += std::abs(ds);
      double q = dt * len * a * prm.fracture_fluid_source;
      if (fi < static_cast<int>(step.mass_correction.size()) &&
          lc < static_cast<int>(step.mass_correction[fi].size()) && step.mass_correction[fi][lc]) {
        q -= len * prm.residual_aperture;
      }
      out.sources += q;
      out.scale += std::abs(q);
    }
    for (int e = 0; e < fg.num_faces(); ++e) {
      if (!is_dirichlet_end(problem, fi, e)) continue;
      const double q = dt * fracture_end_flux(problem, layout, x, kin, fi, e).flux;
      out.boundary_inflow -= q;
      out.scale += std::abs(q);
    }
  }
  out.scale = std::max(out.scale, magnitude(out));
  return out;
}

BalanceAudit energy_audit(const Problem& problem, const Discretization& disc, const DofLayout& layout, const Vec& x,
                          const StepData& step) {
  const auto& mdg = problem.grid;
  const auto& g = mdg.matrix;
  const auto& prm = problem.params;
  const Vec& xp = step.x_prev;
  const double dt = step.dt;
  const double rc = prm.fluid_volumetric_heat();
  const double t0 = prm.reference_temperature;
  BalanceAudit out;
  const Vec divu = cell_divergence(problem, disc, layout, x);
  for (int c = 0; c < g.num_cells(); ++c) {
    const double v = g.cell_volumes[c];
    const double ds = v * prm.effective_heat_capacity() * (x(layout.tm(c)) - xp(layout.tm(c))) +
                      t0 * prm.solid_thermal_expansion * prm.bulk_modulus * (divu(c) - step.divu_prev(c)) -
                      t0 * v * prm.fluid_thermal_expansion * (x(layout.pm(c)) - xp(layout.pm(c)));
    out.storage_change += ds;
    out.scale += std::abs(ds);
    out.sources += dt * t0 * v * prm.matrix_heat_source;
    out.scale += std::abs(dt * t0 * v * prm.matrix_heat_source);
  }
  const Vec darcy = matrix_darcy_flux(problem, disc, layout, x);
  Vec theta(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) theta(c) = x(layout.tm(c));
  const Vec conductive = disc.heat().flux * theta + disc.heat().bound_flux * heat_boundary_vector(problem, layout, x);
  for (int f = 0; f < g.num_faces(); ++f) {
    if (!g.has_tag(f, face_tag::kDomainBoundary) || mdg.face_interface[f] >= 0) continue;
    const int c = g.any_cell(f);
    int up_dof = -1;
    const double adv = face_advection(problem, layout, x, f, darcy(f), up_dof);
    out.boundary_inflow -= dt * g.face_sign(c, f) * (conductive(f) + adv);
    out.scale += dt * (std::abs(conductive(f)) + std::abs(adv));
  }
  const auto kin = fracture_kinematics(problem, layout, x);
  const auto kin_prev = fracture_kinematics(problem, layout, xp);
  for (int fi = 0; fi < static_cast<int>(mdg.fractures.size()); ++fi) {
    const auto& fg = mdg.fractures[fi].grid;
    for (int lc = 0; lc < fg.num_cells(); ++lc) {
      const double len = fg.cell_volumes[lc];
      const double a = kin.aperture[fi][lc];
      const int ip = layout.pf(fi, lc), it = layout.tf(fi, lc);
      const double ds = len * (rc * x(it) * (a - kin_prev.aperture[fi][lc]) + rc * a * (x(it) - xp(it)) -
                               t0 * prm.fluid_thermal_expansion * a * (x(ip) - xp(ip)));
      out.storage_change += ds;
      out.scale += std::abs(ds);
      out.sources += dt * len * a * prm.fracture_fluid_source * rc * x(it);
      out.scale += std::abs(dt * len * a * prm.fracture_fluid_source * rc * x(it));
    }
    for (int e = 0; e < fg.num_faces(); ++e) {
      if (!is_dirichlet_end(problem, fi, e)) continue;
      const int c = fg.any_cell(e);
      const auto ef = fracture_end_flux(problem, layout, x, kin, fi, e);
      const double tb = problem.fracture_ends[fi].temperature;
      const double th = x(layout.tf(fi, c));
      const double cond = dt * ef.conduction * (th - tb);
      const double adv = dt * rc * (ef.flux > 0.0 ? th : tb) * ef.flux;
      out.boundary_inflow -= cond + adv;
      out.scale += std::abs(cond) + std::abs(adv);
    }
  }
  out.scale = std::max(out.scale, magnitude(out));
  return out;
}

}  // namespace thermofrac
