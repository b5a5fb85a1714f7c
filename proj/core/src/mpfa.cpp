#include "thermofrac/mpfa.hpp"

#include <Eigen/LU>

#include "interaction_region.hpp"

namespace thermofrac {

using detail::InteractionRegion;

std::vector<Eigen::Matrix2d> isotropic_tensors(const std::vector<double>& k) {
  std::vector<Eigen::Matrix2d> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = k[i] * Eigen::Matrix2d::Identity();
  return out;
}

void Mpfa::discretize(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor, const BoundaryKinds& bc) {
  regions_.assign(g.num_nodes(), {});
  for (int n = 0; n < g.num_nodes(); ++n) compute_region(g, tensor, bc, n);
  assemble(g);
}

void Mpfa::update(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor, const BoundaryKinds& bc,
                  const std::vector<int>& nodes) {
  regions_.resize(g.num_nodes());
  for (int n : nodes) compute_region(g, tensor, bc, n);
  assemble(g);
}

void Mpfa::compute_region(const SubdomainGrid& g, const std::vector<Eigen::Matrix2d>& tensor,
                          const BoundaryKinds& bc, int node) {
  RegionData& out = regions_[node];
  out = RegionData{};
  if (g.node_faces[node].empty()) return;
  const InteractionRegion r = detail::make_region(g, node);
  const int nf = static_cast<int>(r.faces.size());
  const int nc = static_cast<int>(r.cells.size());

  // Subface flux from each adjacent subcell, as a linear form in the local
  // continuity values u, cell potentials p and cell vector sources v.
  struct Form {
    Eigen::RowVectorXd u, p, v;
  };
  std::vector<std::array<Form, 2>> forms(nf);
  for (int lc = 0; lc < nc; ++lc) {
    const int c = r.cells[lc];
    const auto sub = r.cell_subfaces[lc];
    Eigen::Matrix2d d;
    for (int m = 0; m < 2; ++m) d.row(m) = (g.face_centers[r.faces[sub[m]]] - g.cell_centers[c]).transpose();
    const Eigen::Matrix2d dinv = d.inverse();  // gradient = dinv * (u_sub - p_c)
    for (int m = 0; m < 2; ++m) {
      const int lf = sub[m];
      const int f = r.faces[lf];
      const Eigen::RowVector2d kn = -(0.5 * tensor[c] * g.face_normals[f]).transpose();
      const Eigen::RowVector2d w = kn * dinv;
      Form fm{Eigen::RowVectorXd::Zero(nf), Eigen::RowVectorXd::Zero(nc), Eigen::RowVectorXd::Zero(2 * nc)};
      fm.u(sub[0]) += w(0);
      fm.u(sub[1]) += w(1);
      fm.p(lc) = -(w(0) + w(1));
      fm.v.segment<2>(2 * lc) = -kn.transpose();
      const int slot = r.face_subcells[lf][0] == lc ? 0 : 1;
      forms[lf][slot] = std::move(fm);
    }
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::MatrixXd rp = Eigen::MatrixXd::Zero(nf, nc);
  Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::MatrixXd rv = Eigen::MatrixXd::Zero(nf, 2 * nc);
  std::vector<BcKind> kind(nf);
  for (int lf = 0; lf < nf; ++lf) {
    const int f = r.faces[lf];
    kind[lf] = effective_kind(g, bc, f, BcKind::kNeumann);
    const auto sc = r.face_subcells[lf];
    if (kind[lf] == BcKind::kUnassigned) {
      a.row(lf) = forms[lf][0].u - forms[lf][1].u;
      rp.row(lf) = -(forms[lf][0].p - forms[lf][1].p);
      rv.row(lf) = -(forms[lf][0].v - forms[lf][1].v);
    } else if (kind[lf] == BcKind::kNeumann) {
      const Form& fm = forms[lf][sc[0] >= 0 ? 0 : 1];
      a.row(lf) = fm.u;
      rp.row(lf) = -fm.p;
      rv.row(lf) = -fm.v;
      rb(lf, lf) = 0.5;
    } else {
      a(lf, lf) = 1.0;
      rb(lf, lf) = 1.0;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd xp = lu.solve(rp);
  const Eigen::MatrixXd xb = lu.solve(rb);
  const Eigen::MatrixXd xv = lu.solve(rv);

  auto expand_cells = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& vals) {
    for (int lc = 0; lc < nc; ++lc) {
      if (vals(lc) != 0.0) t.emplace_back(row, r.cells[lc], vals(lc));
    }
  };
  auto expand_faces = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& vals) {
    for (int lf = 0; lf < nf; ++lf) {
      if (vals(lf) != 0.0) t.emplace_back(row, r.faces[lf], vals(lf));
    }
  };
  auto expand_vec = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& vals) {
    for (int lc = 0; lc < nc; ++lc) {
      for (int d = 0; d < 2; ++d) {
        if (vals(2 * lc + d) != 0.0) t.emplace_back(row, 2 * r.cells[lc] + d, vals(2 * lc + d));
      }
    }
  };

  for (int lf = 0; lf < nf; ++lf) {
    const int f = r.faces[lf];
    if (kind[lf] == BcKind::kNeumann) {
      out.bound_flux.emplace_back(f, f, 0.5);
    } else {
      const Form& fm = forms[lf][r.face_subcells[lf][0] >= 0 ? 0 : 1];
      expand_cells(out.flux, f, fm.u * xp + fm.p);
      expand_faces(out.bound_flux, f, fm.u * xb);
      expand_vec(out.vsrc, f, fm.u * xv + fm.v);
    }
    expand_cells(out.bp_cell, f, 0.5 * xp.row(lf));
    expand_faces(out.bp_face, f, 0.5 * xb.row(lf));
    expand_vec(out.bp_vsrc, f, 0.5 * xv.row(lf));
  }
}

void Mpfa::assemble(const SubdomainGrid& g) {
  const int nf = g.num_faces();
  const int nc = g.num_cells();
  auto collect = [&](auto member) {
    std::vector<const detail::Triplets*> parts;
    for (const auto& r : regions_) parts.push_back(&(r.*member));
    return parts;
  };
  ops_.flux = detail::from_triplets(nf, nc, collect(&RegionData::flux));
  ops_.bound_flux = detail::from_triplets(nf, nf, collect(&RegionData::bound_flux));
  ops_.vector_source = detail::from_triplets(nf, 2 * nc, collect(&RegionData::vsrc));
  ops_.bound_pressure_cell = detail::from_triplets(nf, nc, collect(&RegionData::bp_cell));
  ops_.bound_pressure_face = detail::from_triplets(nf, nf, collect(&RegionData::bp_face));
  ops_.bound_pressure_vector_source = detail::from_triplets(nf, 2 * nc, collect(&RegionData::bp_vsrc));
}

}  // namespace thermofrac
