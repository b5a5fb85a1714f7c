#include "thermofrac/mpsa.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include "interaction_region.hpp"

namespace thermofrac {

using detail::InteractionRegion;

void Mpsa::discretize(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc) {
  regions_.assign(g.num_nodes(), {});
  for (int n = 0; n < g.num_nodes(); ++n) compute_region(g, lame, bc, n);
  assemble(g);
}

void Mpsa::update(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc,
                  const std::vector<int>& nodes) {
  regions_.resize(g.num_nodes());
  for (int n : nodes) compute_region(g, lame, bc, n);
  assemble(g);
}

int Mpsa::singular_regions() const {
  int n = 0;
  for (const auto& r : regions_) n += r.singular;
  return n;
}

void Mpsa::compute_region(const SubdomainGrid& g, const std::vector<Lame>& lame, const BoundaryKinds& bc,
                          int node) {
  RegionData& out = regions_[node];
  out = RegionData{};
  if (g.node_faces[node].empty()) return;
  const InteractionRegion r = detail::make_region(g, node);
  const int nf = static_cast<int>(r.faces.size());
  const int nc = static_cast<int>(r.cells.size());
  const int nx = 2 * nf + 1;  // subface displacements and the rotation
  const int rot = 2 * nf;

  // Subface traction from each adjacent subcell as linear forms in the local
  // unknowns x, the cell displacements u and the cell scalar stresses q.
  struct Form {
    Eigen::MatrixXd x, u, q;
  };
  std::vector<std::array<Form, 2>> forms(nf);
  Eigen::RowVectorXd ws_x = Eigen::RowVectorXd::Zero(nx);
  Eigen::RowVectorXd ws_u = Eigen::RowVectorXd::Zero(2 * nc);
  // Divergence contributions: sum over subfaces of sign * N/2 . d
  Eigen::MatrixXd div_x = Eigen::MatrixXd::Zero(nc, nx);

  for (int lc = 0; lc < nc; ++lc) {
    const int c = r.cells[lc];
    const auto sub = r.cell_subfaces[lc];
    Eigen::Matrix2d dt;
    for (int m = 0; m < 2; ++m) dt.col(m) = g.face_centers[r.faces[sub[m]]] - g.cell_centers[c];
    const Eigen::Matrix2d e = dt.inverse();  // G = [d0 - u, d1 - u] * e
    const double mu = lame[c].mu;
    const double la = lame[c].lambda;

    // Skew part of the gradient, omega = (G10 - G01) / 2.
    const double w = mu * g.cell_volumes[c] / static_cast<double>(g.cell_nodes(c).size());
    for (int m = 0; m < 2; ++m) {
      const int dx = 2 * sub[m];
      ws_x(dx + 1) += w * 0.5 * e(m, 0);
      ws_x(dx + 0) -= w * 0.5 * e(m, 1);
      ws_u(2 * lc + 1) -= w * 0.5 * e(m, 0);
      ws_u(2 * lc + 0) += w * 0.5 * e(m, 1);
    }
    ws_x(rot) -= w;

    for (int s = 0; s < 2; ++s) {
      const int lf = sub[s];
      const int f = r.faces[lf];
      const Vec2 n = 0.5 * g.face_normals[f];
      const Eigen::Vector2d en = e * n;
      Form fm{Eigen::MatrixXd::Zero(2, nx), Eigen::MatrixXd::Zero(2, 2 * nc), Eigen::MatrixXd::Zero(2, nc)};
      for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < 2; ++i) {
          for (int k = 0; k < 2; ++k) {
            const double coef = (i == k ? 2.0 * mu * en(m) : 0.0) + la * n(i) * e(m, k);
            fm.x(i, 2 * sub[m] + k) += coef;
            fm.u(i, 2 * lc + k) -= coef;
          }
        }
      }
      fm.x(0, rot) = 2.0 * mu * n(1);
      fm.x(1, rot) = -2.0 * mu * n(0);
      fm.q(0, lc) = -n(0);
      fm.q(1, lc) = -n(1);
      const int slot = r.face_subcells[lf][0] == lc ? 0 : 1;
      forms[lf][slot] = std::move(fm);

      const double sign = slot == 0 ? 1.0 : -1.0;
      div_x(lc, 2 * lf) += sign * n(0);
      div_x(lc, 2 * lf + 1) += sign * n(1);
    }
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd ru = Eigen::MatrixXd::Zero(nx, 2 * nc);
  Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(nx, 2 * nf);
  Eigen::MatrixXd rq = Eigen::MatrixXd::Zero(nx, nc);
  std::vector<BcKind> kind(nf);
  for (int lf = 0; lf < nf; ++lf) {
    const int f = r.faces[lf];
    kind[lf] = effective_kind(g, bc, f, BcKind::kDirichlet);
    const auto sc = r.face_subcells[lf];
    const int row = 2 * lf;
    if (kind[lf] == BcKind::kUnassigned) {
      a.middleRows(row, 2) = forms[lf][0].x - forms[lf][1].x;
      ru.middleRows(row, 2) = -(forms[lf][0].u - forms[lf][1].u);
      rq.middleRows(row, 2) = -(forms[lf][0].q - forms[lf][1].q);
    } else if (kind[lf] == BcKind::kNeumann) {
      const Form& fm = forms[lf][sc[0] >= 0 ? 0 : 1];
      a.middleRows(row, 2) = fm.x;
      ru.middleRows(row, 2) = -fm.u;
      rq.middleRows(row, 2) = -fm.q;
      rb(row, row) = 0.5;
      rb(row + 1, row + 1) = 0.5;
    } else {
      a(row, row) = 1.0;
      a(row + 1, row + 1) = 1.0;
      rb(row, row) = 1.0;
      rb(row + 1, row + 1) = 1.0;
    }
  }
  a.row(rot) = ws_x;
  ru.row(rot) = -ws_u;

  Eigen::MatrixXd rhs(nx, 2 * nc + 2 * nf + nc);
  rhs << ru, rb, rq;
  Eigen::MatrixXd sol;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
  } else {
    // Regions with only traction conditions on a single cell leave the
    // rotation undetermined; take the minimum-norm solution.
    out.singular = true;
    sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(rhs);
  }
  const Eigen::MatrixXd xu = sol.leftCols(2 * nc);
  const Eigen::MatrixXd xb = sol.middleCols(2 * nc, 2 * nf);
  const Eigen::MatrixXd xq = sol.rightCols(nc);

  auto put_cells2 = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& v) {
    for (int lc = 0; lc < nc; ++lc) {
      for (int d = 0; d < 2; ++d) {
        if (v(2 * lc + d) != 0.0) t.emplace_back(row, 2 * r.cells[lc] + d, v(2 * lc + d));
      }
    }
  };
  auto put_faces2 = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& v) {
    for (int lf = 0; lf < nf; ++lf) {
      for (int d = 0; d < 2; ++d) {
        if (v(2 * lf + d) != 0.0) t.emplace_back(row, 2 * r.faces[lf] + d, v(2 * lf + d));
      }
    }
  };
  auto put_cells = [&](detail::Triplets& t, int row, const Eigen::RowVectorXd& v) {
    for (int lc = 0; lc < nc; ++lc) {
      if (v(lc) != 0.0) t.emplace_back(row, r.cells[lc], v(lc));
    }
  };

  for (int lf = 0; lf < nf; ++lf) {
    const int f = r.faces[lf];
    for (int i = 0; i < 2; ++i) {
      const int row = 2 * f + i;
      if (kind[lf] == BcKind::kNeumann) {
        out.bstress.emplace_back(row, row, 0.5);
      } else {
        const Form& fm = forms[lf][r.face_subcells[lf][0] >= 0 ? 0 : 1];
        put_cells2(out.stress, row, fm.x.row(i) * xu + fm.u.row(i));
        put_faces2(out.bstress, row, fm.x.row(i) * xb);
        put_cells(out.sscalar, row, fm.x.row(i) * xq + fm.q.row(i));
      }
      put_cells2(out.bd_cell, row, 0.5 * xu.row(2 * lf + i));
      put_faces2(out.bd_face, row, 0.5 * xb.row(2 * lf + i));
      put_cells(out.bd_scalar, row, 0.5 * xq.row(2 * lf + i));
    }
  }
  for (int lc = 0; lc < nc; ++lc) {
    const int c = r.cells[lc];
    put_cells2(out.div_u, c, div_x.row(lc) * xu);
    put_faces2(out.div_bc, c, div_x.row(lc) * xb);
    put_cells(out.div_scalar, c, div_x.row(lc) * xq);
  }
}

void Mpsa::assemble(const SubdomainGrid& g) {
  const int nf = g.num_faces();
  const int nc = g.num_cells();
  auto collect = [&](auto member) {
    std::vector<const detail::Triplets*> parts;
    for (const auto& r : regions_) parts.push_back(&(r.*member));
    return parts;
  };
  ops_.stress = detail::from_triplets(2 * nf, 2 * nc, collect(&RegionData::stress));
  ops_.bound_stress = detail::from_triplets(2 * nf, 2 * nf, collect(&RegionData::bstress));
  ops_.stress_scalar = detail::from_triplets(2 * nf, nc, collect(&RegionData::sscalar));
  ops_.bound_displacement_cell = detail::from_triplets(2 * nf, 2 * nc, collect(&RegionData::bd_cell));
  ops_.bound_displacement_face = detail::from_triplets(2 * nf, 2 * nf, collect(&RegionData::bd_face));
  ops_.bound_displacement_scalar = detail::from_triplets(2 * nf, nc, collect(&RegionData::bd_scalar));
  ops_.div_u = detail::from_triplets(nc, 2 * nc, collect(&RegionData::div_u));
  ops_.div_bc = detail::from_triplets(nc, 2 * nf, collect(&RegionData::div_bc));
  ops_.div_scalar = detail::from_triplets(nc, nc, collect(&RegionData::div_scalar));
}

}  // namespace thermofrac
