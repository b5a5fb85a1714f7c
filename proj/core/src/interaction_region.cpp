#include "interaction_region.hpp"

#include <algorithm>
#include <string>

#include "thermofrac/boundary.hpp"

namespace thermofrac::detail {

InteractionRegion make_region(const SubdomainGrid& g, int node) {
  InteractionRegion r;
  r.node = node;
  r.faces = g.node_faces[node];
  std::sort(r.faces.begin(), r.faces.end());
  for (int f : r.faces) {
    for (int c : g.face_cells[f]) {
      if (c >= 0 && std::find(r.cells.begin(), r.cells.end(), c) == r.cells.end()) r.cells.push_back(c);
    }
  }
  std::sort(r.cells.begin(), r.cells.end());
  r.cell_subfaces.assign(r.cells.size(), {-1, -1});
  r.face_subcells.assign(r.faces.size(), {-1, -1});
  for (int lf = 0; lf < static_cast<int>(r.faces.size()); ++lf) {
    for (int slot = 0; slot < 2; ++slot) {
      const int c = g.face_cells[r.faces[lf]][slot];
      if (c < 0) continue;
      const int lc = static_cast<int>(std::lower_bound(r.cells.begin(), r.cells.end(), c) - r.cells.begin());
      r.face_subcells[lf][slot] = lc;
      auto& sub = r.cell_subfaces[lc];
      if (sub[0] < 0) {
        sub[0] = lf;
      } else if (sub[1] < 0) {
        sub[1] = lf;
      } else {
        throw DiscretizationError("cell " + std::to_string(c) + " has more than two faces at node " +
                                  std::to_string(node));
      }
    }
  }
  for (std::size_t lc = 0; lc < r.cells.size(); ++lc) {
    if (r.cell_subfaces[lc][1] < 0) {
      throw DiscretizationError("cell " + std::to_string(r.cells[lc]) + " has a single face at node " +
                                std::to_string(node));
    }
  }
  return r;
}

Eigen::SparseMatrix<double> from_triplets(int rows, int cols, const std::vector<const Triplets*>& parts) {
  std::size_t n = 0;
  for (const auto* p : parts) n += p->size();
  Triplets all;
  all.reserve(n);
  for (const auto* p : parts) all.insert(all.end(), p->begin(), p->end());
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(all.begin(), all.end());
  m.prune(0.0);
  return m;
}

}  // namespace thermofrac::detail
