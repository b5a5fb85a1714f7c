#pragma once

#include <array>
#include <vector>

#include <Eigen/SparseCore>

#include "thermofrac/grid.hpp"

namespace thermofrac::detail {

/// Vertex patch: the faces meeting at a node and the cells around it.
struct InteractionRegion {
  int node = -1;
  std::vector<int> faces;
  std::vector<int> cells;
  /// Local face indices of the two subfaces of each local cell.
  std::vector<std::array<int, 2>> cell_subfaces;
  /// Local cell indices on the two sides of each local face (-1 if none),
  /// in the same slot order as SubdomainGrid::face_cells.
  std::vector<std::array<int, 2>> face_subcells;
};

InteractionRegion make_region(const SubdomainGrid& g, int node);

using Triplets = std::vector<Eigen::Triplet<double>>;

inline void add_dense_block(Triplets& t, int row0, int col0, const Eigen::MatrixXd& block, double tol = 0.0) {
  for (int j = 0; j < block.cols(); ++j) {
    for (int i = 0; i < block.rows(); ++i) {
      if (std::abs(block(i, j)) > tol) t.emplace_back(row0 + i, col0 + j, block(i, j));
    }
  }
}

Eigen::SparseMatrix<double> from_triplets(int rows, int cols, const std::vector<const Triplets*>& parts);

}  // namespace thermofrac::detail
