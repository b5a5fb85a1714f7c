#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace thermofrac {

using Vec2 = Eigen::Vector2d;

namespace face_tag {
inline constexpr std::uint8_t kNone = 0;
inline constexpr std::uint8_t kDomainBoundary = 1;
inline constexpr std::uint8_t kFractureSurface = 2;
inline constexpr std::uint8_t kFractureTip = 4;
}  // namespace face_tag

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellFace {
  int face;
  int sign;  // +1 if the stored face normal points out of the cell
};

/// Cell-centred grid of dimension 2 (matrix) or 1 (fracture).
///
/// Faces carry a single stored normal scaled by the face measure.
/// `face_cells[f][0]` is the cell the normal points out of, `[1]` the cell it
/// points into; either slot is -1 for faces with one neighbour. For 1D grids
/// the faces are points, their normals are unit tangents and their measure is 1.
struct SubdomainGrid {
  int dim = 2;

  std::vector<Vec2> nodes;
  std::vector<std::array<int, 2>> face_nodes;
  std::vector<std::vector<int>> node_faces;

  std::vector<Vec2> face_centers;
  std::vector<Vec2> face_normals;
  std::vector<double> face_areas;
  std::vector<std::array<int, 2>> face_cells;
  std::vector<std::uint8_t> face_tags;

  std::vector<Vec2> cell_centers;
  std::vector<double> cell_volumes;
  std::vector<std::vector<CellFace>> cell_faces;

  int num_cells() const { return static_cast<int>(cell_centers.size()); }
  int num_faces() const { return static_cast<int>(face_centers.size()); }
  int num_nodes() const { return static_cast<int>(nodes.size()); }

  bool has_tag(int face, std::uint8_t tag) const { return (face_tags[face] & tag) != 0; }
  int num_neighbours(int face) const {
    return (face_cells[face][0] >= 0 ? 1 : 0) + (face_cells[face][1] >= 0 ? 1 : 0);
  }
  /// Any neighbour of a face; for faces with one neighbour, the only one.
  int any_cell(int face) const {
    return face_cells[face][0] >= 0 ? face_cells[face][0] : face_cells[face][1];
  }
  int face_sign(int cell, int face) const { return face_cells[face][0] == cell ? 1 : -1; }
  Vec2 unit_normal(int face) const { return face_normals[face] / face_areas[face]; }

  /// Counter-clockwise node loop of a 2D cell.
  std::vector<int> cell_nodes(int cell) const;
};

enum class Side { J, K };

/// Mortar grid on one side of a fracture. Cell i coincides with matrix face
/// `matrix_faces[i]` and fracture cell `fracture_cells[i]`.
struct MortarInterface {
  Side side = Side::J;
  int fracture = -1;
  Vec2 fracture_normal = Vec2::Zero();  // n_l
  Vec2 normal = Vec2::Zero();           // outward matrix normal n_h on this side
  std::vector<int> matrix_faces;
  std::vector<int> fracture_cells;
  std::vector<Vec2> cell_centers;
  std::vector<double> cell_volumes;

  int num_cells() const { return static_cast<int>(matrix_faces.size()); }
  double orientation() const { return side == Side::J ? 1.0 : -1.0; }
};

struct Fracture {
  SubdomainGrid grid;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  int interface_j = -1;
  int interface_k = -1;
  /// Matrix node (j-side copy) coinciding with each 1D face.
  std::vector<int> face_matrix_node;

  double length() const;
};

struct Segment {
  Vec2 start;
  Vec2 end;
};

struct MixedDimGrid {
  Vec2 lower = Vec2::Zero();
  Vec2 upper = Vec2::Zero();
  double h = 0.0;

  SubdomainGrid matrix;
  std::vector<Fracture> fractures;
  std::vector<MortarInterface> interfaces;

  /// Per matrix face: owning interface and mortar cell, -1 if none.
  std::vector<int> face_interface;
  std::vector<int> face_mortar_cell;
  /// Per matrix node: its duplicate across a fracture, -1 if none.
  std::vector<int> node_twin;

  /// Incremented on every topology change.
  std::uint64_t revision = 0;

  int num_fracture_cells() const;
  int num_mortar_cells() const;
  bool on_domain_boundary(const Vec2& x) const;
};

enum class SplitStatus { kSplit, kBlocked, kCoalescence };

/// Bookkeeping for one face split.
struct PropagationEvent {
  SplitStatus status = SplitStatus::kBlocked;
  int fracture = -1;
  int tip_face = -1;           // 1D face that was the tip
  int split_face = -1;         // matrix face that became the j-side fracture face
  int new_face = -1;           // its k-side duplicate
  int new_fracture_cell = -1;  // local index in the fracture grid
  int new_tip_face = -1;       // 1D face at the new far end
  std::array<int, 2> new_mortar_cells{-1, -1};
  int duplicated_node = -1;
  int new_node = -1;
  std::vector<int> affected_nodes;
  std::string message;
};

MixedDimGrid build_cartesian_mdg(const Vec2& extent, double h, const std::vector<Segment>& fractures);

struct Decomposition {
  double normal;
  Vec2 tangential;
};
Decomposition decompose(const Vec2& v, const Vec2& unit_normal);
Decomposition decompose(const Vec2& v, const MortarInterface& interface);

/// u_k - u_j per fracture cell, from one displacement per mortar cell on each side.
std::vector<Vec2> displacement_jump(const MixedDimGrid& mdg, int fracture,
                                    const std::vector<Vec2>& u_j, const std::vector<Vec2>& u_k);

/// Splits the matrix face collinearly ahead of a fracture tip.
PropagationEvent split_tip_face(MixedDimGrid& mdg, int fracture, int tip_face);

/// Returns human-readable violations of the grid invariants (empty if none).
std::vector<std::string> check_consistency(const MixedDimGrid& mdg);

void write_debug_dump(const MixedDimGrid& mdg, std::ostream& os);

}  // namespace thermofrac
