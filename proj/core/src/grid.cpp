#include "thermofrac/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace thermofrac {

namespace {

constexpr double kGeomTol = 1e-10;

bool near(const Vec2& a, const Vec2& b, double scale) { return (a - b).norm() <= kGeomTol * scale; }

int push_face(SubdomainGrid& g, std::array<int, 2> nodes, const Vec2& center, const Vec2& normal,
              double area, std::array<int, 2> cells, std::uint8_t tags) {
  const int f = g.num_faces();
  g.face_nodes.push_back(nodes);
  g.face_centers.push_back(center);
  g.face_normals.push_back(normal);
  g.face_areas.push_back(area);
  g.face_cells.push_back(cells);
  g.face_tags.push_back(tags);
  if (g.dim == 2) {
    for (int n : nodes) g.node_faces[n].push_back(f);
  }
  return f;
}

void replace_node_of_face(SubdomainGrid& g, int face, int old_node, int new_node) {
  for (int& n : g.face_nodes[face]) {
    if (n == old_node) n = new_node;
  }
  auto& of = g.node_faces[old_node];
  of.erase(std::remove(of.begin(), of.end(), face), of.end());
  g.node_faces[new_node].push_back(face);
}

void flip_face(SubdomainGrid& g, int face) {
  g.face_normals[face] = -g.face_normals[face];
  std::swap(g.face_cells[face][0], g.face_cells[face][1]);
  for (int c : g.face_cells[face]) {
    if (c < 0) continue;
    for (auto& cf : g.cell_faces[c]) {
      if (cf.face == face) cf.sign = -cf.sign;
    }
  }
}

int other_node(const SubdomainGrid& g, int face, int node) {
  const auto& fn = g.face_nodes[face];
  return fn[0] == node ? fn[1] : fn[0];
}

int find_point_face(const Fracture& fr, int matrix_node) {
  for (int e = 0; e < fr.grid.num_faces(); ++e) {
    if (fr.face_matrix_node[e] == matrix_node) return e;
  }
  return -1;
}

void refresh_fracture_tags(const MixedDimGrid& mdg, Fracture& fr) {
  auto& g = fr.grid;
  for (int e = 0; e < g.num_faces(); ++e) {
    if (g.num_neighbours(e) == 2) {
      g.face_tags[e] = face_tag::kNone;
    } else if (mdg.on_domain_boundary(g.face_centers[e])) {
      g.face_tags[e] = face_tag::kDomainBoundary;
    } else {
      g.face_tags[e] = face_tag::kFractureTip;
    }
  }
}

struct AddedFace {
  int new_face;
  int fracture_cell;
  int mortar_cell;
};

// Turns an interior matrix face into a fracture face pair and extends the
// fracture and its two mortar grids by one cell.
AddedFace add_fracture_face(MixedDimGrid& mdg, int fi, int face) {
  auto& m = mdg.matrix;
  auto& fr = mdg.fractures[fi];
  if (m.num_neighbours(face) != 2 || m.has_tag(face, face_tag::kFractureSurface)) {
    throw GridError("face " + std::to_string(face) + " is not an interior matrix face");
  }
  if (m.unit_normal(face).dot(fr.normal) < 0.0) flip_face(m, face);

  const int ck = m.face_cells[face][1];
  const int fk = push_face(m, m.face_nodes[face], m.face_centers[face], m.face_normals[face],
                           m.face_areas[face], {-1, ck}, face_tag::kFractureSurface);
  m.face_cells[face][1] = -1;
  m.face_tags[face] |= face_tag::kFractureSurface;
  for (auto& cf : m.cell_faces[ck]) {
    if (cf.face == face) cf.face = fk;
  }

  auto& g = fr.grid;
  const int c1 = g.num_cells();
  g.cell_centers.push_back(m.face_centers[face]);
  g.cell_volumes.push_back(m.face_areas[face]);
  g.cell_faces.emplace_back();
  for (int nd : m.face_nodes[face]) {
    int e = find_point_face(fr, nd);
    if (e < 0) {
      e = push_face(g, {-1, -1}, m.nodes[nd], fr.tangent, 1.0, {-1, -1}, face_tag::kNone);
      fr.face_matrix_node.push_back(nd);
    }
    const bool forward = (m.nodes[nd] - g.cell_centers[c1]).dot(fr.tangent) > 0.0;
    g.face_cells[e][forward ? 0 : 1] = c1;
    g.cell_faces[c1].push_back({e, forward ? 1 : -1});
  }
  refresh_fracture_tags(mdg, fr);

  const int mc = mdg.interfaces[fr.interface_j].num_cells();
  for (int side = 0; side < 2; ++side) {
    auto& intf = mdg.interfaces[side == 0 ? fr.interface_j : fr.interface_k];
    const int mf = side == 0 ? face : fk;
    intf.matrix_faces.push_back(mf);
    intf.fracture_cells.push_back(c1);
    intf.cell_centers.push_back(m.face_centers[mf]);
    intf.cell_volumes.push_back(m.face_areas[mf]);
  }
  mdg.face_interface.resize(m.num_faces(), -1);
  mdg.face_mortar_cell.resize(m.num_faces(), -1);
  mdg.face_interface[face] = fr.interface_j;
  mdg.face_mortar_cell[face] = mc;
  mdg.face_interface[fk] = fr.interface_k;
  mdg.face_mortar_cell[fk] = mc;
  return {fk, c1, mc};
}

bool is_fracture_line_face(const SubdomainGrid& m, int face, const Vec2& normal) {
  return std::abs(std::abs(m.unit_normal(face).dot(normal)) - 1.0) < 1e-9;
}

// A node is split when the fracture passes through it (both collinear faces
// are fracture faces) or when the fracture ends on the domain boundary.
int maybe_duplicate_node(MixedDimGrid& mdg, int fi, int node) {
  auto& m = mdg.matrix;
  const auto& fr = mdg.fractures[fi];
  if (mdg.node_twin[node] >= 0) return -1;

  std::vector<Vec2> fracture_dirs;
  for (int f : m.node_faces[node]) {
    if (!m.has_tag(f, face_tag::kFractureSurface) || !is_fracture_line_face(m, f, fr.normal)) continue;
    Vec2 d = (m.face_centers[f] - m.nodes[node]).normalized();
    bool seen = false;
    for (const auto& o : fracture_dirs) seen = seen || (o - d).norm() < 1e-9;
    if (!seen) fracture_dirs.push_back(d);
  }
  const bool boundary = mdg.on_domain_boundary(m.nodes[node]);
  const bool split = (boundary && !fracture_dirs.empty()) || fracture_dirs.size() >= 2;
  if (!split) return -1;

  const int twin = m.num_nodes();
  m.nodes.push_back(m.nodes[node]);
  m.node_faces.emplace_back();
  mdg.node_twin[node] = twin;
  mdg.node_twin.push_back(node);

  const std::vector<int> faces = m.node_faces[node];
  for (int f : faces) {
    bool k_side;
    if (m.has_tag(f, face_tag::kFractureSurface) && is_fracture_line_face(m, f, fr.normal)) {
      k_side = m.face_cells[f][0] < 0;
    } else {
      k_side = (m.face_centers[f] - m.nodes[node]).dot(fr.normal) > 0.0;
    }
    if (k_side) replace_node_of_face(m, f, node, twin);
  }
  return twin;
}

}  // namespace

std::vector<int> SubdomainGrid::cell_nodes(int cell) const {
  std::vector<int> out;
  for (const auto& cf : cell_faces[cell]) {
    for (int n : face_nodes[cf.face]) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
  const Vec2 c = cell_centers[cell];
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    const Vec2 da = nodes[a] - c;
    const Vec2 db = nodes[b] - c;
    return std::atan2(da.y(), da.x()) < std::atan2(db.y(), db.x());
  });
  return out;
}

double Fracture::length() const {
  return std::accumulate(grid.cell_volumes.begin(), grid.cell_volumes.end(), 0.0);
}

int MixedDimGrid::num_fracture_cells() const {
  int n = 0;
  for (const auto& f : fractures) n += f.grid.num_cells();
  return n;
}

int MixedDimGrid::num_mortar_cells() const {
  int n = 0;
  for (const auto& i : interfaces) n += i.num_cells();
  return n;
}

bool MixedDimGrid::on_domain_boundary(const Vec2& x) const {
  const double tol = kGeomTol * std::max(1.0, (upper - lower).norm());
  return std::abs(x.x() - lower.x()) < tol || std::abs(x.x() - upper.x()) < tol ||
         std::abs(x.y() - lower.y()) < tol || std::abs(x.y() - upper.y()) < tol;
}

MixedDimGrid build_cartesian_mdg(const Vec2& extent, double h, const std::vector<Segment>& fractures) {
  if (!(h > 0.0) || !(extent.x() > 0.0) || !(extent.y() > 0.0)) {
    throw GridError("domain extent and cell size must be positive");
  }
  MixedDimGrid mdg;
  mdg.lower = Vec2::Zero();
  mdg.upper = extent;
  mdg.h = h;

  const int nx = static_cast<int>(std::ceil(extent.x() / h - 1e-9));
  const int ny = static_cast<int>(std::ceil(extent.y() / h - 1e-9));
  auto xcoord = [&](int i) { return std::min(i * h, extent.x()); };
  auto ycoord = [&](int j) { return std::min(j * h, extent.y()); };
  auto node_id = [&](int i, int j) { return j * (nx + 1) + i; };
  auto cell_id = [&](int i, int j) { return j * nx + i; };

  auto& m = mdg.matrix;
  m.dim = 2;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.nodes.emplace_back(xcoord(i), ycoord(j));
  }
  m.node_faces.resize(m.nodes.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double dx = xcoord(i + 1) - xcoord(i);
      const double dy = ycoord(j + 1) - ycoord(j);
      m.cell_centers.emplace_back(xcoord(i) + 0.5 * dx, ycoord(j) + 0.5 * dy);
      m.cell_volumes.push_back(dx * dy);
    }
  }
  m.cell_faces.resize(m.cell_centers.size());

  // Vertical faces, normal +x.
  std::vector<int> vface((nx + 1) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double dy = ycoord(j + 1) - ycoord(j);
      const int left = i > 0 ? cell_id(i - 1, j) : -1;
      const int right = i < nx ? cell_id(i, j) : -1;
      const std::uint8_t tag = (left < 0 || right < 0) ? face_tag::kDomainBoundary : face_tag::kNone;
      const int f = push_face(m, {node_id(i, j), node_id(i, j + 1)},
                              Vec2(xcoord(i), ycoord(j) + 0.5 * dy), Vec2(dy, 0.0), dy, {left, right}, tag);
      vface[j * (nx + 1) + i] = f;
      if (left >= 0) m.cell_faces[left].push_back({f, 1});
      if (right >= 0) m.cell_faces[right].push_back({f, -1});
    }
  }
  // Horizontal faces, normal +y.
  std::vector<int> hface(nx * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double dx = xcoord(i + 1) - xcoord(i);
      const int below = j > 0 ? cell_id(i, j - 1) : -1;
      const int above = j < ny ? cell_id(i, j) : -1;
      const std::uint8_t tag = (below < 0 || above < 0) ? face_tag::kDomainBoundary : face_tag::kNone;
      const int f = push_face(m, {node_id(i, j), node_id(i + 1, j)},
                              Vec2(xcoord(i) + 0.5 * dx, ycoord(j)), Vec2(0.0, dx), dx, {below, above}, tag);
      hface[j * nx + i] = f;
      if (below >= 0) m.cell_faces[below].push_back({f, 1});
      if (above >= 0) m.cell_faces[above].push_back({f, -1});
    }
  }
  mdg.node_twin.assign(m.nodes.size(), -1);
  mdg.face_interface.assign(m.num_faces(), -1);
  mdg.face_mortar_cell.assign(m.num_faces(), -1);

  // Validate segments.
  auto grid_index = [&](double v, const char* what) {
    const double r = v / h;
    const double ri = std::round(r);
    if (std::abs(r - ri) > 1e-9) {
      std::ostringstream os;
      os << "fracture " << what << " coordinate " << v << " is not a multiple of h=" << h;
      throw GridError(os.str());
    }
    return static_cast<int>(ri);
  };
  struct Span {
    bool horizontal;
    int line, lo, hi;
  };
  std::vector<Span> spans;
  for (const auto& s : fractures) {
    const bool horizontal = std::abs(s.start.y() - s.end.y()) < 1e-12 * std::max(1.0, extent.norm());
    const bool vertical = std::abs(s.start.x() - s.end.x()) < 1e-12 * std::max(1.0, extent.norm());
    if (horizontal == vertical) throw GridError("fracture segment is not axis-aligned or is degenerate");
    Span sp;
    sp.horizontal = horizontal;
    if (horizontal) {
      sp.line = grid_index(s.start.y(), "y");
      sp.lo = grid_index(std::min(s.start.x(), s.end.x()), "x");
      sp.hi = grid_index(std::max(s.start.x(), s.end.x()), "x");
      if (sp.line <= 0 || sp.line >= ny || sp.lo < 0 || sp.hi > nx) {
        throw GridError("horizontal fracture segment lies outside the domain interior");
      }
    } else {
      sp.line = grid_index(s.start.x(), "x");
      sp.lo = grid_index(std::min(s.start.y(), s.end.y()), "y");
      sp.hi = grid_index(std::max(s.start.y(), s.end.y()), "y");
      if (sp.line <= 0 || sp.line >= nx || sp.lo < 0 || sp.hi > ny) {
        throw GridError("vertical fracture segment lies outside the domain interior");
      }
    }
    for (const auto& o : spans) {
      bool hit;
      if (o.horizontal == sp.horizontal) {
        hit = o.line == sp.line && o.lo <= sp.hi && sp.lo <= o.hi;
      } else {
        hit = o.line >= sp.lo && o.line <= sp.hi && sp.line >= o.lo && sp.line <= o.hi;
      }
      if (hit) throw GridError("fracture segments overlap or intersect");
    }
    spans.push_back(sp);
  }

  for (const auto& sp : spans) {
    const int fi = static_cast<int>(mdg.fractures.size());
    Fracture fr;
    fr.grid.dim = 1;
    fr.normal = sp.horizontal ? Vec2(0.0, 1.0) : Vec2(1.0, 0.0);
    fr.tangent = sp.horizontal ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
    fr.interface_j = static_cast<int>(mdg.interfaces.size());
    fr.interface_k = fr.interface_j + 1;
    for (Side side : {Side::J, Side::K}) {
      MortarInterface intf;
      intf.side = side;
      intf.fracture = fi;
      intf.fracture_normal = fr.normal;
      intf.normal = side == Side::J ? fr.normal : Vec2(-fr.normal);
      mdg.interfaces.push_back(intf);
    }
    mdg.fractures.push_back(std::move(fr));

    std::vector<int> line_nodes;
    for (int t = sp.lo; t < sp.hi; ++t) {
      const int f = sp.horizontal ? hface[sp.line * nx + t] : vface[t * (nx + 1) + sp.line];
      add_fracture_face(mdg, fi, f);
    }
    for (int t = sp.lo; t <= sp.hi; ++t) {
      line_nodes.push_back(sp.horizontal ? node_id(t, sp.line) : node_id(sp.line, t));
    }
    for (int nd : line_nodes) maybe_duplicate_node(mdg, fi, nd);
  }
  return mdg;
}

Decomposition decompose(const Vec2& v, const Vec2& unit_normal) {
  if (std::abs(unit_normal.norm() - 1.0) > 1e-12) {
    throw std::logic_error("decompose: normal vector is not a unit vector");
  }
  const double vn = v.dot(unit_normal);
  return {vn, v - vn * unit_normal};
}

Decomposition decompose(const Vec2& v, const MortarInterface& interface) {
  return decompose(v, interface.fracture_normal);
}

std::vector<Vec2> displacement_jump(const MixedDimGrid& mdg, int fracture, const std::vector<Vec2>& u_j,
                                    const std::vector<Vec2>& u_k) {
  const auto& fr = mdg.fractures.at(fracture);
  const auto& ij = mdg.interfaces[fr.interface_j];
  const auto& ik = mdg.interfaces[fr.interface_k];
  if (static_cast<int>(u_j.size()) != ij.num_cells() || static_cast<int>(u_k.size()) != ik.num_cells() ||
      ij.num_cells() != ik.num_cells()) {
    throw std::invalid_argument("displacement_jump: mortar sizes do not match the interface pair");
  }
  std::vector<Vec2> jump(fr.grid.num_cells(), Vec2::Zero());
  for (int i = 0; i < ik.num_cells(); ++i) jump[ik.fracture_cells[i]] += u_k[i];
  for (int i = 0; i < ij.num_cells(); ++i) jump[ij.fracture_cells[i]] -= u_j[i];
  return jump;
}

PropagationEvent split_tip_face(MixedDimGrid& mdg, int fracture, int tip_face) {
  PropagationEvent ev;
  ev.fracture = fracture;
  ev.tip_face = tip_face;
  auto& fr = mdg.fractures.at(fracture);
  auto& m = mdg.matrix;
  if (tip_face < 0 || tip_face >= fr.grid.num_faces() || !fr.grid.has_tag(tip_face, face_tag::kFractureTip)) {
    throw GridError("split_tip_face: face " + std::to_string(tip_face) + " is not a fracture tip");
  }
  const int node = fr.face_matrix_node[tip_face];
  const int tip_cell = fr.grid.any_cell(tip_face);
  const Vec2 ahead = (fr.grid.face_centers[tip_face] - fr.grid.cell_centers[tip_cell]).normalized();

  int face = -1;
  for (int f : m.node_faces[node]) {
    const Vec2 d = (m.nodes[other_node(m, f, node)] - m.nodes[node]).normalized();
    if (d.dot(ahead) > 1.0 - 1e-9) face = f;
  }
  if (face < 0 || m.has_tag(face, face_tag::kDomainBoundary)) {
    ev.status = SplitStatus::kBlocked;
    ev.message = "no interior face ahead of the tip";
    return ev;
  }
  if (m.has_tag(face, face_tag::kFractureSurface)) {
    ev.status = SplitStatus::kCoalescence;
    ev.message = "face ahead already belongs to a fracture";
    return ev;
  }
  const int far = other_node(m, face, node);
  if (mdg.on_domain_boundary(m.nodes[far])) {
    ev.status = SplitStatus::kBlocked;
    ev.message = "split would connect the fracture to the domain boundary";
    return ev;
  }
  for (int f : m.node_faces[far]) {
    if (m.has_tag(f, face_tag::kFractureSurface)) {
      ev.status = SplitStatus::kCoalescence;
      ev.message = "split would connect two fractures";
      return ev;
    }
  }

  const AddedFace added = add_fracture_face(mdg, fracture, face);
  const int twin = maybe_duplicate_node(mdg, fracture, node);

  ev.status = SplitStatus::kSplit;
  ev.split_face = face;
  ev.new_face = added.new_face;
  ev.new_fracture_cell = added.fracture_cell;
  ev.new_tip_face = find_point_face(fr, far);
  ev.new_mortar_cells = {added.mortar_cell, added.mortar_cell};
  ev.duplicated_node = twin >= 0 ? node : -1;
  ev.new_node = twin;
  ev.affected_nodes = {node, far};
  if (twin >= 0) ev.affected_nodes.push_back(twin);
  ++mdg.revision;
  return ev;
}

std::vector<std::string> check_consistency(const MixedDimGrid& mdg) {
  std::vector<std::string> err;
  auto fail = [&](const std::string& s) { err.push_back(s); };
  const auto& m = mdg.matrix;
  const double scale = std::max(1.0, (mdg.upper - mdg.lower).norm());

  for (int c = 0; c < m.num_cells(); ++c) {
    Vec2 sum = Vec2::Zero();
    for (const auto& cf : m.cell_faces[c]) {
      sum += cf.sign * m.face_normals[cf.face];
      const int slot = cf.sign > 0 ? 0 : 1;
      if (m.face_cells[cf.face][slot] != c) fail("matrix cell " + std::to_string(c) + " incidence mismatch");
    }
    if (sum.norm() > 1e-12 * scale) fail("matrix cell " + std::to_string(c) + " is not closed");
    std::vector<int> count;
    std::vector<int> seen;
    for (const auto& cf : m.cell_faces[c]) {
      for (int n : m.face_nodes[cf.face]) {
        auto it = std::find(seen.begin(), seen.end(), n);
        if (it == seen.end()) {
          seen.push_back(n);
          count.push_back(1);
        } else {
          ++count[it - seen.begin()];
        }
      }
    }
    for (int k : count) {
      if (k != 2) fail("matrix cell " + std::to_string(c) + " node loop is not closed");
    }
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int slot = 0; slot < 2; ++slot) {
      const int c = m.face_cells[f][slot];
      if (c < 0) continue;
      bool found = false;
      for (const auto& cf : m.cell_faces[c]) found = found || (cf.face == f && cf.sign == (slot == 0 ? 1 : -1));
      if (!found) fail("matrix face " + std::to_string(f) + " not listed by its cell");
    }
    const bool one_sided = m.has_tag(f, face_tag::kDomainBoundary) || m.has_tag(f, face_tag::kFractureSurface);
    if (m.num_neighbours(f) != (one_sided ? 1 : 2)) fail("matrix face " + std::to_string(f) + " has wrong neighbour count");
    if (m.has_tag(f, face_tag::kFractureTip)) fail("matrix face " + std::to_string(f) + " tagged as tip");
    for (int n : m.face_nodes[f]) {
      const auto& nf = m.node_faces[n];
      if (std::find(nf.begin(), nf.end(), f) == nf.end()) fail("node-face map misses face " + std::to_string(f));
    }
    if (m.has_tag(f, face_tag::kFractureSurface)) {
      const int ii = mdg.face_interface[f];
      const int mc = mdg.face_mortar_cell[f];
      if (ii < 0 || mc < 0 || mdg.interfaces[ii].matrix_faces[mc] != f) {
        fail("fracture face " + std::to_string(f) + " not referenced by a mortar cell");
      }
    }
  }
  for (int n = 0; n < m.num_nodes(); ++n) {
    for (int f : m.node_faces[n]) {
      if (m.face_nodes[f][0] != n && m.face_nodes[f][1] != n) fail("node-face map has stale face");
    }
  }

  std::vector<int> ref_count(m.num_faces(), 0);
  for (int fi = 0; fi < static_cast<int>(mdg.fractures.size()); ++fi) {
    const auto& fr = mdg.fractures[fi];
    const auto& g = fr.grid;
    const std::string tag = "fracture " + std::to_string(fi);
    for (int c = 0; c < g.num_cells(); ++c) {
      Vec2 sum = Vec2::Zero();
      for (const auto& cf : g.cell_faces[c]) sum += cf.sign * g.face_normals[cf.face];
      if (g.cell_faces[c].size() != 2 || sum.norm() > 1e-12) fail(tag + " cell " + std::to_string(c) + " is not closed");
    }
    for (int e = 0; e < g.num_faces(); ++e) {
      const int nn = g.num_neighbours(e);
      const bool end = g.has_tag(e, face_tag::kFractureTip) || g.has_tag(e, face_tag::kDomainBoundary);
      if (nn == 0 || (nn == 1) != end) fail(tag + " face " + std::to_string(e) + " tag/neighbour mismatch");
      if (!near(g.face_centers[e], m.nodes[fr.face_matrix_node[e]], scale)) {
        fail(tag + " face " + std::to_string(e) + " does not coincide with its matrix node");
      }
    }
    for (int ii : {fr.interface_j, fr.interface_k}) {
      const auto& intf = mdg.interfaces[ii];
      const std::string itag = "interface " + std::to_string(ii);
      if (intf.num_cells() != g.num_cells()) fail(itag + " size differs from its fracture");
      std::vector<int> hit(g.num_cells(), 0);
      for (int i = 0; i < intf.num_cells(); ++i) {
        const int f = intf.matrix_faces[i];
        const int c = intf.fracture_cells[i];
        if (c < 0 || c >= g.num_cells()) {
          fail(itag + " maps outside the fracture");
          continue;
        }
        ++hit[c];
        ++ref_count[f];
        if (!m.has_tag(f, face_tag::kFractureSurface)) fail(itag + " maps to a non-fracture face");
        const int slot = intf.side == Side::J ? 0 : 1;
        if (m.face_cells[f][slot] < 0) fail(itag + " cell " + std::to_string(i) + " on the wrong side of its face");
        if ((m.unit_normal(f) - fr.normal).norm() > 1e-12) fail(itag + " face normal differs from n_l");
        if (!near(intf.cell_centers[i], m.face_centers[f], scale) ||
            !near(intf.cell_centers[i], g.cell_centers[c], scale)) {
          fail(itag + " cell " + std::to_string(i) + " is not geometrically coincident");
        }
      }
      for (int k : hit) {
        if (k != 1) fail(itag + " is not a bijection onto fracture cells");
      }
    }
    const auto& ij = mdg.interfaces[fr.interface_j];
    const auto& ik = mdg.interfaces[fr.interface_k];
    for (int i = 0; i < std::min(ij.num_cells(), ik.num_cells()); ++i) {
      if (!near(m.face_centers[ij.matrix_faces[i]], m.face_centers[ik.matrix_faces[i]], scale)) {
        fail("mortar pair " + std::to_string(i) + " of fracture " + std::to_string(fi) + " is not a coinciding face pair");
      }
    }
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    if (m.has_tag(f, face_tag::kFractureSurface) && ref_count[f] != 1) {
      fail("fracture face " + std::to_string(f) + " referenced " + std::to_string(ref_count[f]) + " times");
    }
  }
  return err;
}

void write_debug_dump(const MixedDimGrid& mdg, std::ostream& os) {
  const auto& m = mdg.matrix;
  os << std::setprecision(12);
  os << "matrix cells " << m.num_cells() << " faces " << m.num_faces() << " nodes " << m.num_nodes() << "\n";
  for (int n = 0; n < m.num_nodes(); ++n) {
    os << "node " << n << " " << m.nodes[n].x() << " " << m.nodes[n].y() << " twin " << mdg.node_twin[n] << "\n";
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    os << "face " << f << " nodes " << m.face_nodes[f][0] << " " << m.face_nodes[f][1] << " cells "
       << m.face_cells[f][0] << " " << m.face_cells[f][1] << " tags " << int(m.face_tags[f]) << " mortar "
       << mdg.face_interface[f] << ":" << mdg.face_mortar_cell[f] << "\n";
  }
  for (int c = 0; c < m.num_cells(); ++c) {
    os << "cell " << c << " center " << m.cell_centers[c].x() << " " << m.cell_centers[c].y() << " faces";
    for (const auto& cf : m.cell_faces[c]) os << " " << cf.sign * (cf.face + 1);
    os << "\n";
  }
  for (std::size_t fi = 0; fi < mdg.fractures.size(); ++fi) {
    const auto& g = mdg.fractures[fi].grid;
    os << "fracture " << fi << " cells " << g.num_cells() << " faces " << g.num_faces() << "\n";
    for (int e = 0; e < g.num_faces(); ++e) {
      os << "  point " << e << " node " << mdg.fractures[fi].face_matrix_node[e] << " cells " << g.face_cells[e][0]
         << " " << g.face_cells[e][1] << " tags " << int(g.face_tags[e]) << "\n";
    }
  }
  for (std::size_t ii = 0; ii < mdg.interfaces.size(); ++ii) {
    const auto& intf = mdg.interfaces[ii];
    os << "interface " << ii << " side " << (intf.side == Side::J ? "j" : "k") << " fracture " << intf.fracture;
    for (int i = 0; i < intf.num_cells(); ++i) os << " (" << intf.matrix_faces[i] << "," << intf.fracture_cells[i] << ")";
    os << "\n";
  }
}

}  // namespace thermofrac
