#include <gtest/gtest.h>

#include <sstream>

#include "thermofrac/grid.hpp"

using namespace thermofrac;

namespace {

void expect_consistent(const MixedDimGrid& mdg) {
  const auto errors = check_consistency(mdg);
  for (const auto& e : errors) ADD_FAILURE() << e;
}

int count_tips(const Fracture& fr) {
  int n = 0;
  for (int e = 0; e < fr.grid.num_faces(); ++e) n += fr.grid.has_tag(e, face_tag::kFractureTip);
  return n;
}

MixedDimGrid one_cell_fracture() {
  return build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.5}, {0.25, 0.5}}});
}

}  // namespace

TEST(Grid, UnitSquareWithoutFractures) {
  auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.5, {});
  EXPECT_EQ(mdg.matrix.num_cells(), 4);
  EXPECT_EQ(mdg.matrix.num_faces(), 12);
  EXPECT_EQ(mdg.matrix.num_nodes(), 9);
  EXPECT_TRUE(mdg.fractures.empty());
  EXPECT_TRUE(mdg.interfaces.empty());
  expect_consistent(mdg);
}

TEST(Grid, NonDivisibleExtentRoundsUp) {
  auto mdg = build_cartesian_mdg({1.0, 0.6}, 0.25, {});
  EXPECT_EQ(mdg.matrix.num_cells(), 4 * 3);
  double area = 0.0;
  for (double v : mdg.matrix.cell_volumes) area += v;
  EXPECT_NEAR(area, 0.6, 1e-14);
  expect_consistent(mdg);
}

TEST(Grid, BoundaryFractureBuild) {
  auto mdg = one_cell_fracture();
  EXPECT_EQ(mdg.matrix.num_cells(), 16);
  ASSERT_EQ(mdg.fractures.size(), 1u);
  const auto& fr = mdg.fractures[0];
  EXPECT_EQ(fr.grid.num_cells(), 1);
  ASSERT_EQ(mdg.interfaces.size(), 2u);
  EXPECT_EQ(mdg.interfaces[0].num_cells(), 1);
  EXPECT_EQ(mdg.interfaces[1].num_cells(), 1);
  EXPECT_EQ(count_tips(fr), 1);
  for (int e = 0; e < fr.grid.num_faces(); ++e) {
    const Vec2 x = fr.grid.face_centers[e];
    if (x.x() < 0.1) {
      EXPECT_FALSE(fr.grid.has_tag(e, face_tag::kFractureTip));
      EXPECT_TRUE(fr.grid.has_tag(e, face_tag::kDomainBoundary));
    } else {
      EXPECT_TRUE(fr.grid.has_tag(e, face_tag::kFractureTip));
    }
  }
  // 40 faces plus one duplicate; the boundary endpoint is split.
  EXPECT_EQ(mdg.matrix.num_faces(), 41);
  EXPECT_EQ(mdg.matrix.num_nodes(), 26);
  EXPECT_NEAR(fr.length(), 0.25, 1e-15);
  expect_consistent(mdg);
}

TEST(Grid, MortarOrientation) {
  auto mdg = one_cell_fracture();
  const auto& fr = mdg.fractures[0];
  const auto& ij = mdg.interfaces[fr.interface_j];
  const auto& ik = mdg.interfaces[fr.interface_k];
  EXPECT_EQ(ij.side, Side::J);
  EXPECT_EQ(ik.side, Side::K);
  EXPECT_TRUE(ij.normal.isApprox(fr.normal));
  EXPECT_TRUE(ik.normal.isApprox(-fr.normal));
  // Side j is the cell below the horizontal fracture.
  const int cj = mdg.matrix.face_cells[ij.matrix_faces[0]][0];
  const int ck = mdg.matrix.face_cells[ik.matrix_faces[0]][1];
  EXPECT_LT(mdg.matrix.cell_centers[cj].y(), 0.5);
  EXPECT_GT(mdg.matrix.cell_centers[ck].y(), 0.5);
}

TEST(Grid, ExampleTwoFractureCellCounts) {
  const double h = 1.0 / 128;
  auto mdg = build_cartesian_mdg({1.0, 1.0}, h, {{{0.0, 0.5}, {0.25, 0.5}}, {{0.75, 0.5}, {1.0, 0.5}}});
  ASSERT_EQ(mdg.fractures.size(), 2u);
  EXPECT_EQ(mdg.fractures[0].grid.num_cells(), 32);
  EXPECT_EQ(mdg.fractures[1].grid.num_cells(), 32);
  EXPECT_EQ(mdg.interfaces.size(), 4u);
  EXPECT_EQ(count_tips(mdg.fractures[0]), 1);
  EXPECT_EQ(count_tips(mdg.fractures[1]), 1);
  expect_consistent(mdg);
}

TEST(Grid, InteriorFractureHasTwoTipsAndSplitNodes) {
  auto mdg = build_cartesian_mdg({2.0, 2.0}, 0.25, {{{0.5, 1.0}, {1.5, 1.0}}});
  const auto& fr = mdg.fractures[0];
  EXPECT_EQ(fr.grid.num_cells(), 4);
  EXPECT_EQ(count_tips(fr), 2);
  // Three interior nodes of the fracture line are duplicated; tips are not.
  EXPECT_EQ(mdg.matrix.num_nodes(), 81 + 3);
  expect_consistent(mdg);
}

TEST(Grid, VerticalFracture) {
  auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.5, 0.25}, {0.5, 0.75}}});
  const auto& fr = mdg.fractures[0];
  EXPECT_EQ(fr.grid.num_cells(), 2);
  EXPECT_TRUE(fr.normal.isApprox(Vec2(1.0, 0.0)));
  EXPECT_EQ(count_tips(fr), 2);
  expect_consistent(mdg);
}

TEST(Grid, RejectsMisalignedSegments) {
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.4}, {0.25, 0.4}}}), GridError);
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.5}, {0.3, 0.5}}}), GridError);
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.0}, {0.25, 0.25}}}), GridError);
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 1.0}, {0.5, 1.0}}}), GridError);
}

TEST(Grid, RejectsOverlappingSegments) {
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.5}, {0.5, 0.5}}, {{0.25, 0.5}, {0.75, 0.5}}}),
               GridError);
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.25, 0.5}, {0.75, 0.5}}, {{0.5, 0.25}, {0.5, 0.75}}}),
               GridError);
  EXPECT_THROW(build_cartesian_mdg({1.0, 1.0}, 0.25, {{{0.0, 0.5}, {0.5, 0.5}}, {{0.5, 0.5}, {0.75, 0.5}}}),
               GridError);
}

TEST(Grid, Decompose) {
  auto d = decompose(Vec2(3, 4), Vec2(0, 1));
  EXPECT_EQ(d.normal, 4.0);
  EXPECT_TRUE(d.tangential.isApprox(Vec2(3, 0)));
  d = decompose(Vec2(0, 0), Vec2(1, 0));
  EXPECT_EQ(d.normal, 0.0);
  EXPECT_EQ(d.tangential.norm(), 0.0);
  const Vec2 n = Vec2(1, 1).normalized();
  d = decompose(n, n);
  EXPECT_NEAR(d.normal, 1.0, 1e-15);
  EXPECT_NEAR(d.tangential.norm(), 0.0, 1e-15);
  const Vec2 v(-2.5, 7.0);
  d = decompose(v, n);
  EXPECT_TRUE((d.normal * n + d.tangential).isApprox(v, 1e-15));
  EXPECT_THROW(decompose(v, Vec2(0, 2)), std::logic_error);
}

TEST(Grid, DisplacementJump) {
  auto mdg = one_cell_fracture();
  auto jump = displacement_jump(mdg, 0, {Vec2(1, 1)}, {Vec2(1, 2)});
  ASSERT_EQ(jump.size(), 1u);
  EXPECT_TRUE(jump[0].isApprox(Vec2(0, 1)));
  jump = displacement_jump(mdg, 0, {Vec2(0.3, -0.2)}, {Vec2(0.3, -0.2)});
  EXPECT_EQ(jump[0].norm(), 0.0);
  const double delta = 1e-3;
  jump = displacement_jump(mdg, 0, {Vec2(0, -delta / 2)}, {Vec2(0, delta / 2)});
  EXPECT_NEAR(decompose(jump[0], mdg.interfaces[0]).normal, delta, 1e-18);
  EXPECT_THROW(displacement_jump(mdg, 0, {Vec2(0, 0), Vec2(0, 0)}, {Vec2(0, 0)}), std::invalid_argument);
}

TEST(Grid, SplitTip) {
  auto mdg = one_cell_fracture();
  const int faces_before = mdg.matrix.num_faces();
  const int nodes_before = mdg.matrix.num_nodes();
  auto& fr = mdg.fractures[0];
  int tip = -1;
  for (int e = 0; e < fr.grid.num_faces(); ++e) {
    if (fr.grid.has_tag(e, face_tag::kFractureTip)) tip = e;
  }
  const auto ev = split_tip_face(mdg, 0, tip);
  ASSERT_EQ(ev.status, SplitStatus::kSplit);
  EXPECT_EQ(mdg.matrix.num_faces(), faces_before + 1);
  EXPECT_EQ(mdg.matrix.num_nodes(), nodes_before + 1);
  EXPECT_EQ(fr.grid.num_cells(), 2);
  EXPECT_EQ(mdg.interfaces[0].num_cells(), 2);
  EXPECT_EQ(mdg.interfaces[1].num_cells(), 2);
  EXPECT_EQ(count_tips(fr), 1);
  EXPECT_FALSE(fr.grid.has_tag(tip, face_tag::kFractureTip));
  EXPECT_TRUE(fr.grid.has_tag(ev.new_tip_face, face_tag::kFractureTip));
  EXPECT_NEAR(fr.grid.face_centers[ev.new_tip_face].x(), 0.5, 1e-15);
  EXPECT_EQ(ev.affected_nodes.size(), 3u);
  EXPECT_EQ(mdg.revision, 1u);
  EXPECT_NEAR(fr.length(), 0.5, 1e-15);
  expect_consistent(mdg);
}

TEST(Grid, SplitTwiceThenBlocked) {
  auto mdg = one_cell_fracture();
  auto tip_of = [&] {
    const auto& g = mdg.fractures[0].grid;
    for (int e = 0; e < g.num_faces(); ++e) {
      if (g.has_tag(e, face_tag::kFractureTip)) return e;
    }
    return -1;
  };
  ASSERT_EQ(split_tip_face(mdg, 0, tip_of()).status, SplitStatus::kSplit);
  ASSERT_EQ(split_tip_face(mdg, 0, tip_of()).status, SplitStatus::kSplit);
  EXPECT_NEAR(mdg.fractures[0].length(), 3 * 0.25, 1e-15);
  expect_consistent(mdg);

  std::ostringstream before;
  write_debug_dump(mdg, before);
  const auto ev = split_tip_face(mdg, 0, tip_of());
  EXPECT_EQ(ev.status, SplitStatus::kBlocked);
  std::ostringstream after;
  write_debug_dump(mdg, after);
  EXPECT_EQ(before.str(), after.str());
  EXPECT_EQ(mdg.revision, 2u);
}

TEST(Grid, SplitTowardsAnotherFractureIsCoalescence) {
  auto mdg = build_cartesian_mdg({2.0, 1.0}, 0.25, {{{0.0, 0.5}, {0.5, 0.5}}, {{1.0, 0.5}, {2.0, 0.5}}});
  auto tip_of = [&] {
    const auto& g = mdg.fractures[0].grid;
    for (int e = 0; e < g.num_faces(); ++e) {
      if (g.has_tag(e, face_tag::kFractureTip)) return e;
    }
    return -1;
  };
  // The face ahead is free, but its far node is the other fracture's tip.
  ASSERT_EQ(split_tip_face(mdg, 0, tip_of()).status, SplitStatus::kSplit);
  EXPECT_EQ(split_tip_face(mdg, 0, tip_of()).status, SplitStatus::kCoalescence);
  EXPECT_EQ(mdg.fractures[0].grid.num_cells(), 3);
}

TEST(Grid, SplitIsLocal) {
  auto mdg = build_cartesian_mdg({2.0, 2.0}, 0.25, {{{0.5, 1.0}, {1.0, 1.0}}});
  const auto ref = mdg.matrix;
  const auto& g = mdg.fractures[0].grid;
  int tip = -1;
  for (int e = 0; e < g.num_faces(); ++e) {
    if (g.has_tag(e, face_tag::kFractureTip) && g.face_centers[e].x() > 0.9) tip = e;
  }
  const auto ev = split_tip_face(mdg, 0, tip);
  ASSERT_EQ(ev.status, SplitStatus::kSplit);
  const auto& m = mdg.matrix;
  for (int c = 0; c < ref.num_cells(); ++c) {
    EXPECT_TRUE(m.cell_centers[c].isApprox(ref.cell_centers[c]));
  }
  for (int f = 0; f < ref.num_faces(); ++f) {
    bool touches = f == ev.split_face;
    for (int n : ref.face_nodes[f]) {
      for (int a : ev.affected_nodes) touches = touches || n == a;
    }
    if (touches) continue;
    EXPECT_EQ(m.face_nodes[f], ref.face_nodes[f]) << f;
    EXPECT_EQ(m.face_cells[f], ref.face_cells[f]) << f;
    EXPECT_EQ(m.face_tags[f], ref.face_tags[f]) << f;
  }
  expect_consistent(mdg);
}

TEST(Grid, RepeatedSplitsKeepInvariants) {
  auto mdg = build_cartesian_mdg({1.0, 1.0}, 1.0 / 16, {{{0.0, 0.5}, {0.25, 0.5}}, {{0.75, 0.5}, {1.0, 0.5}}});
  double len = mdg.fractures[0].length();
  for (int k = 0; k < 7; ++k) {
    const auto& g = mdg.fractures[0].grid;
    int tip = -1;
    for (int e = 0; e < g.num_faces(); ++e) {
      if (g.has_tag(e, face_tag::kFractureTip)) tip = e;
    }
    ASSERT_EQ(split_tip_face(mdg, 0, tip).status, SplitStatus::kSplit);
    EXPECT_NEAR(mdg.fractures[0].length() - len, 1.0 / 16, 1e-14);
    len = mdg.fractures[0].length();
    expect_consistent(mdg);
  }
  const auto& g = mdg.fractures[0].grid;
  int tip = -1;
  for (int e = 0; e < g.num_faces(); ++e) {
    if (g.has_tag(e, face_tag::kFractureTip)) tip = e;
  }
  // The right fracture's tip node is the far node of the next face.
  EXPECT_EQ(split_tip_face(mdg, 0, tip).status, SplitStatus::kCoalescence);
}
