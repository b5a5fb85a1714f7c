#include <gtest/gtest.h>

#include <cmath>

#include "thermofrac/mpfa.hpp"
#include "thermofrac/mpsa.hpp"

using namespace thermofrac;

namespace {

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double max_abs_diff(const SpMat& a, const SpMat& b) {
  const SpMat d = a - b;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SpMat::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

BoundaryKinds mixed_kinds(const SubdomainGrid& g) {
  auto bc = BoundaryKinds::uniform(g, BcKind::kDirichlet);
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.has_tag(f, face_tag::kDomainBoundary) && g.face_centers[f].x() > 1.0 - 1e-12) bc.kind[f] = BcKind::kNeumann;
  }
  return bc;
}

struct LinearPressure {
  double a = 0.3, bx = -1.7, by = 2.4;
  double operator()(const Vec2& x) const { return a + bx * x.x() + by * x.y(); }
  Vec2 grad() const { return {bx, by}; }
};

}  // namespace

class MpfaPatch : public ::testing::TestWithParam<int> {};

TEST_P(MpfaPatch, ReproducesLinearPressure) {
  const double h = 1.0 / GetParam();
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, h, {{{0.0, 0.5}, {0.25, 0.5}}});
  const auto& g = mdg.matrix;
  Eigen::Matrix2d k;
  k << 3.0, 0.5, 0.5, 1.0;
  std::vector<Eigen::Matrix2d> tensor(g.num_cells(), k);
  const auto bc = mixed_kinds(g);
  Mpfa mpfa;
  mpfa.discretize(g, tensor, bc);
  const auto& op = mpfa.operators();

  const LinearPressure p;
  Vec pc(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) pc(c) = p(g.cell_centers[c]);
  Vec exact(g.num_faces());
  Vec bval = Vec::Zero(g.num_faces());
  for (int f = 0; f < g.num_faces(); ++f) {
    exact(f) = -(k * p.grad()).dot(g.face_normals[f]);
    if (g.has_tag(f, face_tag::kFractureSurface) || (f < (int)bc.kind.size() && bc.kind[f] == BcKind::kNeumann)) {
      bval(f) = exact(f);
    } else if (g.has_tag(f, face_tag::kDomainBoundary)) {
      bval(f) = p(g.face_centers[f]);
    }
  }
  const Vec flux = op.flux * pc + op.bound_flux * bval;
  const double scale = max_abs(exact);
  EXPECT_LE(max_abs(flux - exact) / scale, 1e-10);

  const Vec trace = op.bound_pressure_cell * pc + op.bound_pressure_face * bval;
  for (int f = 0; f < g.num_faces(); ++f) EXPECT_NEAR(trace(f), p(g.face_centers[f]), 1e-10) << f;
}

INSTANTIATE_TEST_SUITE_P(Grids, MpfaPatch, ::testing::Values(8, 16, 32));

TEST(Mpfa, TwoPointOnHomogeneousCartesian) {
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.25, {});
  const auto& g = mdg.matrix;
  Mpfa mpfa;
  mpfa.discretize(g, isotropic_tensors(std::vector<double>(g.num_cells(), 1.0)), BoundaryKinds::uniform(g, BcKind::kNeumann));
  const auto& op = mpfa.operators();
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.num_neighbours(f) != 2) continue;
    const int c0 = g.face_cells[f][0];
    const int c1 = g.face_cells[f][1];
    for (int c = 0; c < g.num_cells(); ++c) {
      const double expected = c == c0 ? 1.0 : (c == c1 ? -1.0 : 0.0);
      EXPECT_NEAR(op.flux.coeff(f, c), expected, 1e-12);
    }
  }
  // Unit pressure drop across a face gives unit flux.
  Vec p = Vec::Zero(g.num_cells());
  p(5) = 1.0;
  const Vec flux = op.flux * p;
  for (const auto& cf : g.cell_faces[5]) EXPECT_NEAR(cf.sign * flux(cf.face), 1.0, 1e-12);
}

TEST(Mpfa, CheckerboardMatchesHarmonicMean) {
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.25, {});
  const auto& g = mdg.matrix;
  std::vector<double> kc(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    const int i = static_cast<int>(g.cell_centers[c].x() / 0.25);
    const int j = static_cast<int>(g.cell_centers[c].y() / 0.25);
    kc[c] = (i + j) % 2 ? 10.0 : 1.0;
  }
  Mpfa mpfa;
  mpfa.discretize(g, isotropic_tensors(kc), BoundaryKinds::uniform(g, BcKind::kNeumann));
  const auto& op = mpfa.operators();
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.num_neighbours(f) != 2) continue;
    const int c0 = g.face_cells[f][0];
    const int c1 = g.face_cells[f][1];
    const double a = g.face_areas[f];
    const double t0 = kc[c0] * a / 0.125;
    const double t1 = kc[c1] * a / 0.125;
    const double t = t0 * t1 / (t0 + t1);
    EXPECT_NEAR(op.flux.coeff(f, c0), t, 1e-12);
    EXPECT_NEAR(op.flux.coeff(f, c1), -t, 1e-12);
  }
}

TEST(Mpfa, ConstantPotentialGivesZeroFlux) {
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.125, {{{0.25, 0.5}, {0.75, 0.5}}});
  const auto& g = mdg.matrix;
  Eigen::Matrix2d k;
  k << 2.0, 0.3, 0.3, 1.0;
  Mpfa mpfa;
  mpfa.discretize(g, std::vector<Eigen::Matrix2d>(g.num_cells(), k), BoundaryKinds::uniform(g, BcKind::kNeumann));
  const Vec flux = mpfa.operators().flux * Vec::Ones(g.num_cells());
  EXPECT_LE(max_abs(flux), 1e-12);
}

TEST(Mpfa, UnassignedBoundaryRejected) {
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.5, {});
  BoundaryKinds bc;
  bc.kind.assign(mdg.matrix.num_faces(), BcKind::kUnassigned);
  Mpfa mpfa;
  EXPECT_THROW(mpfa.discretize(mdg.matrix, isotropic_tensors(std::vector<double>(4, 1.0)), bc), DiscretizationError);
}

namespace {

struct LinearDisplacement {
  Eigen::Matrix2d grad;
  Vec2 shift{0.1, -0.2};
  Vec2 operator()(const Vec2& x) const { return shift + grad * x; }
};

Eigen::Matrix2d hooke(const Eigen::Matrix2d& grad, const Lame& l) {
  const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
  return 2.0 * l.mu * eps + l.lambda * eps.trace() * Eigen::Matrix2d::Identity();
}

void check_mpsa_patch(double h, const LinearDisplacement& u, double q_uniform) {
  const auto mdg = build_cartesian_mdg({1.0, 1.0}, h, {{{0.0, 0.5}, {0.25, 0.5}}});
  const auto& g = mdg.matrix;
  const Lame l{3.0, 2.0};
  const auto bc = mixed_kinds(g);
  Mpsa mpsa;
  mpsa.discretize(g, std::vector<Lame>(g.num_cells(), l), bc);
  const auto& op = mpsa.operators();
  const Eigen::Matrix2d sigma = hooke(u.grad, l) - q_uniform * Eigen::Matrix2d::Identity();

  Vec uc(2 * g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) uc.segment<2>(2 * c) = u(g.cell_centers[c]);
  Vec q = Vec::Constant(g.num_cells(), q_uniform);
  Vec exact(2 * g.num_faces());
  Vec bval = Vec::Zero(2 * g.num_faces());
  for (int f = 0; f < g.num_faces(); ++f) {
    exact.segment<2>(2 * f) = sigma * g.face_normals[f];
    const bool neumann = !g.has_tag(f, face_tag::kFractureSurface) && f < (int)bc.kind.size() &&
                         g.has_tag(f, face_tag::kDomainBoundary) && bc.kind[f] == BcKind::kNeumann;
    if (neumann) {
      bval.segment<2>(2 * f) = exact.segment<2>(2 * f);
    } else if (g.num_neighbours(f) == 1) {
      bval.segment<2>(2 * f) = u(g.face_centers[f]);
    }
  }
  const Vec t = op.stress * uc + op.bound_stress * bval + op.stress_scalar * q;
  EXPECT_LE(max_abs(t - exact) / std::max(1e-300, max_abs(exact)), 1e-10);

  const Vec d = op.bound_displacement_cell * uc + op.bound_displacement_face * bval + op.bound_displacement_scalar * q;
  for (int f = 0; f < g.num_faces(); ++f) {
    EXPECT_LE((d.segment<2>(2 * f) - u(g.face_centers[f])).norm(), 1e-10) << f;
  }
  const Vec div = op.div_u * uc + op.div_bc * bval + op.div_scalar * q;
  for (int c = 0; c < g.num_cells(); ++c) EXPECT_NEAR(div(c), u.grad.trace() * g.cell_volumes[c], 1e-10);
}

}  // namespace

class MpsaPatch : public ::testing::TestWithParam<int> {};

TEST_P(MpsaPatch, ReproducesLinearDisplacement) {
  LinearDisplacement u;
  u.grad << 0.7, -0.4, 1.3, 0.2;
  check_mpsa_patch(1.0 / GetParam(), u, 0.0);
}

TEST_P(MpsaPatch, ReproducesLinearDisplacementWithScalarStress) {
  LinearDisplacement u;
  u.grad << -0.3, 0.9, 0.1, 0.5;
  check_mpsa_patch(1.0 / GetParam(), u, 1.7);
}

INSTANTIATE_TEST_SUITE_P(Grids, MpsaPatch, ::testing::Values(8, 16, 32));

class MpsaExamples : public ::testing::Test {
 protected:
  void SetUp() override {
    mdg = build_cartesian_mdg({1.0, 1.0}, 0.25, {});
    mpsa.discretize(mdg.matrix, std::vector<Lame>(mdg.matrix.num_cells(), l), BoundaryKinds::uniform(mdg.matrix, BcKind::kDirichlet));
  }
  Vec tractions(const LinearDisplacement& u) const {
    const auto& g = mdg.matrix;
    Vec uc(2 * g.num_cells());
    for (int c = 0; c < g.num_cells(); ++c) uc.segment<2>(2 * c) = u(g.cell_centers[c]);
    Vec bval = Vec::Zero(2 * g.num_faces());
    for (int f = 0; f < g.num_faces(); ++f) {
      if (g.num_neighbours(f) == 1) bval.segment<2>(2 * f) = u(g.face_centers[f]);
    }
    const auto& op = mpsa.operators();
    return op.stress * uc + op.bound_stress * bval;
  }
  MixedDimGrid mdg;
  Lame l{1.5, 2.5};
  Mpsa mpsa;
};

TEST_F(MpsaExamples, UniaxialStretch) {
  LinearDisplacement u;
  u.shift.setZero();
  u.grad << 1, 0, 0, 0;
  const Vec t = tractions(u);
  const auto& g = mdg.matrix;
  for (int f = 0; f < g.num_faces(); ++f) {
    const double a = g.face_areas[f];
    const Vec2 n = g.unit_normal(f);
    if (std::abs(n.x()) > 0.5) {
      EXPECT_NEAR(t(2 * f), (l.lambda + 2 * l.mu) * a, 1e-12);
      EXPECT_NEAR(t(2 * f + 1), 0.0, 1e-12);
    } else {
      EXPECT_NEAR(t(2 * f), 0.0, 1e-12);
      EXPECT_NEAR(t(2 * f + 1), l.lambda * a, 1e-12);
    }
  }
}

TEST_F(MpsaExamples, RigidRotationIsStressFree) {
  LinearDisplacement u;
  u.grad << 0, -1, 1, 0;
  EXPECT_LE(max_abs(tractions(u)), 1e-12);
}

TEST_F(MpsaExamples, IsotropicCompression) {
  const double eps = 1e-3;
  LinearDisplacement u;
  u.shift.setZero();
  u.grad = -eps * Eigen::Matrix2d::Identity();
  const Vec t = tractions(u);
  const auto& g = mdg.matrix;
  for (int f = 0; f < g.num_faces(); ++f) {
    const Vec2 expected = -2 * eps * (l.lambda + l.mu) * g.face_normals[f];
    EXPECT_NEAR((t.segment<2>(2 * f) - expected).norm(), 0.0, 1e-14);
  }
}

TEST_F(MpsaExamples, UniformPressureCoupling) {
  const auto& g = mdg.matrix;
  const double alpha = 0.8;
  const Vec q = Vec::Constant(g.num_cells(), alpha * 1e6);
  const Vec t = mpsa.operators().stress_scalar * q;
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.num_neighbours(f) != 2) continue;
    const Vec2 expected = -0.8e6 * g.face_normals[f];
    EXPECT_NEAR((t.segment<2>(2 * f) - expected).norm(), 0.0, 1e-6);
  }
}

TEST_F(MpsaExamples, DivergenceOfDilation) {
  const auto& g = mdg.matrix;
  Vec uc(2 * g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) uc.segment<2>(2 * c) = g.cell_centers[c];
  Vec bval = Vec::Zero(2 * g.num_faces());
  for (int f = 0; f < g.num_faces(); ++f) {
    if (g.num_neighbours(f) == 1) bval.segment<2>(2 * f) = g.face_centers[f];
  }
  const auto& op = mpsa.operators();
  const Vec div = op.div_u * uc + op.div_bc * bval;
  for (int c = 0; c < g.num_cells(); ++c) EXPECT_NEAR(div(c), 2.0 * g.cell_volumes[c], 1e-14);
  EXPECT_EQ(mpsa.singular_regions(), 0);
}

TEST(Mpxa, LocalUpdateMatchesFullRediscretisation) {
  auto mdg = build_cartesian_mdg({1.0, 1.0}, 0.125, {{{0.0, 0.5}, {0.25, 0.5}}, {{0.75, 0.5}, {1.0, 0.5}}});
  auto& g = mdg.matrix;
  std::vector<Eigen::Matrix2d> k(g.num_cells(), Eigen::Matrix2d::Identity());
  std::vector<Lame> lame(g.num_cells(), Lame{1.0, 2.0});
  auto bc_flow = BoundaryKinds::uniform(g, BcKind::kNeumann);
  auto bc_mech = BoundaryKinds::uniform(g, BcKind::kDirichlet);
  Mpfa local_f;
  Mpsa local_s;
  local_f.discretize(g, k, bc_flow);
  local_s.discretize(g, lame, bc_mech);
  for (int step = 0; step < 2; ++step) {
    int tip = -1;
    const auto& fg = mdg.fractures[0].grid;
    for (int e = 0; e < fg.num_faces(); ++e) {
      if (fg.has_tag(e, face_tag::kFractureTip)) tip = e;
    }
    const auto ev = split_tip_face(mdg, 0, tip);
    ASSERT_EQ(ev.status, SplitStatus::kSplit);
    local_f.update(g, k, bc_flow, ev.affected_nodes);
    local_s.update(g, lame, bc_mech, ev.affected_nodes);
  }
  Mpfa full_f;
  Mpsa full_s;
  full_f.discretize(g, k, bc_flow);
  full_s.discretize(g, lame, bc_mech);
  const auto& a = local_f.operators();
  const auto& b = full_f.operators();
  EXPECT_LE(max_abs_diff(a.flux, b.flux), 1e-12);
  EXPECT_LE(max_abs_diff(a.bound_flux, b.bound_flux), 1e-12);
  EXPECT_LE(max_abs_diff(a.bound_pressure_cell, b.bound_pressure_cell), 1e-12);
  EXPECT_LE(max_abs_diff(a.bound_pressure_face, b.bound_pressure_face), 1e-12);
  const auto& s = local_s.operators();
  const auto& t = full_s.operators();
  EXPECT_LE(max_abs_diff(s.stress, t.stress), 1e-12);
  EXPECT_LE(max_abs_diff(s.bound_stress, t.bound_stress), 1e-12);
  EXPECT_LE(max_abs_diff(s.stress_scalar, t.stress_scalar), 1e-12);
  EXPECT_LE(max_abs_diff(s.bound_displacement_cell, t.bound_displacement_cell), 1e-12);
  EXPECT_LE(max_abs_diff(s.bound_displacement_face, t.bound_displacement_face), 1e-12);
  EXPECT_LE(max_abs_diff(s.div_u, t.div_u), 1e-12);
  EXPECT_LE(max_abs_diff(s.div_scalar, t.div_scalar), 1e-12);
}
