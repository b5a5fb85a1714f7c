#include "thermofrac/discretization.hpp"

#include <string>

namespace thermofrac {

namespace {

std::vector<double> constant(const SubdomainGrid& g, double v) { return std::vector<double>(g.num_cells(), v); }

std::vector<Lame> lame_parameters(const Problem& p) {
  return std::vector<Lame>(p.grid.matrix.num_cells(), Lame{p.params.shear_modulus(), p.params.lame_lambda()});
}

}  // namespace

void Discretization::build(const Problem& problem) {
  const auto& g = problem.grid.matrix;
  const auto& prm = problem.params;
  flow_.discretize(g, isotropic_tensors(constant(g, prm.permeability / prm.viscosity)), problem.flow.kinds);
  heat_.discretize(g, isotropic_tensors(constant(g, prm.effective_conductivity())), problem.heat.kinds);
  mech_.discretize(g, lame_parameters(problem), problem.mech.kinds);
  finish(problem);
}

void Discretization::update(const Problem& problem, const std::vector<int>& affected_nodes) {
  if (!built_) {
    build(problem);
    return;
  }
  const auto& g = problem.grid.matrix;
  const auto& prm = problem.params;
  flow_.update(g, isotropic_tensors(constant(g, prm.permeability / prm.viscosity)), problem.flow.kinds,
               affected_nodes);
  heat_.update(g, isotropic_tensors(constant(g, prm.effective_conductivity())), problem.heat.kinds, affected_nodes);
  mech_.update(g, lame_parameters(problem), problem.mech.kinds, affected_nodes);
  finish(problem);
}

void Discretization::check_current(const MixedDimGrid& mdg) const {
  if (!built_ || mdg.revision != revision_) {
    throw StaleDiscretizationError("discretisation of grid revision " + std::to_string(revision_) +
                                   " used with grid revision " + std::to_string(mdg.revision));
  }
}

void Discretization::finish(const Problem& problem) {
  const auto& g = problem.grid.matrix;
  std::vector<Eigen::Triplet<double>> t, t2;
  for (int f = 0; f < g.num_faces(); ++f) {
    for (int s = 0; s < 2; ++s) {
      const int c = g.face_cells[f][s];
      if (c < 0) continue;
      const double sign = s == 0 ? 1.0 : -1.0;
      t.emplace_back(c, f, sign);
      t2.emplace_back(2 * c, 2 * f, sign);
      t2.emplace_back(2 * c + 1, 2 * f + 1, sign);
    }
  }
  div_.resize(g.num_cells(), g.num_faces());
  div_.setFromTriplets(t.begin(), t.end());
  div2_.resize(2 * g.num_cells(), 2 * g.num_faces());
  div2_.setFromTriplets(t2.begin(), t2.end());

  const auto& fo = flow_.operators();
  const auto& ho = heat_.operators();
  const auto& mo = mech_.operators();
  mass_flux = div_ * fo.flux;
  mass_bound = div_ * fo.bound_flux;
  mass_vsrc = div_ * fo.vector_source;
  heat_flux = div_ * ho.flux;
  heat_bound = div_ * ho.bound_flux;
  momentum_u = div2_ * mo.stress;
  momentum_bound = div2_ * mo.bound_stress;
  momentum_scalar = div2_ * mo.stress_scalar;
  for (SpMat* m : {&mass_flux, &mass_bound, &mass_vsrc, &heat_flux, &heat_bound, &momentum_u, &momentum_bound,
                   &momentum_scalar}) {
    m->prune(0.0);
  }
  revision_ = problem.grid.revision;
  built_ = true;
}

}  // namespace thermofrac
