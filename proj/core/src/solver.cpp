#include "thermofrac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/SparseLU>
#ifdef THERMOFRAC_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <fmt/format.h>

namespace thermofrac {

void SolverOptions::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("solver dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("solver t_end must be non-negative");
  if (max_iterations < 1) throw std::invalid_argument("newton_max_iter must be at least 1");
  if (max_halvings < 0) throw std::invalid_argument("max_halvings must be non-negative");
  if (!(residual_tolerance > 0.0 && update_tolerance > 0.0)) throw std::invalid_argument("tolerances must be positive");
  for (double s : scales) {
    if (!(s > 0.0)) throw std::invalid_argument("variable scales must be positive");
  }
}

namespace {

ClassNorms state_magnitudes(const DofLayout& layout, const Vec& x, const SolverOptions& opt) {
  ClassNorms m{};
  for (int i = 0; i < x.size(); ++i) {
    const int c = static_cast<int>(layout.var_class(i));
    m[c] = std::max(m[c], std::abs(x(i)));
  }
  for (int c = 0; c < kNumVarClasses; ++c) m[c] = std::max(m[c], opt.scales[c]);
  return m;
}

std::string dof_description(const DofLayout& layout, int dof) {
  return fmt::format("{} unknown {}", var_class_name(layout.var_class(dof)), dof);
}

/// Names the unknown with the weakest column after scaling, the usual culprit
/// of a structurally or numerically singular system.
std::string singular_hint(const SpMat& scaled, const DofLayout& layout) {
  int worst = -1;
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < scaled.outerSize(); ++k) {
    double s = 0.0;
    for (SpMat::InnerIterator it(scaled, k); it; ++it) s += it.value() * it.value();
    if (s < smallest) {
      smallest = s;
      worst = k;
    }
  }
  return worst >= 0 ? "; weakest column: " + dof_description(layout, worst) : "";
}

}  // namespace

ClassNorms residual_norms(const LinearSystem& sys, const DofLayout& layout, const Vec& x, const SolverOptions& opt) {
  Vec row_max = Vec::Zero(sys.residual.size());
  for (int k = 0; k < sys.jacobian.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sys.jacobian, k); it; ++it) {
      row_max(it.row()) = std::max(row_max(it.row()), std::abs(it.value()));
    }
  }
  const ClassNorms mag = state_magnitudes(layout, x, opt);
  ClassNorms n{};
  for (int i = 0; i < sys.residual.size(); ++i) {
    const int c = static_cast<int>(layout.var_class(i));
    const double r = row_max(i) > 0.0 ? std::abs(sys.residual(i)) / row_max(i) : std::abs(sys.residual(i));
    n[c] = std::max(n[c], r / mag[c]);
  }
  return n;
}

ClassNorms update_norms(const Vec& dx, const DofLayout& layout, const Vec& x, const SolverOptions& opt) {
  const ClassNorms mag = state_magnitudes(layout, x, opt);
  ClassNorms n{};
  for (int i = 0; i < dx.size(); ++i) {
    const int c = static_cast<int>(layout.var_class(i));
    n[c] = std::max(n[c], std::abs(dx(i)) / mag[c]);
  }
  return n;
}

struct LinearSolver::Impl {
  SpMat scaled;
  Vec row_scale, col_scale;
#ifdef THERMOFRAC_HAVE_UMFPACK
  Eigen::UmfPackLU<SpMat> lu;
#else
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
#endif
  SpMat original;
};

void LinearSolver::factorize(const SpMat& jacobian, const DofLayout* layout) {
  auto impl = std::make_shared<Impl>();
  const int n = static_cast<int>(jacobian.rows());
  impl->original = jacobian;
  impl->row_scale = Vec::Zero(n);
  impl->col_scale = Vec::Zero(n);
  for (int k = 0; k < jacobian.outerSize(); ++k) {
    for (SpMat::InnerIterator it(jacobian, k); it; ++it) {
      impl->row_scale(it.row()) = std::max(impl->row_scale(it.row()), std::abs(it.value()));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (impl->row_scale(i) == 0.0) {
      throw LinearSolveError("singular system: empty row for " +
                             (layout ? dof_description(*layout, i) : fmt::format("row {}", i)));
    }
    impl->row_scale(i) = 1.0 / impl->row_scale(i);
  }
  impl->scaled = impl->row_scale.asDiagonal() * jacobian;
  for (int k = 0; k < impl->scaled.outerSize(); ++k) {
    for (SpMat::InnerIterator it(impl->scaled, k); it; ++it) {
      impl->col_scale(k) = std::max(impl->col_scale(k), std::abs(it.value()));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (impl->col_scale(i) == 0.0) {
      throw LinearSolveError("singular system: empty column for " +
                             (layout ? dof_description(*layout, i) : fmt::format("column {}", i)));
    }
    impl->col_scale(i) = 1.0 / impl->col_scale(i);
  }
  impl->scaled = impl->scaled * impl->col_scale.asDiagonal();
  impl->scaled.makeCompressed();
  impl->lu.compute(impl->scaled);
  if (impl->lu.info() != Eigen::Success) {
    throw LinearSolveError("sparse LU factorisation failed" + (layout ? singular_hint(impl->scaled, *layout) : ""));
  }
  impl_ = std::move(impl);
  ready_ = true;
}

Vec LinearSolver::solve(const Vec& rhs) const {
  if (!ready_) throw LinearSolveError("solve called before factorize");
  const Impl& m = *impl_;
  Vec b = m.row_scale.asDiagonal() * rhs;
  Vec dx = m.col_scale.asDiagonal() * Vec(m.lu.solve(b));
  const double rhs_norm = rhs.norm();
  Vec r = rhs - m.original * dx;
  // Two steps of iterative refinement recover accuracy lost to scaling.
  for (int k = 0; k < 2 && rhs_norm > 0.0 && r.norm() > 1e-12 * rhs_norm; ++k) {
    b = m.row_scale.asDiagonal() * r;
    dx += m.col_scale.asDiagonal() * Vec(m.lu.solve(b));
    r = rhs - m.original * dx;
  }
  last_residual_ = rhs_norm > 0.0 ? r.norm() / rhs_norm : 0.0;
  if (!std::isfinite(last_residual_)) throw LinearSolveError("linear solve produced non-finite values");
  return dx;
}

Vec linear_solve(const SpMat& jacobian, const Vec& rhs) {
  LinearSolver s;
  s.factorize(jacobian);
  return s.solve(rhs);
}

std::vector<std::vector<Regime>> classify_all(const Problem& problem, const DofLayout& layout, const Vec& x,
                                              const Vec& x_prev) {
  const auto cc = problem.contact();
  const auto pts = contact_points(problem, layout, x, x_prev);
  std::vector<std::vector<Regime>> r(pts.size());
  for (std::size_t fi = 0; fi < pts.size(); ++fi) {
    for (const auto& cp : pts[fi]) r[fi].push_back(classify(cp, cc));
  }
  return r;
}

namespace {

bool below(const ClassNorms& n, double tol) {
  return std::all_of(n.begin(), n.end(), [tol](double v) { return v < tol; });
}

std::string format_norms(const ClassNorms& n) {
  std::string s;
  for (int c = 0; c < kNumVarClasses; ++c) {
    s += fmt::format(" {}={:.2e}", var_class_name(static_cast<VarClass>(c)), n[c]);
  }
  return s;
}

std::string regime_counts(const std::vector<std::vector<Regime>>& regimes) {
  int count[3] = {0, 0, 0};
  for (const auto& f : regimes) {
    for (Regime r : f) ++count[static_cast<int>(r)];
  }
  return fmt::format("open={} stick={} glide={}", count[0], count[1], count[2]);
}

std::vector<Regime> flatten(const std::vector<std::vector<Regime>>& r) {
  std::vector<Regime> out;
  for (const auto& f : r) out.insert(out.end(), f.begin(), f.end());
  return out;
}

}  // namespace

NewtonResult newton_solve(const Problem& problem, const Discretization& disc, const DofLayout& layout, Vec& x,
                          const StepData& step, const SolverOptions& opt, const ProgressSink& progress,
                          int step_index) {
  NewtonResult res;
  LinearSolver solver;
  bool factor_current = false;
  std::vector<std::vector<Regime>> previous_pattern;
  std::map<std::vector<Regime>, int> seen;
  int cycles = 0;

  for (;;) {
    const auto regimes = classify_all(problem, layout, x, step.x_prev);
    const auto flat = flatten(regimes);
    if (!previous_pattern.empty() && flatten(previous_pattern) != flat && seen.count(flat)) {
      if (++cycles >= opt.max_regime_cycles) {
        res.reason = "contact regimes cycling";
        res.regimes = regimes;
        return res;
      }
    }
    ++seen[flat];
    previous_pattern = regimes;
    res.regimes = regimes;

    const LinearSystem sys = assemble(problem, disc, layout, x, step, regimes);
    if (!sys.residual.allFinite()) {
      res.reason = "non-finite residual";
      return res;
    }
    res.residual = residual_norms(sys, layout, x, opt);

    if (below(res.residual, opt.residual_tolerance)) {
      // Confirm with an update from the latest factorisation.
      if (!solver.ready()) {
        solver.factorize(sys.jacobian, &layout);
        ++res.iterations;
        factor_current = true;
      }
      const Vec dx = solver.solve(-sys.residual);
      const ClassNorms un = update_norms(dx, layout, x, opt);
      if (below(un, opt.update_tolerance)) {
        x += dx;
        res.update = un;
        res.converged = true;
        if (progress) {
          progress(fmt::format("step {} iter {} converged res{} upd{} {}", step_index, res.iterations,
                               format_norms(res.residual), format_norms(un), regime_counts(regimes)));
        }
        return res;
      }
      if (factor_current) {
        x += dx;
        res.update = un;
        factor_current = false;
        continue;
      }
    }
    if (res.iterations >= opt.max_iterations) {
      res.reason = fmt::format("no convergence in {} iterations", opt.max_iterations);
      return res;
    }
    solver.factorize(sys.jacobian, &layout);
    ++res.iterations;
    const Vec dx = solver.solve(-sys.residual);
    res.update = update_norms(dx, layout, x, opt);
    x += dx;
    factor_current = false;
    if (progress) {
      progress(fmt::format("step {} iter {} res{} upd{} {}", step_index, res.iterations, format_norms(res.residual),
                           format_norms(res.update), regime_counts(regimes)));
    }
    if (!x.allFinite()) {
      res.reason = "non-finite iterate";
      return res;
    }
  }
}

namespace {

StepReport advance_level(const Problem& problem, const Discretization& disc, const DofLayout& layout, Vec& x,
                         double dt, const std::vector<std::vector<char>>& correction, const SolverOptions& opt,
                         const ProgressSink& progress, int step_index, int level) {
  StepData step;
  step.dt = dt;
  step.x_prev = x;
  step.divu_prev = cell_divergence(problem, disc, layout, x);
  step.mass_correction = correction;
  Vec trial = x;
  NewtonResult nr;
  try {
    nr = newton_solve(problem, disc, layout, trial, step, opt, progress, step_index);
  } catch (const LinearSolveError& e) {
    nr.reason = e.what();
  }
  if (nr.converged) {
    StepReport rep{nr.iterations, level, 1, 0.0, 0.0};
    if (!problem.mechanics_only) {
      rep.mass_error = mass_audit(problem, disc, layout, trial, step).relative_error();
      rep.energy_error = energy_audit(problem, disc, layout, trial, step).relative_error();
    }
    x = trial;
    return rep;
  }
  if (level >= opt.max_halvings) {
    throw ConvergenceError(fmt::format("step {}: {} after {} time-step halvings (dt = {:.3e} s)", step_index,
                                       nr.reason, level, dt));
  }
  if (progress) progress(fmt::format("step {} halving dt to {:.3e} s: {}", step_index, 0.5 * dt, nr.reason));
  StepReport total{nr.iterations, level + 1, 0, 0.0, 0.0};
  for (int half = 0; half < 2; ++half) {
    const StepReport r = advance_level(problem, disc, layout, x, 0.5 * dt,
                                       half == 0 ? correction : std::vector<std::vector<char>>{}, opt, progress,
                                       step_index, level + 1);
    total.iterations += r.iterations;
    total.halvings = std::max(total.halvings, r.halvings);
    total.substeps += r.substeps;
    total.mass_error = std::max(total.mass_error, r.mass_error);
    total.energy_error = std::max(total.energy_error, r.energy_error);
  }
  return total;
}

}  // namespace

StepReport advance(const Problem& problem, const Discretization& disc, const DofLayout& layout, Vec& x, double dt,
                   const std::vector<std::vector<char>>& mass_correction, const SolverOptions& opt,
                   const ProgressSink& progress, int step_index) {
  return advance_level(problem, disc, layout, x, dt, mass_correction, opt, progress, step_index, 0);
}

}  // namespace thermofrac
