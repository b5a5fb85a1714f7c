#include "thermofrac/verify.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <istream>
#include <set>
#include <sstream>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "thermofrac/simulation.hpp"

namespace thermofrac {

double sneddon_k_i(double pressure, double half_length) { return pressure * std::sqrt(std::numbers::pi * half_length); }

double sif_error(const std::vector<double>& k, double k_ref, double k_i_an) {
  double s = 0.0;
  for (double v : k) s += (v - k_ref) * (v - k_ref);
  return std::sqrt(s) / (2.0 * k_i_an);
}

Problem sneddon_problem(const SneddonSetup& s) {
  Problem p;
  const double y = 0.5 * s.domain;
  const double x0 = 0.5 * s.domain - s.half_length;
  const double x1 = 0.5 * s.domain + s.half_length;
  p.grid = build_cartesian_mdg(Vec2(s.domain, s.domain), s.h, {Segment{Vec2(x0, y), Vec2(x1, y)}});
  p.params.poisson_ratio = s.poisson_ratio;
  p.params.bulk_modulus = s.bulk_modulus;
  const auto& g = p.grid.matrix;
  p.flow.kinds = BoundaryKinds::uniform(g, BcKind::kDirichlet);
  p.heat.kinds = p.flow.kinds;
  p.mech.kinds = p.flow.kinds;
  p.flow.values.assign(g.num_faces(), p.params.reference_pressure);
  p.heat.values.assign(g.num_faces(), 0.0);
  p.mech.values.assign(g.num_faces(), Vec2::Zero());
  p.fracture_ends.assign(p.grid.fractures.size(), FractureEnd{});
  p.mechanics_only = true;
  p.fixed_fracture_pressure = p.params.reference_pressure + s.pressure;
  p.validate();
  return p;
}

SneddonResult run_sneddon(const SneddonSetup& s, const SolverOptions& opt) {
  Problem p = sneddon_problem(s);
  Discretization disc;
  disc.build(p);
  const DofLayout layout(p.grid);
  Vec x = Vec::Zero(layout.size());
  for (int c = 0; c < p.grid.matrix.num_cells(); ++c) x(layout.pm(c)) = p.params.reference_pressure;
  for (int fi = 0; fi < layout.num_fractures(); ++fi) {
    for (int lc = 0; lc < layout.fracture_cells(fi); ++lc) x(layout.pf(fi, lc)) = p.fixed_fracture_pressure;
  }
  const StepReport rep = advance(p, disc, layout, x, opt.dt, {}, opt);
  const auto kin = fracture_kinematics(p, layout, x);
  for (const auto& jn : kin.jump_n) {
    for (double j : jn) {
      if (!(j > 0.0)) throw VerificationError("Sneddon crack is closed (contact engaged); the crack pressure must open it");
    }
  }
  SneddonResult r;
  r.setup = s;
  r.sifs = compute_sifs(p, layout, x);
  r.k_i_an = sneddon_k_i(s.pressure, s.half_length);
  std::vector<double> ki, kii;
  for (const auto& e : r.sifs) {
    ki.push_back(e.k_i);
    kii.push_back(e.k_ii);
  }
  r.error_i = sif_error(ki, r.k_i_an, r.k_i_an);
  r.error_ii = sif_error(kii, 0.0, r.k_i_an);
  r.newton_iterations = rep.iterations;
  return r;
}

std::vector<double> sneddon_mesh_sizes(int levels) {
  std::vector<double> h;
  for (int i = 0; i < levels; ++i) h.push_back(1.25 / std::pow(2.0, i));
  return h;
}

std::vector<double> sneddon_poisson_ratios() { return {0.1, 0.2, 0.3, 0.4}; }

void write_sneddon_csv(std::ostream& os, const std::vector<SneddonResult>& results) {
  os << "h,nu,error_i,error_ii,k_i_left,k_i_right,k_ii_left,k_ii_right,k_i_an\n";
  for (const auto& r : results) {
    const double kl = r.sifs.size() > 0 ? r.sifs[0].k_i : NAN;
    const double kr = r.sifs.size() > 1 ? r.sifs[1].k_i : NAN;
    const double tl = r.sifs.size() > 0 ? r.sifs[0].k_ii : NAN;
    const double tr = r.sifs.size() > 1 ? r.sifs[1].k_ii : NAN;
    os << fmt::format("{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", r.setup.h,
                      r.setup.poisson_ratio, r.error_i, r.error_ii, kl, kr, tl, tr, r.k_i_an);
  }
}

Parameters speed_parameters() {
  Parameters p;
  p.critical_sif = 1.5e7;
  return p;
}

Problem speed_problem(const SpeedSetup& s) {
  Problem p;
  p.params = s.params;
  p.grid = build_cartesian_mdg(Vec2(1.0, 1.0), s.h,
                               {Segment{Vec2(0.0, 0.5), Vec2(0.25, 0.5)}, Segment{Vec2(0.75, 0.5), Vec2(1.0, 0.5)}});
  const auto& g = p.grid.matrix;
  p.flow.kinds = BoundaryKinds::uniform(g, BcKind::kNeumann);
  p.heat.kinds = p.flow.kinds;
  p.flow.values.assign(g.num_faces(), 0.0);
  p.heat.values.assign(g.num_faces(), 0.0);
  p.mech.kinds = BoundaryKinds::uniform(g, BcKind::kNeumann);
  p.mech.values.assign(g.num_faces(), Vec2::Zero());
  for (int f = 0; f < g.num_faces(); ++f) {
    if (!g.has_tag(f, face_tag::kDomainBoundary)) continue;
    const DomainSide side = face_side(p.grid, f);
    if (side == DomainSide::kTop || side == DomainSide::kBottom) p.mech.kinds.kind[f] = BcKind::kDirichlet;
  }
  p.fracture_ends = {FractureEnd{true, p.params.reference_pressure + s.inlet_pressure, s.inlet_temperature},
                     FractureEnd{true, p.params.reference_pressure, 0.0}};
  p.validate();
  return p;
}

void analyse_speed_run(SpeedRun& run) {
  run.splits = 0;
  run.inconclusive = true;
  run.onset_time = 0.0;
  run.mean_speed = 0.0;
  const auto& s = run.size;
  std::size_t first = s.size(), last = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].second > s[i - 1].second + 1e-12) {
      ++run.splits;
      if (first == s.size()) first = i;
      last = i;
    }
  }
  if (first == s.size()) return;
  run.inconclusive = false;
  run.onset_time = s[first].first;
  // least squares over samples first-1 .. last
  double st = 0, sl = 0, stt = 0, stl = 0;
  const double n = static_cast<double>(last - first + 2);
  for (std::size_t i = first - 1; i <= last; ++i) {
    st += s[i].first;
    sl += s[i].second;
    stt += s[i].first * s[i].first;
    stl += s[i].first * s[i].second;
  }
  run.mean_speed = (n * stl - st * sl) / (n * stt - st * st);
}

SpeedRun run_speed_case(const SpeedSetup& setup, double dt, double t_end, const SolverOptions& solver,
                        const ProgressSink& progress) {
  const auto start = std::chrono::steady_clock::now();
  SolverOptions opt = solver;
  opt.dt = dt;
  opt.t_end = t_end;
  Simulation sim(speed_problem(setup), opt);
  if (progress) sim.set_progress(progress);
  sim.run();

  SpeedRun run;
  run.h = setup.h;
  run.dt = dt;
  for (const auto& [t, len] : sim.fracture_sizes()) run.size.emplace_back(t, len[0]);
  run.resolution_warnings = static_cast<int>(sim.warnings().size());
  run.worst_mass_error = sim.worst_mass_error();
  run.worst_energy_error = sim.worst_energy_error();
  analyse_speed_run(run);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<SpeedRun> propagation_speed_study(const SpeedStudyOptions& opt, const ProgressSink& progress) {
  std::vector<std::pair<double, double>> cases;
  for (double h : opt.mesh_sizes) {
    for (double dt : opt.time_steps) cases.emplace_back(h, dt);
  }
  std::mutex mutex;
  ProgressSink sink;
  if (progress) {
    sink = [&](const std::string& line) {
      std::lock_guard<std::mutex> lock(mutex);
      progress(line);
    };
  }
  auto one = [&](std::size_t i) {
    SpeedSetup setup = opt.setup;
    setup.h = cases[i].first;
    const std::string tag = fmt::format("h=1/{:.0f} dt={:g}: ", 1.0 / cases[i].first, cases[i].second);
    ProgressSink tagged;
    if (sink) tagged = [&, tag](const std::string& line) { sink(tag + line); };
    return run_speed_case(setup, cases[i].second, opt.t_end, opt.solver, tagged);
  };

  std::vector<SpeedRun> runs(cases.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, opt.jobs));
  for (std::size_t begin = 0; begin < cases.size(); begin += jobs) {
    std::vector<std::future<SpeedRun>> batch;
    for (std::size_t i = begin; i < std::min(cases.size(), begin + jobs); ++i) {
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, one, i));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) runs[begin + k] = batch[k].get();
  }
  return runs;
}

void write_speed_csv(std::ostream& os, const std::vector<SpeedRun>& runs) {
  os << "h,dt,t,size\n";
  for (const auto& r : runs) {
    for (const auto& [t, len] : r.size) os << fmt::format("{:.10g},{:g},{:.10g},{:.10g}\n", r.h, r.dt, t, len);
  }
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

std::map<double, double> read_sneddon_reference(std::istream& is) {
  std::map<double, std::pair<double, double>> finest;  // nu -> (h, E_I)
  std::string line;
  std::getline(is, line);
  if (line.rfind("h,nu,", 0) != 0) throw std::runtime_error("sneddon reference: unexpected header '" + line + "'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() < 3) throw std::runtime_error("sneddon reference: short row '" + line + "'");
    auto it = finest.find(v[1]);
    if (it == finest.end() || v[0] < it->second.first) finest[v[1]] = {v[0], v[2]};
  }
  std::map<double, double> out;
  for (const auto& [nu, he] : finest) out[nu] = he.second;
  return out;
}

std::vector<Check> check_sneddon(const std::vector<SneddonResult>& results, const std::map<double, double>& reference,
                                 double band_factor) {
  std::map<double, std::vector<const SneddonResult*>> by_nu;
  for (const auto& r : results) by_nu[r.setup.poisson_ratio].push_back(&r);

  Check mode{"E_II <= 0.1 E_I", true, ""};
  Check robust{"E_I varies less than 2x across meshes", true, ""};
  Check band{fmt::format("E_I below {:g} x fine-mesh reference", band_factor), true, ""};
  for (const auto& [nu, rs] : by_nu) {
    double lo = 1e300, hi = 0.0;
    for (const auto* r : rs) {
      if (!(r->error_ii <= 0.1 * r->error_i)) {
        mode.pass = false;
        mode.detail += fmt::format(" nu={:g} h={:g}: E_II={:.3e} E_I={:.3e};", nu, r->setup.h, r->error_ii, r->error_i);
      }
      lo = std::min(lo, r->error_i);
      hi = std::max(hi, r->error_i);
    }
    if (!(hi < 2.0 * lo)) {
      robust.pass = false;
      robust.detail += fmt::format(" nu={:g}: min {:.4f} max {:.4f};", nu, lo, hi);
    }
    const auto it = reference.find(nu);
    if (it == reference.end()) {
      band.pass = false;
      band.detail += fmt::format(" nu={:g}: no reference;", nu);
      continue;
    }
    if (!(hi < band_factor * it->second)) {
      band.pass = false;
      band.detail += fmt::format(" nu={:g}: max E_I {:.4f} >= {:.4f};", nu, hi, band_factor * it->second);
    }
  }
  if (by_nu.empty()) mode.pass = robust.pass = band.pass = false;
  return {mode, robust, band};
}

std::vector<Check> check_speed_study(const std::vector<SpeedRun>& runs) {
  std::set<double> hs, dts;
  for (const auto& r : runs) {
    hs.insert(r.h);
    dts.insert(r.dt);
  }
  auto find = [&](double h, double dt) -> const SpeedRun* {
    for (const auto& r : runs) {
      if (r.h == h && r.dt == dt) return &r;
    }
    return nullptr;
  };
  auto label = [](const SpeedRun& r) { return fmt::format("h=1/{:.0f} dt={:g}", 1.0 / r.h, r.dt); };

  Check steps{"size curves are monotone steps of h", true, ""};
  for (const auto& r : runs) {
    for (std::size_t i = 1; i < r.size.size(); ++i) {
      const double d = r.size[i].second - r.size[i - 1].second;
      if (d != 0.0 && std::abs(d - r.h) > 1e-9 * r.h) {
        steps.pass = false;
        steps.detail += fmt::format(" {} t={:g}: increment {:.6g};", label(r), r.size[i].first, d);
        break;
      }
    }
    if (r.inconclusive) {
      steps.pass = false;
      steps.detail += fmt::format(" {}: no propagation before t_end;", label(r));
    }
  }

  Check group{"same h, two smallest dt: onset differs < 2 dt", true, ""};
  const std::vector<double> dt_sorted(dts.begin(), dts.end());
  if (dt_sorted.size() < 2) {
    group.pass = false;
    group.detail = " fewer than two time steps";
  } else {
    for (double h : hs) {
      const auto* a = find(h, dt_sorted[0]);
      const auto* b = find(h, dt_sorted[1]);
      if (!a || !b || a->inconclusive || b->inconclusive) {
        group.pass = false;
        group.detail += fmt::format(" h=1/{:.0f}: missing or inconclusive run;", 1.0 / h);
        continue;
      }
      const double diff = std::abs(a->onset_time - b->onset_time);
      group.detail += fmt::format(" h=1/{:.0f}: {:g} vs {:g};", 1.0 / h, a->onset_time, b->onset_time);
      if (!(diff < 2.0 * dt_sorted[1])) group.pass = false;
    }
  }

  Check order{"onset earlier on coarser meshes", true, ""};
  const std::vector<double> h_desc(hs.rbegin(), hs.rend());
  for (double dt : dts) {
    std::string row;
    for (std::size_t i = 0; i + 1 < h_desc.size(); ++i) {
      const auto* coarse = find(h_desc[i], dt);
      const auto* fine = find(h_desc[i + 1], dt);
      if (!coarse || !fine || coarse->inconclusive || fine->inconclusive) {
        order.pass = false;
        continue;
      }
      const bool strict = dt == dt_sorted.front();
      if (strict ? !(coarse->onset_time < fine->onset_time) : !(coarse->onset_time <= fine->onset_time)) {
        order.pass = false;
      }
    }
    for (double h : h_desc) {
      if (const auto* r = find(h, dt)) row += fmt::format(" {:g}", r->onset_time);
    }
    order.detail += fmt::format(" dt={:g}:{};", dt, row);
  }
  if (h_desc.size() < 2) order.pass = false;

  Check limit{"dt * speed > h: mean speed <= h/dt and warning raised", true, ""};
  int candidates = 0;
  for (const auto& r : runs) {
    const auto* ref = find(r.h, dt_sorted.front());
    if (!ref || ref->inconclusive || r.inconclusive) continue;
    if (!(r.dt * ref->mean_speed > r.h)) continue;
    ++candidates;
    const double bound = r.h / r.dt;
    const bool ok = r.mean_speed <= bound * (1.0 + 1e-9) && r.resolution_warnings > 0;
    limit.detail += fmt::format(" {}: speed {:.3e} bound {:.3e} warnings {};", label(r), r.mean_speed, bound,
                                r.resolution_warnings);
    if (!ok) limit.pass = false;
  }
  if (candidates == 0) {
    limit.pass = false;
    limit.detail = " no combination with dt * speed > h";
  }
  return {steps, group, order, limit};
}

}  // namespace thermofrac
