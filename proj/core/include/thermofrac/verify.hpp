#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermofrac/propagation.hpp"
#include "thermofrac/solver.hpp"

namespace thermofrac {

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K_I of a pressurised crack of half-length l in an infinite medium.
double sneddon_k_i(double pressure, double half_length);

/// Normalised errors over the two tips: sqrt(sum (K - K_ref)^2) / (2 K_I,an).
double sif_error(const std::vector<double>& k, double k_ref, double k_i_an);

struct SneddonSetup {
  double domain = 50.0;
  double half_length = 10.0;
  double pressure = 1e-4;
  double h = 1.25;
  double poisson_ratio = 0.2;
  double bulk_modulus = 2.2e10;
};

/// Clamped square with a horizontal crack centred in it, elastostatics only.
Problem sneddon_problem(const SneddonSetup& s);

struct SneddonResult {
  SneddonSetup setup;
  std::vector<SifEstimate> sifs;  // both tips
  double k_i_an = 0.0;
  double error_i = 0.0;
  double error_ii = 0.0;
  int newton_iterations = 0;
};

/// Throws VerificationError when a crack cell ends up closed.
SneddonResult run_sneddon(const SneddonSetup& s, const SolverOptions& opt = {});

/// Mesh sizes of the Sneddon study, coarsest first.
std::vector<double> sneddon_mesh_sizes(int levels);
std::vector<double> sneddon_poisson_ratios();

void write_sneddon_csv(std::ostream& os, const std::vector<SneddonResult>& results);

/// Example-2 material with K_Ic raised to 1.5e7 Pa sqrt(m); at 5e5 every
/// mesh is supercritical from the first step and onset is not measurable.
Parameters speed_parameters();

struct SpeedSetup {
  double h = 1.0 / 32.0;
  double inlet_pressure = 5e6;      // left end of the left fracture [Pa]
  double inlet_temperature = -50.0;  // deviation from T0 [K]
  Parameters params = speed_parameters();
};

/// Unit square with two collinear horizontal fractures reaching 1/4 in from
/// the left and right boundaries at y = 1/2. Matrix no-flow, fixed top and
/// bottom, traction-free sides; Dirichlet fracture ends on the boundary.
Problem speed_problem(const SpeedSetup& s);

/// One (h, dt) run of the speed study; sizes are lengths of the left fracture.
struct SpeedRun {
  double h = 0.0;
  double dt = 0.0;
  std::vector<std::pair<double, double>> size;  // (time, length), first entry t = 0
  double onset_time = 0.0;   // first step end with a longer fracture
  double mean_speed = 0.0;   // least-squares slope over the growth phase [m/s]
  int splits = 0;
  bool inconclusive = true;  // no propagation before t_end
  int resolution_warnings = 0;
  double worst_mass_error = 0.0;
  double worst_energy_error = 0.0;
  double seconds = 0.0;
};

/// Onset and mean speed from a size series. The growth phase runs from the
/// last sample before onset to the last sample that grew.
void analyse_speed_run(SpeedRun& run);

struct SpeedStudyOptions {
  std::vector<double> mesh_sizes{1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> time_steps{100.0, 50.0, 25.0};
  double t_end = 2600.0;
  SpeedSetup setup;
  SolverOptions solver;
  int jobs = 1;  // runs executed concurrently
};

SpeedRun run_speed_case(const SpeedSetup& setup, double dt, double t_end, const SolverOptions& solver,
                        const ProgressSink& progress = {});

/// Every (h, dt) combination, ordered by h (coarsest first) then dt (largest first).
std::vector<SpeedRun> propagation_speed_study(const SpeedStudyOptions& opt, const ProgressSink& progress = {});

/// Columns h, dt, t, size.
void write_speed_csv(std::ostream& os, const std::vector<SpeedRun>& runs);

/// One pass/fail line of a verification harness.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};
bool all_pass(const std::vector<Check>& checks);

/// Reference E_I per Poisson ratio from a fine-mesh run, read from a CSV with
/// the columns of write_sneddon_csv (the finest mesh per ratio is used).
std::map<double, double> read_sneddon_reference(std::istream& is);

/// (a) E_II <= 0.1 E_I, (b) max/min E_I over meshes < 2 per ratio,
/// (c) E_I < band_factor * reference E_I.
std::vector<Check> check_sneddon(const std::vector<SneddonResult>& results, const std::map<double, double>& reference,
                                 double band_factor = 1.25);

/// (a) size curves are nondecreasing steps of exactly h, (b) the two
/// smallest dt per h start within 2 of the larger dt, (c) coarser meshes
/// start no later at every dt and strictly earlier at the smallest dt,
/// (d) every run with dt times the fine-dt speed above h moves at most h/dt
/// and raises the resolution warning.
std::vector<Check> check_speed_study(const std::vector<SpeedRun>& runs);

}  // namespace thermofrac
