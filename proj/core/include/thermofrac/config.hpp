#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermofrac/problem.hpp"
#include "thermofrac/solver.hpp"

namespace thermofrac {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SideCondition {
  BcKind kind = BcKind::kNeumann;
  Vec2 value = Vec2::Zero();  // scalar conditions use value.x()
};

struct OutputConfig {
  std::string directory = "output";
  int every = 1;  // write fields every n-th step
  bool vtk = true;
  bool csv = true;
};

/// Validated run description. Side order: left, right, bottom, top.
struct RunConfig {
  Vec2 domain{1.0, 1.0};
  double h = 1.0 / 32.0;
  std::vector<Segment> fractures;

  Parameters params;
  std::array<SideCondition, 4> mechanics;
  std::array<SideCondition, 4> flow;
  std::array<SideCondition, 4> heat;
  std::vector<FractureEnd> fracture_ends;
  bool mechanics_only = false;
  double fracture_pressure = 0.0;
  double contact_scale_n = 100.0;
  double contact_scale_t = 100.0;

  SolverOptions solver;
  OutputConfig output;
};

/// Parses the YAML text. Unknown keys, missing required blocks and invalid
/// values raise ConfigError with line numbers where available.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the grid and boundary data. Boundary values are given per unit
/// area (outward fluxes, tractions) and converted to face-integrated values.
Problem make_problem(const RunConfig& cfg);

}  // namespace thermofrac
