#include "thermofrac/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace thermofrac {

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? fmt::format("line {}", m.line + 1) : std::string("<unknown line>");
}

void check_keys(const YAML::Node& n, const std::string& block, const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw ConfigError(fmt::format("{}: '{}' must be a mapping", where(n), block));
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError(fmt::format("{}: unknown key '{}' in '{}'", where(kv.first), key, block));
    }
  }
}

double get_double(const YAML::Node& n, const std::string& name) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: '{}' must be a number", where(n), name));
  }
}

int get_int(const YAML::Node& n, const std::string& name) {
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: '{}' must be an integer", where(n), name));
  }
}

bool get_bool(const YAML::Node& n, const std::string& name) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: '{}' must be true or false", where(n), name));
  }
}

Vec2 get_vec2(const YAML::Node& n, const std::string& name) {
  if (!n.IsSequence() || n.size() != 2) throw ConfigError(fmt::format("{}: '{}' must be a pair [x, y]", where(n), name));
  return Vec2(get_double(n[0], name), get_double(n[1], name));
}

void read_geometry(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "geometry", {"domain", "h", "fractures"});
  if (n["domain"]) cfg.domain = get_vec2(n["domain"], "geometry.domain");
  if (!n["h"]) throw ConfigError(fmt::format("{}: 'geometry' needs 'h'", where(n)));
  cfg.h = get_double(n["h"], "geometry.h");
  cfg.fractures.clear();
  if (const auto fr = n["fractures"]) {
    if (!fr.IsSequence()) throw ConfigError(fmt::format("{}: 'geometry.fractures' must be a list", where(fr)));
    for (const auto& seg : fr) {
      if (!seg.IsSequence() || seg.size() != 2) {
        throw ConfigError(fmt::format("{}: a fracture is a pair of points [[x0, y0], [x1, y1]]", where(seg)));
      }
      cfg.fractures.push_back({get_vec2(seg[0], "fracture start"), get_vec2(seg[1], "fracture end")});
    }
  }
}

struct ParamField {
  const char* name;
  double Parameters::*member;
};

constexpr ParamField kParamFields[] = {
    {"biot_alpha", &Parameters::biot_alpha},
    {"friction", &Parameters::friction},
    {"dilation_angle", &Parameters::dilation_angle_deg},
    {"fluid_thermal_expansion", &Parameters::fluid_thermal_expansion},
    {"solid_thermal_expansion", &Parameters::solid_thermal_expansion},
    {"critical_sif", &Parameters::critical_sif},
    {"fluid_heat_capacity", &Parameters::fluid_heat_capacity},
    {"solid_heat_capacity", &Parameters::solid_heat_capacity},
    {"fluid_conductivity", &Parameters::fluid_conductivity},
    {"solid_conductivity", &Parameters::solid_conductivity},
    {"fluid_density", &Parameters::fluid_density},
    {"solid_density", &Parameters::solid_density},
    {"compressibility", &Parameters::compressibility},
    {"bulk_modulus", &Parameters::bulk_modulus},
    {"poisson_ratio", &Parameters::poisson_ratio},
    {"porosity", &Parameters::porosity},
    {"permeability", &Parameters::permeability},
    {"viscosity", &Parameters::viscosity},
    {"residual_aperture", &Parameters::residual_aperture},
    {"reference_pressure", &Parameters::reference_pressure},
    {"reference_temperature", &Parameters::reference_temperature},
    {"matrix_fluid_source", &Parameters::matrix_fluid_source},
    {"matrix_heat_source", &Parameters::matrix_heat_source},
    {"fracture_fluid_source", &Parameters::fracture_fluid_source},
};

void read_material(const YAML::Node& n, RunConfig& cfg) {
  std::set<std::string> allowed{"gravity"};
  for (const auto& f : kParamFields) allowed.insert(f.name);
  check_keys(n, "material", allowed);
  for (const auto& f : kParamFields) {
    if (n[f.name]) cfg.params.*(f.member) = get_double(n[f.name], std::string("material.") + f.name);
  }
  if (n["gravity"]) cfg.params.gravity = get_vec2(n["gravity"], "material.gravity");
}

BcKind read_kind(const YAML::Node& n, const std::string& name) {
  const auto s = n.as<std::string>();
  if (s == "dirichlet") return BcKind::kDirichlet;
  if (s == "neumann") return BcKind::kNeumann;
  throw ConfigError(fmt::format("{}: '{}' must be 'dirichlet' or 'neumann', got '{}'", where(n), name, s));
}

void read_sides(const YAML::Node& n, const std::string& block, bool vector_valued, std::array<SideCondition, 4>& out) {
  static const char* kSides[] = {"left", "right", "bottom", "top"};
  check_keys(n, block, {"left", "right", "bottom", "top"});
  for (int s = 0; s < 4; ++s) {
    const auto side = n[kSides[s]];
    if (!side) continue;
    const std::string name = block + "." + kSides[s];
    check_keys(side, name, {"type", "value"});
    if (side["type"]) out[s].kind = read_kind(side["type"], name + ".type");
    if (const auto v = side["value"]) {
      out[s].value = vector_valued ? get_vec2(v, name + ".value") : Vec2(get_double(v, name + ".value"), 0.0);
    }
  }
}

void read_boundary(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "boundary",
             {"mechanics", "flow", "heat", "fractures", "mechanics_only", "fracture_pressure", "contact_scale_n",
              "contact_scale_t"});
  if (n["mechanics"]) read_sides(n["mechanics"], "boundary.mechanics", true, cfg.mechanics);
  if (n["flow"]) read_sides(n["flow"], "boundary.flow", false, cfg.flow);
  if (n["heat"]) read_sides(n["heat"], "boundary.heat", false, cfg.heat);
  cfg.fracture_ends.assign(cfg.fractures.size(), FractureEnd{});
  if (const auto fr = n["fractures"]) {
    if (!fr.IsSequence()) throw ConfigError(fmt::format("{}: 'boundary.fractures' must be a list", where(fr)));
    if (fr.size() != cfg.fractures.size()) {
      throw ConfigError(fmt::format("{}: 'boundary.fractures' has {} entries for {} fractures", where(fr), fr.size(),
                                    cfg.fractures.size()));
    }
    for (std::size_t i = 0; i < fr.size(); ++i) {
      const auto e = fr[i];
      check_keys(e, "boundary.fractures", {"type", "pressure", "temperature"});
      if (e["type"]) cfg.fracture_ends[i].dirichlet = read_kind(e["type"], "boundary.fractures.type") == BcKind::kDirichlet;
      if (e["pressure"]) cfg.fracture_ends[i].pressure = get_double(e["pressure"], "boundary.fractures.pressure");
      if (e["temperature"]) {
        cfg.fracture_ends[i].temperature = get_double(e["temperature"], "boundary.fractures.temperature");
      }
    }
  }
  if (n["mechanics_only"]) cfg.mechanics_only = get_bool(n["mechanics_only"], "boundary.mechanics_only");
  if (n["fracture_pressure"]) cfg.fracture_pressure = get_double(n["fracture_pressure"], "boundary.fracture_pressure");
  if (n["contact_scale_n"]) cfg.contact_scale_n = get_double(n["contact_scale_n"], "boundary.contact_scale_n");
  if (n["contact_scale_t"]) cfg.contact_scale_t = get_double(n["contact_scale_t"], "boundary.contact_scale_t");
}

void read_solver(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "solver",
             {"dt", "t_end", "newton_max_iter", "max_halvings", "max_regime_cycles", "residual_tolerance",
              "update_tolerance", "scales"});
  auto& s = cfg.solver;
  if (!n["dt"] || !n["t_end"]) throw ConfigError(fmt::format("{}: 'solver' needs 'dt' and 't_end'", where(n)));
  s.dt = get_double(n["dt"], "solver.dt");
  s.t_end = get_double(n["t_end"], "solver.t_end");
  if (n["newton_max_iter"]) s.max_iterations = get_int(n["newton_max_iter"], "solver.newton_max_iter");
  if (n["max_halvings"]) s.max_halvings = get_int(n["max_halvings"], "solver.max_halvings");
  if (n["max_regime_cycles"]) s.max_regime_cycles = get_int(n["max_regime_cycles"], "solver.max_regime_cycles");
  if (n["residual_tolerance"]) s.residual_tolerance = get_double(n["residual_tolerance"], "solver.residual_tolerance");
  if (n["update_tolerance"]) s.update_tolerance = get_double(n["update_tolerance"], "solver.update_tolerance");
  if (const auto sc = n["scales"]) {
    static const char* kNames[] = {"displacement", "mortar_displacement", "pressure", "temperature", "contact", "flux"};
    check_keys(sc, "solver.scales", {kNames[0], kNames[1], kNames[2], kNames[3], kNames[4], kNames[5]});
    for (int c = 0; c < kNumVarClasses; ++c) {
      if (sc[kNames[c]]) s.scales[c] = get_double(sc[kNames[c]], std::string("solver.scales.") + kNames[c]);
    }
  }
}

void read_output(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, "output", {"directory", "every", "vtk", "csv"});
  if (n["directory"]) cfg.output.directory = n["directory"].as<std::string>();
  if (n["every"]) cfg.output.every = get_int(n["every"], "output.every");
  if (n["vtk"]) cfg.output.vtk = get_bool(n["vtk"], "output.vtk");
  if (n["csv"]) cfg.output.csv = get_bool(n["csv"], "output.csv");
  if (cfg.output.every < 1) throw ConfigError(fmt::format("{}: 'output.every' must be at least 1", where(n)));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  std::vector<std::string> missing;
  for (const char* block : {"geometry", "boundary", "solver"}) {
    if (!root.IsMap() || !root[block]) missing.push_back(block);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("missing required blocks: " + list);
  }
  check_keys(root, "<top level>", {"geometry", "material", "boundary", "solver", "output"});

  RunConfig cfg;
  read_geometry(root["geometry"], cfg);
  if (root["material"]) read_material(root["material"], cfg);
  read_boundary(root["boundary"], cfg);
  read_solver(root["solver"], cfg);
  if (root["output"]) read_output(root["output"], cfg);

  try {
    cfg.params.validate();
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.h > 0.0)) throw ConfigError("geometry.h must be positive");
  if (!(cfg.contact_scale_n > 0.0 && cfg.contact_scale_t > 0.0)) throw ConfigError("contact scales must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Problem make_problem(const RunConfig& cfg) {
  Problem p;
  p.params = cfg.params;
  try {
    p.grid = build_cartesian_mdg(cfg.domain, cfg.h, cfg.fractures);
  } catch (const GridError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  const auto& g = p.grid.matrix;
  const int nf = g.num_faces();
  p.flow.kinds.kind.assign(nf, BcKind::kUnassigned);
  p.heat.kinds.kind.assign(nf, BcKind::kUnassigned);
  p.mech.kinds.kind.assign(nf, BcKind::kUnassigned);
  p.flow.values.assign(nf, 0.0);
  p.heat.values.assign(nf, 0.0);
  p.mech.values.assign(nf, Vec2::Zero());
  for (int f = 0; f < nf; ++f) {
    if (!g.has_tag(f, face_tag::kDomainBoundary)) continue;
    const int side = static_cast<int>(face_side(p.grid, f));
    const double area = g.face_areas[f];
    const double sign = g.face_sign(g.any_cell(f), f);  // outward = sign * stored normal
    auto scalar = [&](const SideCondition& sc, ScalarBoundary& b) {
      b.kinds.kind[f] = sc.kind;
      b.values[f] = sc.kind == BcKind::kDirichlet ? sc.value.x() : sign * area * sc.value.x();
    };
    scalar(cfg.flow[side], p.flow);
    scalar(cfg.heat[side], p.heat);
    const auto& mc = cfg.mechanics[side];
    p.mech.kinds.kind[f] = mc.kind;
    p.mech.values[f] = mc.kind == BcKind::kDirichlet ? mc.value : Vec2(sign * area * mc.value);
  }
  p.fracture_ends = cfg.fracture_ends;
  p.fracture_ends.resize(p.grid.fractures.size());
  p.mechanics_only = cfg.mechanics_only;
  p.fixed_fracture_pressure = cfg.params.reference_pressure + cfg.fracture_pressure;
  p.contact_scale_n = cfg.contact_scale_n;
  p.contact_scale_t = cfg.contact_scale_t;
  p.validate();
  return p;
}

}  // namespace thermofrac
