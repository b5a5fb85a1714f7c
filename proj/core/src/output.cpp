#include "thermofrac/output.hpp"

#include <cstdlib>
#include <memory>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "thermofrac/assembly.hpp"

namespace thermofrac {

namespace {

std::ofstream open_file(const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw OutputError("cannot write " + file.string());
  return os;
}

void write_cell_data(std::ofstream& os, int ncells, const std::string& field, const std::vector<double>& values,
                     int ncomp) {
  if (static_cast<int>(values.size()) != ncomp * ncells) {
    throw OutputError(fmt::format("field {} has {} values for {} cells", field, values.size(), ncells));
  }
  fmt::print(os, "CELL_DATA {}\n", ncells);
  if (ncomp == 1) {
    fmt::print(os, "SCALARS {} double 1\nLOOKUP_TABLE default\n", field);
    for (double v : values) fmt::print(os, "{:.10g}\n", v);
  } else {
    fmt::print(os, "VECTORS {} double\n", field);
    for (int c = 0; c < ncells; ++c) fmt::print(os, "{:.10g} {:.10g} 0\n", values[2 * c], values[2 * c + 1]);
  }
}

}  // namespace

std::string vtk_file_name(const std::string& field, const std::string& subdomain, int step) {
  return fmt::format("{}_{}_{:06d}.vtk", field, subdomain, step);
}

void write_matrix_vtk(const std::filesystem::path& file, const SubdomainGrid& g, const std::string& field,
                      const std::vector<double>& values, int ncomp) {
  auto os = open_file(file);
  fmt::print(os, "# vtk DataFile Version 3.0\n{} matrix\nASCII\nDATASET UNSTRUCTURED_GRID\n", field);
  fmt::print(os, "POINTS {} double\n", g.num_nodes());
  for (const auto& x : g.nodes) fmt::print(os, "{:.10g} {:.10g} 0\n", x.x(), x.y());
  std::vector<std::vector<int>> loops(g.num_cells());
  std::size_t total = 0;
  for (int c = 0; c < g.num_cells(); ++c) {
    loops[c] = g.cell_nodes(c);
    total += loops[c].size() + 1;
  }
  fmt::print(os, "CELLS {} {}\n", g.num_cells(), total);
  for (const auto& l : loops) {
    fmt::print(os, "{}", l.size());
    for (int n : l) fmt::print(os, " {}", n);
    os << '\n';
  }
  fmt::print(os, "CELL_TYPES {}\n", g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) os << "7\n";  // VTK_POLYGON
  write_cell_data(os, g.num_cells(), field, values, ncomp);
}

void write_fracture_vtk(const std::filesystem::path& file, const SubdomainGrid& g, const std::string& field,
                        const std::vector<double>& values, int ncomp) {
  auto os = open_file(file);
  fmt::print(os, "# vtk DataFile Version 3.0\n{} fracture\nASCII\nDATASET UNSTRUCTURED_GRID\n", field);
  fmt::print(os, "POINTS {} double\n", g.num_faces());
  for (const auto& x : g.face_centers) fmt::print(os, "{:.10g} {:.10g} 0\n", x.x(), x.y());
  fmt::print(os, "CELLS {} {}\n", g.num_cells(), 3 * g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    fmt::print(os, "2 {} {}\n", g.cell_faces[c][0].face, g.cell_faces[c][1].face);
  }
  fmt::print(os, "CELL_TYPES {}\n", g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) os << "3\n";  // VTK_LINE
  write_cell_data(os, g.num_cells(), field, values, ncomp);
}

void write_step_vtk(const std::filesystem::path& dir, const StepInfo& info) {
  const auto& L = *info.layout;
  const auto& x = *info.x;
  const auto& mdg = info.problem->grid;
  const double t0 = info.problem->params.reference_temperature;
  const int nc = L.num_cells();

  std::vector<double> u(2 * nc), p(nc), T(nc);
  for (int c = 0; c < nc; ++c) {
    u[2 * c] = x(L.u(c, 0));
    u[2 * c + 1] = x(L.u(c, 1));
    p[c] = x(L.pm(c));
    T[c] = x(L.tm(c)) + t0;
  }
  write_matrix_vtk(dir / vtk_file_name("displacement", "matrix", info.step), mdg.matrix, "displacement", u, 2);
  write_matrix_vtk(dir / vtk_file_name("pressure", "matrix", info.step), mdg.matrix, "pressure", p, 1);
  write_matrix_vtk(dir / vtk_file_name("temperature", "matrix", info.step), mdg.matrix, "temperature", T, 1);

  const auto kin = fracture_kinematics(*info.problem, L, x);
  for (int fi = 0; fi < L.num_fractures(); ++fi) {
    const auto& g = mdg.fractures[fi].grid;
    const std::string sub = fmt::format("fracture{}", fi);
    const int n = L.fracture_cells(fi);
    std::vector<double> pf(n), tf(n), a(n), jump(2 * n), lam(2 * n);
    for (int lc = 0; lc < n; ++lc) {
      pf[lc] = x(L.pf(fi, lc));
      tf[lc] = x(L.tf(fi, lc)) + t0;
      a[lc] = kin.aperture[fi][lc];
      jump[2 * lc] = kin.jump_n[fi][lc];
      jump[2 * lc + 1] = kin.jump_t[fi][lc];
      lam[2 * lc] = x(L.lam(fi, lc, 0));
      lam[2 * lc + 1] = x(L.lam(fi, lc, 1));
    }
    write_fracture_vtk(dir / vtk_file_name("pressure", sub, info.step), g, "pressure", pf, 1);
    write_fracture_vtk(dir / vtk_file_name("temperature", sub, info.step), g, "temperature", tf, 1);
    write_fracture_vtk(dir / vtk_file_name("aperture", sub, info.step), g, "aperture", a, 1);
    write_fracture_vtk(dir / vtk_file_name("jump", sub, info.step), g, "jump", jump, 2);
    write_fracture_vtk(dir / vtk_file_name("traction", sub, info.step), g, "traction", lam, 2);
  }
}

OutputWriter::OutputWriter(std::filesystem::path dir, int every, bool vtk, bool csv)
    : dir_(std::move(dir)), every_(std::max(1, every)), vtk_(vtk), csv_(csv) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw OutputError("cannot create output directory " + dir_.string() + ": " + ec.message());
  if (csv_) {
    monitoring_ = std::make_shared<std::ofstream>(
        open_csv("monitoring.csv", "step,time,iterations,halvings,substeps,mass_error,energy_error"));
    sizes_ = std::make_shared<std::ofstream>(open_csv("fracture_sizes.csv", "time,fracture,length,cells"));
    sifs_ = std::make_shared<std::ofstream>(open_csv("sifs.csv", "time,fracture,tip_face,k_i,k_ii,action"));
  }
}

std::ofstream OutputWriter::open_csv(const std::string& name, const std::string& header) {
  auto os = open_file(dir_ / name);
  os << header << '\n';
  return os;
}

void OutputWriter::operator()(const StepInfo& info) {
  if (vtk_ && info.step % every_ == 0) write_step_vtk(dir_, info);
  if (!csv_) return;
  const auto& r = *info.report;
  fmt::print(*monitoring_, "{},{:.10g},{},{},{},{:.3e},{:.3e}\n", info.step, info.time, r.iterations, r.halvings,
             r.substeps, r.mass_error, r.energy_error);
  const auto& mdg = info.problem->grid;
  for (std::size_t fi = 0; fi < mdg.fractures.size(); ++fi) {
    fmt::print(*sizes_, "{:.10g},{},{:.10g},{}\n", info.time, fi, mdg.fractures[fi].length(),
               mdg.fractures[fi].grid.num_cells());
  }
  PropagationLog log;
  log.record(info.time, *info.propagation);
  for (const auto& row : log.rows()) {
    fmt::print(*sifs_, "{:.10g},{},{},{:.6e},{:.6e},{}\n", row.time, row.fracture, row.tip_face, row.k_i, row.k_ii,
               row.action);
  }
  monitoring_->flush();
  sizes_->flush();
  sifs_->flush();
}

std::filesystem::path output_directory(const std::string& fallback) {
  if (const char* env = std::getenv("THERMOFRAC_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

}  // namespace thermofrac
