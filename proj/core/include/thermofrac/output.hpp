#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermofrac/simulation.hpp"

namespace thermofrac {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Legacy-VTK file name `{field}_{subdomain}_{step:06}.vtk`.
std::string vtk_file_name(const std::string& field, const std::string& subdomain, int step);

/// Writes one scalar (ncomp = 1) or vector (ncomp = 2) cell field on the
/// matrix grid. `values` holds ncomp entries per cell.
void write_matrix_vtk(const std::filesystem::path& file, const SubdomainGrid& g, const std::string& field,
                      const std::vector<double>& values, int ncomp);
/// Same for a fracture grid, written as line cells.
void write_fracture_vtk(const std::filesystem::path& file, const SubdomainGrid& g, const std::string& field,
                        const std::vector<double>& values, int ncomp);

/// Writes all fields of one step: matrix u, p, T; per fracture p, T,
/// aperture, jump and contact traction.
void write_step_vtk(const std::filesystem::path& dir, const StepInfo& info);

/// Step hook writing fields every `every` steps and appending the CSV
/// monitors (monitoring.csv, fracture_sizes.csv, sifs.csv) after each step.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, int every, bool vtk, bool csv);

  void operator()(const StepInfo& info);
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::ofstream open_csv(const std::string& name, const std::string& header);

  std::filesystem::path dir_;
  int every_;
  bool vtk_;
  bool csv_;
  std::shared_ptr<std::ofstream> monitoring_, sizes_, sifs_;
};

/// Output directory: THERMOFRAC_OUTPUT_DIR if set, otherwise `fallback`.
std::filesystem::path output_directory(const std::string& fallback);

}  // namespace thermofrac
