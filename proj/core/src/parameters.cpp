#include "thermofrac/parameters.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace thermofrac {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
}

}  // namespace

void Parameters::validate() const {
  require_positive(biot_alpha, "biot_alpha");
  if (biot_alpha > 1.0) throw ParameterError("biot_alpha must not exceed 1");
  require_positive(friction, "friction");
  if (!(dilation_angle_deg >= 0.0 && dilation_angle_deg < 90.0)) {
    throw ParameterError("dilation_angle must lie in [0, 90) degrees");
  }
  require_positive(fluid_thermal_expansion, "fluid_thermal_expansion");
  require_positive(solid_thermal_expansion, "solid_thermal_expansion");
  require_positive(critical_sif, "critical_sif");
  require_positive(fluid_heat_capacity, "fluid_heat_capacity");
  require_positive(solid_heat_capacity, "solid_heat_capacity");
  require_positive(fluid_conductivity, "fluid_conductivity");
  require_positive(solid_conductivity, "solid_conductivity");
  require_positive(fluid_density, "fluid_density");
  require_positive(solid_density, "solid_density");
  require_positive(compressibility, "compressibility");
  require_positive(bulk_modulus, "bulk_modulus");
  if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5)) throw ParameterError("poisson_ratio must lie in (0, 0.5)");
  require_positive(porosity, "porosity");
  if (porosity > 1.0) throw ParameterError("porosity must not exceed 1");
  if (porosity > biot_alpha) throw ParameterError("porosity must not exceed biot_alpha");
  require_positive(permeability, "permeability");
  require_positive(viscosity, "viscosity");
  require_positive(residual_aperture, "residual_aperture");
  require_positive(reference_temperature, "reference_temperature");
}

double Parameters::shear_modulus() const {
  return 3.0 * bulk_modulus * (1.0 - 2.0 * poisson_ratio) / (2.0 * (1.0 + poisson_ratio));
}

double Parameters::lame_lambda() const { return bulk_modulus - 2.0 * shear_modulus() / 3.0; }

double Parameters::effective_conductivity() const {
  return porosity * fluid_conductivity + (1.0 - porosity) * solid_conductivity;
}

double Parameters::effective_heat_capacity() const {
  return porosity * fluid_density * fluid_heat_capacity + (1.0 - porosity) * solid_density * solid_heat_capacity;
}

double Parameters::effective_thermal_expansion() const {
  return porosity * fluid_thermal_expansion + (biot_alpha - porosity) * solid_thermal_expansion;
}

double Parameters::storage_coefficient() const {
  return porosity * compressibility + (biot_alpha - porosity) / bulk_modulus;
}

double aperture(double jump_n, double residual_aperture) {
  return std::max(residual_aperture + jump_n, residual_aperture);
}

double fracture_permeability(double a) { return a * a / 12.0; }

double gap(double jump_t_norm, double dilation_angle_deg) {
  return std::tan(dilation_angle_deg * std::numbers::pi / 180.0) * std::abs(jump_t_norm);
}

double density(double dp, double dT, const Parameters& prm) {
  const double e = prm.compressibility * dp - prm.fluid_thermal_expansion * dT;
  if (!(std::abs(e) < 50.0)) {
    throw std::overflow_error("density: non-physical state (exponent " + std::to_string(e) + ")");
  }
  return prm.fluid_density * std::exp(e);
}

}  // namespace thermofrac
