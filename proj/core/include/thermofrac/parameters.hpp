#pragma once

#include <stdexcept>

#include "thermofrac/grid.hpp"

namespace thermofrac {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Material and fluid parameters. Defaults are the values of the reference
/// THM examples; temperatures are deviations from `reference_temperature`.
struct Parameters {
  double biot_alpha = 0.8;
  double friction = 0.8;
  double dilation_angle_deg = 3.0;
  double fluid_thermal_expansion = 4e-4;   // beta_f [1/K]
  double solid_thermal_expansion = 5e-5;   // beta_s [1/K]
  double critical_sif = 5e5;               // K_Ic [Pa sqrt(m)]
  double fluid_heat_capacity = 4.2e3;      // C_f [J/(kg K)]
  double solid_heat_capacity = 7.9e2;      // C_s
  double fluid_conductivity = 0.6;         // lambda_f [W/(m K)]
  double solid_conductivity = 2.0;         // lambda_s
  double fluid_density = 1e3;              // rho0_f [kg/m^3]
  double solid_density = 2.7e3;            // rho0_s
  double compressibility = 4e-10;          // c [1/Pa]
  double bulk_modulus = 2.2e10;            // K [Pa]
  double poisson_ratio = 0.2;
  double porosity = 0.05;
  double permeability = 1e-14;             // matrix kappa [m^2]
  double viscosity = 1e-3;                 // mu [Pa s]
  double residual_aperture = 1e-3;         // a_res [m]

  double reference_pressure = 0.0;         // p0 [Pa]
  double reference_temperature = 373.15;   // T0 [K]
  Vec2 gravity = Vec2::Zero();             // [m/s^2]
  double matrix_fluid_source = 0.0;        // q_p in the matrix [1/s]
  double matrix_heat_source = 0.0;         // q_T in the matrix [W/(m^3 K)]
  double fracture_fluid_source = 0.0;      // q_p in the fractures [1/s]

  /// Throws ParameterError on physically invalid values.
  void validate() const;

  double shear_modulus() const;
  double lame_lambda() const;
  double kolosov() const { return 3.0 - 4.0 * poisson_ratio; }
  double effective_conductivity() const;
  double effective_heat_capacity() const;  // (rho C)_eff
  double effective_thermal_expansion() const;
  double storage_coefficient() const;      // phi c + (alpha - phi) / K
  double fluid_volumetric_heat() const { return fluid_density * fluid_heat_capacity; }
};

/// a = a_res + jump_n, floored at a_res.
double aperture(double jump_n, double residual_aperture);
/// Cubic-law permeability a^2 / 12.
double fracture_permeability(double aperture);
/// g = tan(psi) |jump_t|.
double gap(double jump_t_norm, double dilation_angle_deg);
/// rho = rho0 exp(c (p - p0) - beta (T - T0)), with dp and dT deviations.
double density(double dp, double dT, const Parameters& prm);

}  // namespace thermofrac
