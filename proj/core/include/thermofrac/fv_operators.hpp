#pragma once

#include <vector>

#include "thermofrac/grid.hpp"

namespace thermofrac {

/// Upstream cell of each face for the given face fluxes (stored normal
/// direction): face_cells[f][0] for positive flux, [1] otherwise. Boundary
/// faces may return -1 when the upstream side lies outside the domain.
std::vector<int> upwind_cells(const SubdomainGrid& g, const std::vector<double>& face_flux);

/// Advected face quantity: flux times the upstream value.
double upwind_flux(double flux, double value_out_of, double value_into);

/// Interface coefficients from the normal cubic law: the mass flux is
/// eta = -mass * (p_l - p_h) + gravity term, the conductive flux is
/// q = -conduction * (T_l - T_h).
struct InterfaceCoefficients {
  double mass = 0.0;        // (kappa_j / mu) (2 / a) = a / (6 mu)
  double conduction = 0.0;  // lambda_j (2 / a)
  double normal_permeability = 0.0;  // a^2 / 12
};
InterfaceCoefficients interface_coefficients(double aperture, double viscosity, double conductivity);

struct InterfaceFluxes {
  double eta = 0.0;
  double conductive = 0.0;
  double advective = 0.0;
};
/// Evaluates the three interface relations; `rho_g_n` is rho_l g . n_h.
InterfaceFluxes interface_fluxes(double aperture, double viscosity, double conductivity, double p_l, double p_h,
                                 double t_l, double t_h, double rho_g_n, double rho_c_h, double rho_c_l);

/// Backward-Euler accumulation coeff * V * (x_new - x_old) / dt.
double backward_euler(double coeff, double volume, double x_new, double x_old, double dt);

/// Two-point transmissibility between two cells with conductivities k0, k1 at
/// distances d0, d1 from the shared face (harmonic average, per unit face measure).
double two_point_transmissibility(double k0, double d0, double k1, double d1);

}  // namespace thermofrac
