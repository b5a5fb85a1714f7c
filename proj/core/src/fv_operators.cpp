#include "thermofrac/fv_operators.hpp"

#include <stdexcept>

namespace thermofrac {

std::vector<int> upwind_cells(const SubdomainGrid& g, const std::vector<double>& face_flux) {
  std::vector<int> up(g.num_faces(), -1);
  for (int f = 0; f < g.num_faces(); ++f) up[f] = face_flux[f] > 0.0 ? g.face_cells[f][0] : g.face_cells[f][1];
  return up;
}

double upwind_flux(double flux, double value_out_of, double value_into) {
  return flux * (flux > 0.0 ? value_out_of : value_into);
}

InterfaceCoefficients interface_coefficients(double aperture, double viscosity, double conductivity) {
  if (!(aperture > 0.0)) throw std::invalid_argument("interface coefficients need a positive aperture");
  InterfaceCoefficients c;
  c.normal_permeability = aperture * aperture / 12.0;
  c.mass = c.normal_permeability / viscosity * 2.0 / aperture;
  c.conduction = conductivity * 2.0 / aperture;
  return c;
}

InterfaceFluxes interface_fluxes(double aperture, double viscosity, double conductivity, double p_l, double p_h,
                                 double t_l, double t_h, double rho_g_n, double rho_c_h, double rho_c_l) {
  const auto c = interface_coefficients(aperture, viscosity, conductivity);
  InterfaceFluxes q;
  q.eta = -c.mass * (p_l - p_h) + c.normal_permeability / viscosity * rho_g_n;
  q.conductive = -c.conduction * (t_l - t_h);
  q.advective = q.eta > 0.0 ? q.eta * rho_c_h * t_h : q.eta * rho_c_l * t_l;
  return q;
}

double backward_euler(double coeff, double volume, double x_new, double x_old, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  return coeff * volume * (x_new - x_old) / dt;
}

double two_point_transmissibility(double k0, double d0, double k1, double d1) {
  return 1.0 / (d0 / k0 + d1 / k1);
}

}  // namespace thermofrac
