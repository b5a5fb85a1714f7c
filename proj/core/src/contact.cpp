#include "thermofrac/contact.hpp"

#include <algorithm>
#include <cmath>

#include "thermofrac/parameters.hpp"

namespace thermofrac {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::kOpen: return "open";
    case Regime::kStick: return "stick";
    case Regime::kGlide: return "glide";
  }
  return "?";
}

namespace {

double tan_psi(const ContactCoefficients& cc) { return gap(1.0, cc.dilation_angle_deg); }

double b_t(const ContactPoint& cp, const ContactCoefficients& cc) {
  return cp.lambda_t + cc.c_t * (cp.jump_t - cp.jump_t_prev);
}

}  // namespace

Regime classify(const ContactPoint& cp, const ContactCoefficients& cc) {
  const double g = gap(cp.jump_t, cc.dilation_angle_deg);
  const double bn = cp.lambda_n + cc.c_n * (cp.jump_n - g);
  if (bn > 0.0) return Regime::kOpen;
  if (std::abs(b_t(cp, cc)) <= -cc.friction * cp.lambda_n) return Regime::kStick;
  return Regime::kGlide;
}

ContactRows contact_rows(Regime regime, const ContactPoint& cp, const ContactCoefficients& cc) {
  ContactRows out;
  if (regime == Regime::kOpen) {
    out.r[0] = cp.lambda_n;
    out.r[1] = cp.lambda_t;
    out.d_lambda[0][0] = 1.0;
    out.d_lambda[1][1] = 1.0;
    return out;
  }
  // Normal row: jump_n = g(jump_t), shared by stick and glide.
  const double tp = tan_psi(cc);
  const double sgn_t = cp.jump_t > 0.0 ? 1.0 : (cp.jump_t < 0.0 ? -1.0 : 0.0);
  out.r[0] = cc.c_n * (cp.jump_n - tp * std::abs(cp.jump_t));
  out.d_jump[0][0] = cc.c_n;
  out.d_jump[0][1] = -cc.c_n * tp * sgn_t;

  const double bt = b_t(cp, cc);
  if (regime == Regime::kStick || bt == 0.0) {
    out.r[1] = cc.c_t * (cp.jump_t - cp.jump_t_prev);
    out.d_jump[1][1] = cc.c_t;
  } else {
    const double s = bt > 0.0 ? 1.0 : -1.0;
    out.r[1] = cp.lambda_t + cc.friction * cp.lambda_n * s;
    out.d_lambda[1][1] = 1.0;
    out.d_lambda[1][0] = cc.friction * s;
  }
  return out;
}

KktReport kkt_report(const std::vector<ContactPoint>& points, const ContactCoefficients& cc) {
  KktReport k;
  for (const auto& p : points) {
    const double g = gap(p.jump_t, cc.dilation_angle_deg);
    k.max_tensile_traction = std::max(k.max_tensile_traction, p.lambda_n);
    k.max_penetration = std::max(k.max_penetration, g - p.jump_n);
    k.max_complementarity = std::max(k.max_complementarity, std::abs(p.lambda_n * (p.jump_n - g)));
    k.max_friction_excess = std::max(k.max_friction_excess, std::abs(p.lambda_t) + cc.friction * p.lambda_n);
  }
  return k;
}

}  // namespace thermofrac
