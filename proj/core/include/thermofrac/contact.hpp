#pragma once

#include <string>
#include <vector>

namespace thermofrac {

enum class Regime { kOpen, kStick, kGlide };
const char* regime_name(Regime r);

/// Cell-local contact data. Tractions are compressive negative.
struct ContactPoint {
  double lambda_n = 0.0;
  double lambda_t = 0.0;
  double jump_n = 0.0;
  double jump_t = 0.0;
  double jump_t_prev = 0.0;  // tangential jump at the previous time level
};

struct ContactCoefficients {
  double friction = 0.8;
  double dilation_angle_deg = 3.0;
  double c_n = 1.0;
  double c_t = 1.0;
};

Regime classify(const ContactPoint& cp, const ContactCoefficients& cc);

/// Two residual rows of a fracture cell and their derivatives with respect to
/// (lambda_n, lambda_t) and (jump_n, jump_t).
struct ContactRows {
  double r[2] = {0.0, 0.0};
  double d_lambda[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double d_jump[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

ContactRows contact_rows(Regime regime, const ContactPoint& cp, const ContactCoefficients& cc);

/// Complementarity violations at a converged state, each >= 0 when satisfied.
struct KktReport {
  double max_tensile_traction = 0.0;  // max(lambda_n, 0)
  double max_penetration = 0.0;       // max(g - jump_n, 0)
  double max_complementarity = 0.0;   // |lambda_n (jump_n - g)|
  double max_friction_excess = 0.0;   // max(|lambda_t| + F lambda_n, 0)
};
KktReport kkt_report(const std::vector<ContactPoint>& points, const ContactCoefficients& cc);

}  // namespace thermofrac
