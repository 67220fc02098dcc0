#pragma once

#include <string>

#include "morl/algorithms.hpp"

namespace morl {

// Problem constants the bounds are stated in: score bound G, score-Jacobian
// bound S, gradient sup-norm C and gradient Lipschitz constant L_f of f.
struct TheoryInputs {
  double G = 0.0;
  double S = 0.0;
  double C = 0.0;
  double L_f = 0.0;
};

struct TheoryConstants {
  double L_theta = 0.0;  // smoothness of theta -> f(J(theta))
  double D_J = 0.0;      // truncation-bias factor
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  // Retained for C_omega(t).
  double G = 0.0;
  double S = 0.0;
  int H = 0;
  double delta = 0.0;

  // Importance-weight variance factor t (2 t G^2 + S)(exp(2 G H delta) + 1).
  double c_omega(int t) const;
};

// Throws DomainError unless gamma lies in (0, 1): every constant carries a
// power of 1/(1 - gamma).
TheoryConstants variance_constants(const TheoryInputs& in, int num_objectives, double gamma,
                                   int horizon, double delta);

enum class SchedulePreset { kThm1, kThm2, kThm2Proof, kThm3, kThm4 };

std::string to_string(SchedulePreset preset);
SchedulePreset parse_preset(const std::string& name);
// thm1 / thm3 drive MO-PG, the rest MO-TSIVR-PG.
Algorithm preset_algorithm(SchedulePreset preset);

struct Schedule {
  Algorithm algorithm = Algorithm::kMoPg;
  Hyperparams hyper;
  TheoryConstants constants;
};

// Integer quantities are rounded up. Stationary presets use
// H = ln(M / eps), the global ones H = ln(M / eps) / (1 - gamma), and the
// proof variant of the second preset H = 6 ln(M / eps) / (1 - gamma).
// Throws UsageError unless eps lies in (0, 1) and M >= 1.
Schedule theorem_schedule(SchedulePreset preset, int num_objectives, double eps, double gamma,
                          const TheoryInputs& in);

}  // namespace morl
