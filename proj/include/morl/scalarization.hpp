#pragma once

#include <string>
#include <vector>

#include "morl/mdp.hpp"

namespace morl {

enum class ScalarizationKind {
  kSqrtTreasure,   // sqrt(J1 + sigma) + sqrt(budget + J2 + sigma)
  kAlphaFairness,  // -sum_m H / (J_m + sigma)    (alpha = 2)
  kCustomTable,    // sum_m w_m J_m with a per-objective weight table
};

std::string to_string(ScalarizationKind kind);
ScalarizationKind parse_scalarization_kind(const std::string& name);

struct ScalarizationSpec {
  ScalarizationKind kind = ScalarizationKind::kSqrtTreasure;
  double sigma = 1.0;
  // Numerator of the fairness terms; bound to the environment horizon.
  double horizon = 100.0;
  // Time-penalty budget inside the second square root of sqrt-treasure.
  double time_budget = 100.0;
  std::vector<double> weights;  // custom-table only
  // Lipschitz constant of grad f (L_f) and sup-norm bound of grad f (C).
  // Only the diagnostics use them; <= 0 means "not set yet".
  double grad_lipschitz = 0.0;
  double grad_bound = 0.0;
};

// Per-objective interval containing every attainable return vector.
struct OmegaBox {
  std::vector<double> lo;
  std::vector<double> hi;

  int size() const { return static_cast<int>(lo.size()); }
  // Containment with a relative slack of `rel_tol` for rounding in means.
  bool contains(const Vector& j, double rel_tol = 1e-9) const;
};

double scalarize(const ScalarizationSpec& spec, const Vector& j);
Vector scalarize_grad(const ScalarizationSpec& spec, const Vector& j);

// [r_min * Gamma, r_max * Gamma] per objective with Gamma = discount_sum(gamma, H).
OmegaBox omega_box(const std::vector<RewardBounds>& bounds, double gamma, int horizon);
OmegaBox omega_box(const EnvSpec& spec);

// Coordinate-wise clamp.
Vector project_omega(const Vector& j, const OmegaBox& box);

// Fills unset L_f and C with the analytic values on `box`: the sup of
// |df/dJ_m| and of |d2f/dJ_m^2| over the box (both scalarizations are
// separable, so the Hessian is diagonal).
ScalarizationSpec with_default_constants(ScalarizationSpec spec, const OmegaBox& box);

ScalarizationSpec sqrt_treasure(double sigma = 1.0);
ScalarizationSpec alpha_fairness(double horizon, double sigma = 1.0);
ScalarizationSpec custom_table(std::vector<double> weights);

}  // namespace morl
