#include "morl/scalarization.hpp"

#include <algorithm>
#include <cmath>

#include "morl/errors.hpp"

namespace morl {
namespace {

void require_dim(const Vector& j, int expected, const char* what) {
  if (j.size() != expected) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(expected) +
                      " objectives, got " + std::to_string(j.size()));
  }
}

double checked_sqrt_arg(double arg) {
  if (!(arg > 0.0)) {
    throw DomainError("sqrt-treasure: nonpositive square-root argument " + std::to_string(arg) +
                      " (return estimate not projected onto Omega?)");
  }
  return arg;
}

double checked_fair_denominator(double denom) {
  if (!(denom > 0.0)) {
    throw DomainError("alpha-fairness: J_m + sigma = " + std::to_string(denom) +
                      " is not positive (return estimate not projected onto Omega?)");
  }
  return denom;
}

}  // namespace

std::string to_string(ScalarizationKind kind) {
  switch (kind) {
    case ScalarizationKind::kSqrtTreasure: return "sqrt-treasure";
    case ScalarizationKind::kAlphaFairness: return "alpha-fairness";
    case ScalarizationKind::kCustomTable: return "custom-table";
  }
  return "unknown";
}

ScalarizationKind parse_scalarization_kind(const std::string& name) {
  if (name == "sqrt-treasure") return ScalarizationKind::kSqrtTreasure;
  if (name == "alpha-fairness") return ScalarizationKind::kAlphaFairness;
  if (name == "custom-table") return ScalarizationKind::kCustomTable;
  throw ConfigError("unknown scalarization kind '" + name +
                    "' (expected sqrt-treasure, alpha-fairness or custom-table)");
}

bool OmegaBox::contains(const Vector& j, double rel_tol) const {
  if (j.size() != size()) return false;
  for (int m = 0; m < size(); ++m) {
    const double slack = rel_tol * (1.0 + std::max(std::abs(lo[m]), std::abs(hi[m])));
    if (!(j[m] >= lo[m] - slack && j[m] <= hi[m] + slack)) return false;
  }
  return true;
}

double scalarize(const ScalarizationSpec& spec, const Vector& j) {
  switch (spec.kind) {
    case ScalarizationKind::kSqrtTreasure:
      require_dim(j, 2, "sqrt-treasure");
      return std::sqrt(checked_sqrt_arg(j[0] + spec.sigma)) +
             std::sqrt(checked_sqrt_arg(spec.time_budget + j[1] + spec.sigma));
    case ScalarizationKind::kAlphaFairness: {
      double total = 0.0;
      for (Eigen::Index m = 0; m < j.size(); ++m)
        total -= spec.horizon / checked_fair_denominator(j[m] + spec.sigma);
      return total;
    }
    case ScalarizationKind::kCustomTable:
      require_dim(j, static_cast<int>(spec.weights.size()), "custom-table");
      return Eigen::Map<const Vector>(spec.weights.data(), j.size()).dot(j);
  }
  throw ConfigError("unknown scalarization");
}

Vector scalarize_grad(const ScalarizationSpec& spec, const Vector& j) {
  Vector out(j.size());
  switch (spec.kind) {
    case ScalarizationKind::kSqrtTreasure:
      require_dim(j, 2, "sqrt-treasure");
      out[0] = 0.5 / std::sqrt(checked_sqrt_arg(j[0] + spec.sigma));
      out[1] = 0.5 / std::sqrt(checked_sqrt_arg(spec.time_budget + j[1] + spec.sigma));
      return out;
    case ScalarizationKind::kAlphaFairness:
      for (Eigen::Index m = 0; m < j.size(); ++m) {
        const double d = checked_fair_denominator(j[m] + spec.sigma);
        out[m] = spec.horizon / (d * d);
      }
      return out;
    case ScalarizationKind::kCustomTable:
      require_dim(j, static_cast<int>(spec.weights.size()), "custom-table");
      for (Eigen::Index m = 0; m < j.size(); ++m) out[m] = spec.weights[m];
      return out;
  }
  throw ConfigError("unknown scalarization");
}

OmegaBox omega_box(const std::vector<RewardBounds>& bounds, double gamma, int horizon) {
  const double scale = discount_sum(gamma, horizon);
  OmegaBox box;
  for (const auto& b : bounds) {
    box.lo.push_back(b.lo * scale);
    box.hi.push_back(b.hi * scale);
  }
  return box;
}

OmegaBox omega_box(const EnvSpec& spec) {
  return omega_box(spec.reward_bounds, spec.discount, spec.horizon);
}

Vector project_omega(const Vector& j, const OmegaBox& box) {
  if (j.size() != box.size()) throw ConfigError("project_omega: dimension mismatch");
  Vector out(j.size());
  for (int m = 0; m < box.size(); ++m) out[m] = std::clamp(j[m], box.lo[m], box.hi[m]);
  return out;
}

ScalarizationSpec with_default_constants(ScalarizationSpec spec, const OmegaBox& box) {
  double grad_bound = 0.0;
  double lipschitz = 0.0;
  switch (spec.kind) {
    case ScalarizationKind::kSqrtTreasure: {
      // Both terms are largest where their argument is smallest.
      const double x1 = checked_sqrt_arg(box.lo.at(0) + spec.sigma);
      const double x2 = checked_sqrt_arg(spec.time_budget + box.lo.at(1) + spec.sigma);
      const double x = std::min(x1, x2);
      grad_bound = 0.5 / std::sqrt(x);
      lipschitz = 0.25 / (x * std::sqrt(x));
      break;
    }
    case ScalarizationKind::kAlphaFairness: {
      const double lo = *std::min_element(box.lo.begin(), box.lo.end());
      const double d = checked_fair_denominator(lo + spec.sigma);
      grad_bound = spec.horizon / (d * d);
      lipschitz = 2.0 * spec.horizon / (d * d * d);
      break;
    }
    case ScalarizationKind::kCustomTable:
      for (double w : spec.weights) grad_bound = std::max(grad_bound, std::abs(w));
      // The gradient is constant; any positive value is a valid constant.
      lipschitz = 1.0;
      break;
  }
  if (spec.grad_bound <= 0.0) spec.grad_bound = grad_bound;
  if (spec.grad_lipschitz <= 0.0) spec.grad_lipschitz = lipschitz;
  return spec;
}

ScalarizationSpec sqrt_treasure(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("scalarization.sigma must be positive");
  ScalarizationSpec s;
  s.kind = ScalarizationKind::kSqrtTreasure;
  s.sigma = sigma;
  return s;
}

ScalarizationSpec alpha_fairness(double horizon, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("scalarization.sigma must be positive");
  ScalarizationSpec s;
  s.kind = ScalarizationKind::kAlphaFairness;
  s.sigma = sigma;
  s.horizon = horizon;
  return s;
}

ScalarizationSpec custom_table(std::vector<double> weights) {
  if (weights.empty()) throw ConfigError("custom-table scalarization needs weights");
  ScalarizationSpec s;
  s.kind = ScalarizationKind::kCustomTable;
  s.weights = std::move(weights);
  return s;
}

}  // namespace morl
