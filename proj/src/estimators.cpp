#include "morl/estimators.hpp"

#include <cmath>
#include <limits>

#include "morl/errors.hpp"

namespace morl {
namespace {

// Weighted, discounted scalar reward c_h = omega_h gamma^h <w, r_h> and its
// suffix sums, consumed by the gradient estimator.
std::vector<double> reward_to_go(const Trajectory& traj, std::span<const double> weights,
                                 const Vector& objective_weights, double gamma) {
  const std::size_t n = traj.size();
  std::vector<double> suffix(n + 1, 0.0);
  std::vector<double> discount(n);
  double d = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    discount[t] = d;
    d *= gamma;
  }
  for (std::size_t t = n; t-- > 0;) {
    double r = 0.0;
    for (int m = 0; m < traj.num_objectives(); ++m) r += objective_weights[m] * traj.reward(t, m);
    const double w = weights.empty() ? 1.0 : weights[t];
    suffix[t] = suffix[t + 1] + w * discount[t] * r;
  }
  return suffix;
}

Vector gradient_impl(const Trajectory& traj, const DiscretePolicy& policy, const Vector& target,
                     std::span<const double> weights, const Vector& j_hat,
                     const ScalarizationSpec& spec, const OmegaBox& box, double gamma) {
  if (!box.contains(j_hat)) {
    throw DomainError("estimate_gradient: return estimate lies outside Omega; project it first");
  }
  policy.check_params(target);
  const Vector df = scalarize_grad(spec, j_hat);
  const std::vector<double> suffix = reward_to_go(traj, weights, df, gamma);

  Vector g = Vector::Zero(policy.num_params());
  std::vector<double> probs(policy.num_actions());
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (suffix[t] == 0.0) continue;
    const ObservationView obs = traj.observation(t);
    policy.action_distribution(target, obs, probs);
    policy.add_score(obs, traj.action(t), probs, suffix[t], g);
  }
  return g;
}

}  // namespace

std::vector<double> is_weights(const Trajectory& traj, const DiscretePolicy& policy,
                               const Vector& behaviour, const Vector& target) {
  policy.check_params(behaviour);
  policy.check_params(target);
  std::vector<double> out(traj.size(), 1.0);
  if (behaviour == target) return out;

  std::vector<double> lp_behaviour(policy.num_actions());
  std::vector<double> lp_target(policy.num_actions());
  double log_weight = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const ObservationView obs = traj.observation(t);
    const int a = traj.action(t);
    policy.log_distribution(behaviour, obs, lp_behaviour);
    policy.log_distribution(target, obs, lp_target);
    if (lp_behaviour[a] == -std::numeric_limits<double>::infinity()) {
      throw DegenerateSupportError("importance weight: behaviour policy gives probability 0 to "
                                   "the recorded action at step " +
                                   std::to_string(t));
    }
    log_weight += lp_target[a] - lp_behaviour[a];
    out[t] = std::exp(log_weight);
  }
  return out;
}

double is_weight(const Trajectory& traj, const DiscretePolicy& policy, const Vector& behaviour,
                 const Vector& target, std::size_t t) {
  if (t >= traj.size()) throw UsageError("is_weight: step index beyond trajectory length");
  return is_weights(traj, policy, behaviour, target)[t];
}

Vector estimate_return(const Trajectory& traj, const DiscretePolicy& policy,
                       const Vector& behaviour, const Vector& target, double gamma) {
  if (behaviour == target) {
    policy.check_params(target);
    return discounted_return(traj, gamma);
  }
  const std::vector<double> w = is_weights(traj, policy, behaviour, target);
  Vector out = Vector::Zero(traj.num_objectives());
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const double scale = discount * w[t];
    for (int m = 0; m < traj.num_objectives(); ++m) out[m] += scale * traj.reward(t, m);
    discount *= gamma;
  }
  return out;
}

Vector estimate_gradient(const Trajectory& traj, const DiscretePolicy& policy,
                         const Vector& behaviour, const Vector& target, const Vector& j_hat,
                         const ScalarizationSpec& spec, const OmegaBox& box, double gamma) {
  if (behaviour == target) {
    return gradient_impl(traj, policy, target, {}, j_hat, spec, box, gamma);
  }
  const std::vector<double> w = is_weights(traj, policy, behaviour, target);
  return gradient_impl(traj, policy, target, w, j_hat, spec, box, gamma);
}

Vector estimate_gradient(const Trajectory& traj, const DiscretePolicy& policy,
                         const Vector& theta, const Vector& j_hat,
                         const ScalarizationSpec& spec, const OmegaBox& box, double gamma) {
  return gradient_impl(traj, policy, theta, {}, j_hat, spec, box, gamma);
}

Vector batch_mean(std::span<const Vector> items) {
  if (items.empty()) throw UsageError("batch_mean: empty batch");
  // Incremental form: copies of one vector average to that vector exactly.
  Vector mean = items.front();
  for (std::size_t k = 1; k < items.size(); ++k) {
    if (items[k].size() != mean.size()) throw UsageError("batch_mean: dimension mismatch");
    mean += (items[k] - mean) / static_cast<double>(k + 1);
  }
  return mean;
}

}  // namespace morl
