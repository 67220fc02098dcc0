#include "morl/policy.hpp"

#include <algorithm>
#include <limits>

#include "morl/errors.hpp"

namespace morl {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kTabularSoftmax: return "tabular-softmax";
    case PolicyKind::kLinearSoftmax: return "linear-softmax";
    case PolicyKind::kGaussian: return "gaussian";
  }
  return "unknown";
}

void DiscretePolicy::check_params(const Vector& theta) const {
  if (theta.size() != num_params()) {
    throw ConfigError("policy: theta has " + std::to_string(theta.size()) +
                      " entries, expected " + std::to_string(num_params()));
  }
}

void DiscretePolicy::action_distribution(const Vector& theta, ObservationView obs,
                                         std::span<double> out) const {
  logits(theta, obs, out);
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : out) v /= total;
}

std::vector<double> DiscretePolicy::action_distribution(const Vector& theta,
                                                        ObservationView obs) const {
  std::vector<double> out(num_actions());
  action_distribution(theta, obs, out);
  return out;
}

void DiscretePolicy::log_distribution(const Vector& theta, ObservationView obs,
                                      std::span<double> out) const {
  logits(theta, obs, out);
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double v : out) total += std::exp(v - top);
  const double lse = top + std::log(total);
  for (double& v : out) v -= lse;
}

double DiscretePolicy::log_prob(const Vector& theta, ObservationView obs, int action) const {
  std::vector<double> lp(num_actions());
  log_distribution(theta, obs, lp);
  return lp[action];
}

Vector DiscretePolicy::grad_log_prob(const Vector& theta, ObservationView obs,
                                     int action) const {
  check_params(theta);
  std::vector<double> probs(num_actions());
  action_distribution(theta, obs, probs);
  Vector out = Vector::Zero(num_params());
  add_score(obs, action, probs, 1.0, out);
  return out;
}

TabularSoftmax::TabularSoftmax(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions) {
  if (num_states < 1 || num_actions < 1)
    throw ConfigError("tabular softmax: state and action counts must be positive");
}

void TabularSoftmax::check_compatible(const EnvSpec& spec, int num_actions) const {
  if (spec.encoding != StateEncoding::kTabular)
    throw ConfigError("tabular softmax requires a tabular environment");
  if (spec.state_count != num_states_ || num_actions != num_actions_)
    throw ConfigError("tabular softmax: shape does not match the environment");
}

void TabularSoftmax::logits(const Vector& theta, ObservationView obs,
                            std::span<double> out) const {
  if (obs.index < 0 || obs.index >= num_states_)
    throw ConfigError("tabular softmax: state index out of range");
  const double* row = theta.data() + static_cast<std::ptrdiff_t>(obs.index) * num_actions_;
  std::copy(row, row + num_actions_, out.begin());
}

void TabularSoftmax::add_score(ObservationView obs, int action, std::span<const double> probs,
                               double scale, Vector& out) const {
  const Eigen::Index base = static_cast<Eigen::Index>(obs.index) * num_actions_;
  for (int a = 0; a < num_actions_; ++a) out[base + a] -= scale * probs[a];
  out[base + action] += scale;
}

LinearSoftmax::LinearSoftmax(int feature_dim, int num_actions)
    : feature_dim_(feature_dim), num_actions_(num_actions) {
  if (feature_dim < 1 || num_actions < 1)
    throw ConfigError("linear softmax: feature and action counts must be positive");
}

void LinearSoftmax::check_compatible(const EnvSpec& spec, int num_actions) const {
  if (spec.encoding != StateEncoding::kFeaturized)
    throw ConfigError("linear softmax requires a featurized environment");
  if (spec.feature_dim != feature_dim_ || num_actions != num_actions_)
    throw ConfigError("linear softmax: shape does not match the environment");
}

void LinearSoftmax::logits(const Vector& theta, ObservationView obs,
                           std::span<double> out) const {
  if (static_cast<int>(obs.features.size()) != feature_dim_)
    throw ConfigError("linear softmax: feature dimension mismatch");
  for (int a = 0; a < num_actions_; ++a) {
    const double* w = theta.data() + static_cast<std::ptrdiff_t>(a) * feature_dim_;
    double z = 0.0;
    for (int f = 0; f < feature_dim_; ++f) z += w[f] * obs.features[f];
    out[a] = z;
  }
}

void LinearSoftmax::add_score(ObservationView obs, int action, std::span<const double> probs,
                              double scale, Vector& out) const {
  for (int a = 0; a < num_actions_; ++a) {
    const double coeff = scale * ((a == action ? 1.0 : 0.0) - probs[a]);
    if (coeff == 0.0) continue;
    const Eigen::Index base = static_cast<Eigen::Index>(a) * feature_dim_;
    for (int f = 0; f < feature_dim_; ++f) out[base + f] += coeff * obs.features[f];
  }
}

GaussianPolicy::GaussianPolicy(int feature_dim, double sigma)
    : feature_dim_(feature_dim), sigma_(sigma) {
  if (feature_dim < 1) throw ConfigError("gaussian policy: feature dimension must be positive");
  if (!(sigma > 0.0)) throw ConfigError("gaussian policy: sigma must be positive");
}

void GaussianPolicy::check(const Vector& theta, std::span<const double> features) const {
  if (theta.size() != feature_dim_ || static_cast<int>(features.size()) != feature_dim_)
    throw ConfigError("gaussian policy: dimension mismatch");
}

double GaussianPolicy::mean(const Vector& theta, std::span<const double> features) const {
  check(theta, features);
  double mu = 0.0;
  for (int f = 0; f < feature_dim_; ++f) mu += theta[f] * features[f];
  return mu;
}

double GaussianPolicy::sample(const Vector& theta, std::span<const double> features,
                              RngStream& rng) const {
  return mean(theta, features) + sigma_ * rng.normal();
}

double GaussianPolicy::log_prob(const Vector& theta, std::span<const double> features,
                                double action) const {
  const double z = (action - mean(theta, features)) / sigma_;
  return -0.5 * z * z - std::log(sigma_ * std::sqrt(2.0 * std::numbers::pi));
}

Vector GaussianPolicy::grad_log_prob(const Vector& theta, std::span<const double> features,
                                     double action) const {
  const double coeff = (action - mean(theta, features)) / (sigma_ * sigma_);
  Vector out(feature_dim_);
  for (int f = 0; f < feature_dim_; ++f) out[f] = coeff * features[f];
  return out;
}

std::unique_ptr<DiscretePolicy> make_policy(PolicyKind kind, const EnvSpec& spec,
                                            int num_actions) {
  switch (kind) {
    case PolicyKind::kTabularSoftmax:
      return std::make_unique<TabularSoftmax>(spec.state_count, num_actions);
    case PolicyKind::kLinearSoftmax:
      return std::make_unique<LinearSoftmax>(spec.feature_dim, num_actions);
    case PolicyKind::kGaussian:
      break;
  }
  throw ConfigError("gaussian policies have no discrete-action environment");
}

}  // namespace morl
