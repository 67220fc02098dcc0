#include "morl/mdp.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "morl/errors.hpp"
#include "morl/policy.hpp"

namespace morl {

void EnvSpec::validate() const {
  if (num_objectives < 1) throw ConfigError("env: num_objectives must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0))
    throw ConfigError("env: discount must lie in (0, 1]");
  if (horizon < 1) throw ConfigError("env: horizon must be >= 1");
  if (static_cast<int>(reward_bounds.size()) != num_objectives)
    throw ConfigError("env: one reward bound pair per objective required");
  for (const auto& b : reward_bounds) {
    if (!(b.lo <= b.hi)) throw ConfigError("env: reward lower bound exceeds upper bound");
  }
  if (encoding == StateEncoding::kTabular && state_count < 1)
    throw ConfigError("env: tabular state count must be >= 1");
  if (encoding == StateEncoding::kFeaturized && feature_dim < 1)
    throw ConfigError("env: feature dimension must be >= 1");
}

Trajectory::Trajectory(int num_objectives, int feature_dim)
    : num_objectives_(num_objectives), feature_dim_(feature_dim) {}

void Trajectory::reserve(std::size_t steps) {
  states_.reserve(steps);
  actions_.reserve(steps);
  features_.reserve(steps * feature_dim_);
  rewards_.reserve(steps * num_objectives_);
}

void Trajectory::push(int state_index, std::span<const double> features, int action,
                      std::span<const double> reward) {
  states_.push_back(state_index);
  features_.insert(features_.end(), features.begin(), features.begin() + feature_dim_);
  actions_.push_back(action);
  rewards_.insert(rewards_.end(), reward.begin(), reward.begin() + num_objectives_);
}

ObservationView Trajectory::observation(std::size_t t) const {
  ObservationView obs;
  obs.index = states_[t];
  if (feature_dim_ > 0) {
    obs.features = std::span<const double>(features_).subspan(t * feature_dim_, feature_dim_);
  }
  return obs;
}

std::span<const double> Trajectory::reward(std::size_t t) const {
  return std::span<const double>(rewards_).subspan(t * num_objectives_, num_objectives_);
}

Trajectory sample_trajectory(const Environment& env, const DiscretePolicy& policy,
                             const Vector& theta, int horizon, RngStream& rng) {
  if (horizon < 1) throw ConfigError("sample_trajectory: horizon must be >= 1");
  if (theta.size() != policy.num_params()) {
    throw ConfigError("sample_trajectory: theta has " + std::to_string(theta.size()) +
                      " entries, policy expects " + std::to_string(policy.num_params()));
  }
  const EnvSpec& spec = env.spec();
  policy.check_compatible(spec, env.num_actions());

  const int dim = spec.encoding == StateEncoding::kFeaturized ? spec.feature_dim : 0;
  Trajectory traj(spec.num_objectives, dim);
  traj.reserve(static_cast<std::size_t>(horizon));
  traj.origin_policy = fingerprint(theta);

  std::vector<double> features(dim);
  std::vector<double> probs(env.num_actions());
  std::vector<double> reward(spec.num_objectives);

  auto episode = env.reset(rng);
  for (int t = 0; t < horizon; ++t) {
    ObservationView obs;
    obs.index = episode->state_index();
    if (dim > 0) {
      episode->features(features);
      obs.features = features;
    }
    policy.action_distribution(theta, obs, probs);

    const double u = rng.uniform();
    int action = static_cast<int>(probs.size()) - 1;
    double cumulative = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      cumulative += probs[a];
      if (u < cumulative) {
        action = static_cast<int>(a);
        break;
      }
    }

    const bool done = episode->step(action, reward, rng);
    traj.push(obs.index, features, action, reward);
    if (done) break;
  }
  return traj;
}

Vector discounted_return(const Trajectory& traj, double gamma) {
  Vector out = Vector::Zero(traj.num_objectives());
  double discount = 1.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    for (int m = 0; m < traj.num_objectives(); ++m) out[m] += discount * traj.reward(t, m);
    discount *= gamma;
  }
  return out;
}

double discount_sum(double gamma, int horizon) {
  if (gamma == 1.0) return static_cast<double>(horizon);
  return (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
}

std::uint64_t fingerprint(const Vector& theta) {
  // FNV-1a over the raw bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::uint64_t bits;
    const double v = theta[i];
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace morl
