#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "morl/rng.hpp"

namespace morl {

using Vector = Eigen::VectorXd;

struct RewardBounds {
  double lo = 0.0;
  double hi = 1.0;
};

enum class StateEncoding { kTabular, kFeaturized };

struct EnvSpec {
  int num_objectives = 1;
  double discount = 1.0;
  int horizon = 1;
  std::vector<RewardBounds> reward_bounds;
  StateEncoding encoding = StateEncoding::kTabular;
  int state_count = 0;  // tabular
  int feature_dim = 0;  // featurized

  // Throws ConfigError when an invariant is broken.
  void validate() const;
};

// What a policy sees of a state: an index for tabular environments and a
// feature vector for featurized ones. The unused half is -1 / empty.
struct ObservationView {
  int index = -1;
  std::span<const double> features;
};

// Flat storage of one episode. Steps are indexed 0..size()-1; missing steps
// after an absorbing state are implicitly zero reward.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(int num_objectives, int feature_dim);

  void push(int state_index, std::span<const double> features, int action,
            std::span<const double> reward);
  void reserve(std::size_t steps);

  std::size_t size() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }
  int num_objectives() const { return num_objectives_; }
  int feature_dim() const { return feature_dim_; }

  ObservationView observation(std::size_t t) const;
  int action(std::size_t t) const { return actions_[t]; }
  std::span<const double> reward(std::size_t t) const;
  double reward(std::size_t t, int m) const {
    return rewards_[t * num_objectives_ + m];
  }

  // Fingerprint of the parameter vector the trajectory was sampled under.
  std::uint64_t origin_policy = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  int num_objectives_ = 0;
  int feature_dim_ = 0;
  std::vector<int> states_;
  std::vector<double> features_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
};

// Mutable state of a single episode. Not shared across threads.
class Episode {
 public:
  virtual ~Episode() = default;
  virtual int state_index() const { return -1; }
  // Writes feature_dim() values; featurized environments only.
  virtual void features(std::span<double> /*out*/) const {}
  // Applies `action`, writes the reward vector, and returns true when the
  // episode has reached an absorbing state.
  virtual bool step(int action, std::span<double> reward, RngStream& rng) = 0;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual int num_actions() const = 0;
  virtual std::unique_ptr<Episode> reset(RngStream& rng) const = 0;
};

class DiscretePolicy;

// Samples s0 ~ rho, a_t ~ pi_theta, s_{t+1} ~ P for at most `horizon` steps.
// Throws ConfigError if theta does not fit the policy or the policy does not
// fit the environment.
Trajectory sample_trajectory(const Environment& env, const DiscretePolicy& policy,
                             const Vector& theta, int horizon, RngStream& rng);

// sum_t gamma^t r(s_t, a_t), componentwise.
Vector discounted_return(const Trajectory& traj, double gamma);

// sum_{t<H} gamma^t.
double discount_sum(double gamma, int horizon);

std::uint64_t fingerprint(const Vector& theta);

}  // namespace morl
