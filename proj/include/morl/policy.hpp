#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "morl/mdp.hpp"

namespace morl {

enum class PolicyKind { kTabularSoftmax, kLinearSoftmax, kGaussian };

std::string to_string(PolicyKind kind);

// Bounds on the score function and its Jacobian. Only the theory-constant
// calculators read these; the defaults are the tabular-softmax values.
struct PolicyConstants {
  double G = std::numbers::sqrt2;
  double S = 1.0;
};

// Softmax policy over a finite action set. Parameters are a flat vector;
// each subclass defines the layout and the logits.
class DiscretePolicy {
 public:
  virtual ~DiscretePolicy() = default;

  virtual PolicyKind kind() const = 0;
  virtual int num_params() const = 0;
  virtual int num_actions() const = 0;
  virtual void check_compatible(const EnvSpec& spec, int num_actions) const = 0;

  virtual void logits(const Vector& theta, ObservationView obs,
                      std::span<double> out) const = 0;

  // out += scale * grad_theta log pi(action | obs), given probs = pi(. | obs).
  virtual void add_score(ObservationView obs, int action, std::span<const double> probs,
                         double scale, Vector& out) const = 0;

  void action_distribution(const Vector& theta, ObservationView obs,
                           std::span<double> out) const;
  std::vector<double> action_distribution(const Vector& theta, ObservationView obs) const;
  // Log-probabilities of every action, computed stably via log-sum-exp.
  void log_distribution(const Vector& theta, ObservationView obs,
                        std::span<double> out) const;

  double log_prob(const Vector& theta, ObservationView obs, int action) const;
  Vector grad_log_prob(const Vector& theta, ObservationView obs, int action) const;

  // Throws ConfigError on a size mismatch.
  void check_params(const Vector& theta) const;
};

// One logit per (state, action); theta[s * A + a].
class TabularSoftmax final : public DiscretePolicy {
 public:
  TabularSoftmax(int num_states, int num_actions);

  PolicyKind kind() const override { return PolicyKind::kTabularSoftmax; }
  int num_params() const override { return num_states_ * num_actions_; }
  int num_actions() const override { return num_actions_; }
  int num_states() const { return num_states_; }
  void check_compatible(const EnvSpec& spec, int num_actions) const override;

  void logits(const Vector& theta, ObservationView obs, std::span<double> out) const override;
  void add_score(ObservationView obs, int action, std::span<const double> probs, double scale,
                 Vector& out) const override;

 private:
  int num_states_;
  int num_actions_;
};

// logit_a = <theta_a, phi(s)>; theta[a * F + f].
class LinearSoftmax final : public DiscretePolicy {
 public:
  LinearSoftmax(int feature_dim, int num_actions);

  PolicyKind kind() const override { return PolicyKind::kLinearSoftmax; }
  int num_params() const override { return feature_dim_ * num_actions_; }
  int num_actions() const override { return num_actions_; }
  int feature_dim() const { return feature_dim_; }
  void check_compatible(const EnvSpec& spec, int num_actions) const override;

  void logits(const Vector& theta, ObservationView obs, std::span<double> out) const override;
  void add_score(ObservationView obs, int action, std::span<const double> probs, double scale,
                 Vector& out) const override;

 private:
  int feature_dim_;
  int num_actions_;
};

// Scalar action a ~ N(<w, phi(s)>, sigma^2) with fixed sigma; theta = w.
class GaussianPolicy {
 public:
  GaussianPolicy(int feature_dim, double sigma);

  PolicyKind kind() const { return PolicyKind::kGaussian; }
  int num_params() const { return feature_dim_; }
  double sigma() const { return sigma_; }

  double mean(const Vector& theta, std::span<const double> features) const;
  double sample(const Vector& theta, std::span<const double> features, RngStream& rng) const;
  double log_prob(const Vector& theta, std::span<const double> features, double action) const;
  Vector grad_log_prob(const Vector& theta, std::span<const double> features,
                       double action) const;

 private:
  void check(const Vector& theta, std::span<const double> features) const;

  int feature_dim_;
  double sigma_;
};

// Builds the default policy for an environment: tabular softmax for tabular
// state encodings, linear softmax otherwise.
std::unique_ptr<DiscretePolicy> make_policy(PolicyKind kind, const EnvSpec& spec,
                                            int num_actions);

}  // namespace morl
