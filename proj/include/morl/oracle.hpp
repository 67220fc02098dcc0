#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "morl/mdp.hpp"
#include "morl/scalarization.hpp"

namespace morl {

// Explicit finite MDP: P(s'|s,a), r_m(s,a), rho. Used as ground truth in
// tests; every oracle routine here is deterministic.
struct TabularMdp {
  int num_states = 1;
  int num_actions = 1;
  int num_objectives = 1;
  double gamma = 1.0;
  std::vector<double> transition;  // [s][a][s']
  std::vector<double> reward;      // [s][a][m]
  std::vector<double> initial;     // rho[s]

  double p(int s, int a, int next) const {
    return transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
  }
  double r(int s, int a, int m) const {
    return reward[(static_cast<std::size_t>(s) * num_actions + a) * num_objectives + m];
  }
  int num_params() const { return num_states * num_actions; }

  // Throws ConfigError unless every distribution is nonnegative and sums to
  // one within 1e-12.
  void validate() const;
  // Per objective [min(0, min r), max(0, max r)].
  std::vector<RewardBounds> reward_bounds() const;
  EnvSpec env_spec(int horizon) const;
};

// Sampling view of a TabularMdp for a fixed horizon, driven by TabularSoftmax.
class TabularMdpEnv final : public Environment {
 public:
  TabularMdpEnv(TabularMdp mdp, int horizon);

  const EnvSpec& spec() const override { return spec_; }
  int num_actions() const override { return mdp_.num_actions; }
  std::unique_ptr<Episode> reset(RngStream& rng) const override;
  const TabularMdp& mdp() const { return mdp_; }

 private:
  TabularMdp mdp_;
  EnvSpec spec_;
};

// Random MDP whose probabilities and rewards are multiples of 2^-20, so the
// fixture round-trips exactly through text. Rewards lie in [0, 1).
TabularMdp random_tabular_mdp(int num_states, int num_actions, int num_objectives,
                              std::uint64_t seed);

struct CorpusEntry {
  std::uint64_t seed = 0;
  int horizon = 1;
  TabularMdp mdp;
};

// The reference corpus: |S| in {1,2,3}, |A| in {2,3}, M in {1,2,3},
// H in {1,2,3}, one MDP per combination.
std::vector<CorpusEntry> generate_corpus();
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::vector<CorpusEntry>& corpus, const std::filesystem::path& path);

// Tabular softmax probabilities pi(.|s) for theta laid out as [s][a].
std::vector<double> softmax_row(const TabularMdp& mdp, const Vector& theta, int s);

// J^H(theta) by forward propagation of the state distribution.
Vector exact_truncated_value(const TabularMdp& mdp, const Vector& theta, int horizon);

// d J^H / d theta as a (num_params x M) matrix, by backward recursion on
// finite-horizon Q functions.
Eigen::MatrixXd exact_value_jacobian(const TabularMdp& mdp, const Vector& theta, int horizon);

// grad_theta f(J^H(theta)) = (dJ^H/dtheta) grad_J f(J^H(theta)).
Vector exact_scalarized_gradient(const TabularMdp& mdp, const Vector& theta, int horizon,
                                 const ScalarizationSpec& spec);

using TrajectoryFunctional = std::function<Vector(const Trajectory&)>;

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

// sum over all length-H trajectories of Pr_theta(tau) * functional(tau).
// Throws BudgetExceededError when (|S| |A|)^H exceeds `budget`.
Vector enumerate_expectation(const TabularMdp& mdp, const Vector& theta, int horizon,
                             const TrajectoryFunctional& functional,
                             std::uint64_t budget = kDefaultEnumerationBudget);

// Central differences, one coordinate at a time.
Vector finite_diff_grad(const std::function<double(const Vector&)>& fn, const Vector& theta,
                        double step);

}  // namespace morl
