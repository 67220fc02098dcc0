#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "morl/oracle.hpp"

namespace morl::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("morl-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline TabularMdp zero_reward_mdp(int states, int actions, int objectives) {
  TabularMdp mdp = random_tabular_mdp(states, actions, objectives, 5);
  std::fill(mdp.reward.begin(), mdp.reward.end(), 0.0);
  return mdp;
}

// One state, one-step self loop, given per-action reward rows.
inline TabularMdp single_state_mdp(int actions, int objectives, std::vector<double> reward,
                                   double gamma) {
  TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = actions;
  mdp.num_objectives = objectives;
  mdp.gamma = gamma;
  mdp.transition.assign(actions, 1.0);
  mdp.reward = std::move(reward);
  mdp.initial = {1.0};
  return mdp;
}

inline Vector gaussian_vector(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(gen);
  return v;
}

}  // namespace morl::test
