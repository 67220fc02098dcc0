#include <cmath>

#include "doctest.h"
#include "morl/environments.hpp"
#include "morl/errors.hpp"
#include "morl/mdp.hpp"
#include "morl/oracle.hpp"
#include "morl/policy.hpp"
#include "test_util.hpp"

using namespace morl;

namespace {

Trajectory make_traj(const std::vector<std::vector<double>>& rewards) {
  Trajectory tr(static_cast<int>(rewards.front().size()), 0);
  for (const auto& r : rewards) tr.push(0, {}, 0, r);
  return tr;
}

}  // namespace

TEST_SUITE("mdp") {
  TEST_CASE("discount_sum") {
    CHECK(discount_sum(0.5, 3) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(discount_sum(1.0, 100) == 100.0);
    double direct = 0.0, p = 1.0;
    for (int t = 0; t < 100; ++t) {
      direct += p;
      p *= 0.9999;
    }
    CHECK(std::abs(discount_sum(0.9999, 100) - direct) <= 1e-9);
    CHECK(std::abs(discount_sum(0.9999, 100) - 99.5066) <= 1e-4);
  }

  TEST_CASE("discounted_return") {
    CHECK(discounted_return(make_traj({{1, 1}, {1, 1}}), 0.5).isApprox(Vector::Constant(2, 1.5)));
    CHECK(discounted_return(make_traj({{0, 0}, {0, 0}, {0, 0}}), 0.9).isZero(0.0));
    std::vector<std::vector<double>> penalty(37, {0.0, -1.0});
    const Vector r = discounted_return(make_traj(penalty), 1.0);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == -37.0);
  }

  TEST_CASE("near-deterministic policy on a single-state env repeats its step") {
    TabularMdp mdp = test::single_state_mdp(2, 2, {1.0, 0.0, 0.0, 1.0}, 0.9);
    TabularMdpEnv env(mdp, 3);
    TabularSoftmax policy(1, 2);
    Vector theta(2);
    theta << 50.0, -50.0;
    RngStream rng(9);
    const Trajectory tr = sample_trajectory(env, policy, theta, 3, rng);
    REQUIRE(tr.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
      CHECK(tr.action(t) == 0);
      CHECK(tr.reward(t, 0) == 1.0);
      CHECK(tr.reward(t, 1) == 0.0);
    }
  }

  TEST_CASE("same inputs give byte-identical trajectories") {
    DeepSeaTreasure env;
    TabularSoftmax policy(env.spec().state_count, 4);
    const Vector theta = Vector::Zero(policy.num_params());
    RngStream a(StreamKey{1, 2, 3, 4}), b(StreamKey{1, 2, 3, 4});
    CHECK(sample_trajectory(env, policy, theta, 100, a) == sample_trajectory(env, policy, theta, 100, b));
  }

  TEST_CASE("sample_trajectory rejects a mis-sized theta") {
    DeepSeaTreasure env;
    TabularSoftmax policy(env.spec().state_count, 4);
    RngStream rng(1);
    CHECK_THROWS_AS(sample_trajectory(env, policy, Vector::Zero(3), 10, rng), ConfigError);
  }

  TEST_CASE("fingerprint distinguishes parameter vectors") {
    Vector a = Vector::Zero(4), b = Vector::Zero(4);
    b[2] = 1e-12;
    CHECK(fingerprint(a) == fingerprint(Vector::Zero(4)));
    CHECK(fingerprint(a) != fingerprint(b));
  }
}
