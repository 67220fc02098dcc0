#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "morl/environments.hpp"
#include "morl/errors.hpp"
#include "morl/policy.hpp"

using namespace morl;

namespace {

std::uint64_t binom(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace

TEST_SUITE("environments") {
  TEST_CASE("checked-in layout equals the built-in map") {
    const DstLayout file = DstLayout::load(std::string(MORL_DATA_DIR) + "/deep_sea_treasure.txt");
    CHECK(file == DstLayout::mo_gymnasium_default());
    CHECK(DstLayout::parse(file.to_text()) == file);
  }

  TEST_CASE("treasure values and positions of the reference map") {
    const DstLayout l = DstLayout::mo_gymnasium_default();
    CHECK(l.rows() == 11);
    CHECK(l.cols() == 11);
    CHECK(l.start() == GridPos{0, 0});
    const std::vector<std::pair<GridPos, double>> treasures = {
        {{1, 0}, 0.7},  {{2, 1}, 8.2},  {{3, 2}, 11.5}, {{4, 3}, 14.0}, {{4, 4}, 15.1},
        {{4, 5}, 16.1}, {{7, 6}, 19.6}, {{7, 7}, 20.3}, {{9, 8}, 22.4}, {{10, 9}, 23.7}};
    for (const auto& [pos, value] : treasures) {
      CHECK(l.at(pos).kind == CellKind::kTreasure);
      CHECK(l.at(pos).value == value);
    }
    CHECK(l.max_treasure() == 23.7);
  }

  TEST_CASE("moving down from the start enters the shallowest treasure") {
    DeepSeaTreasure env;
    const DstTransition tr = env.step({0, 0}, DstAction::kDown);
    CHECK(tr.next == GridPos{1, 0});
    CHECK(tr.treasure == 0.7);
    CHECK(tr.time_penalty == -1.0);
    CHECK(tr.done);
  }

  TEST_CASE("blocked moves stay in place with reward (0, -1)") {
    DeepSeaTreasure env;
    for (DstAction a : {DstAction::kUp, DstAction::kLeft}) {
      const DstTransition tr = env.step({0, 0}, a);
      CHECK(tr.next == GridPos{0, 0});
      CHECK(tr.treasure == 0.0);
      CHECK(tr.time_penalty == -1.0);
      CHECK_FALSE(tr.done);
    }
    // (5, 5) is seabed under the treasure at (4, 5).
    const DstTransition sea = env.step({5, 6}, DstAction::kLeft);
    CHECK(sea.next == GridPos{5, 6});
    CHECK(sea.time_penalty == -1.0);
    CHECK_FALSE(sea.done);
  }

  TEST_CASE("forced-down policy ends on the first treasure") {
    DeepSeaTreasure env;
    TabularSoftmax policy(env.spec().state_count, 4);
    Vector theta = Vector::Zero(policy.num_params());
    for (int s = 0; s < env.spec().state_count; ++s) theta[s * 4 + 1] = 60.0;
    RngStream rng(3);
    const Trajectory tr = sample_trajectory(env, policy, theta, 100, rng);
    REQUIRE(tr.size() == 1);
    CHECK(tr.reward(0, 0) == 0.7);
    CHECK(tr.reward(0, 1) == -1.0);
  }

  TEST_CASE("second DST return component equals minus the episode length at gamma 1") {
    DeepSeaTreasure env;
    TabularSoftmax policy(env.spec().state_count, 4);
    const Vector theta = Vector::Zero(policy.num_params());
    for (std::uint64_t k = 0; k < 200; ++k) {
      RngStream rng(StreamKey{1, 0, 0, k});
      const Trajectory tr = sample_trajectory(env, policy, theta, 100, rng);
      const Vector r = discounted_return(tr, 1.0);
      CHECK(r[1] == -static_cast<double>(tr.size()));
      for (std::size_t t = 0; t + 1 < tr.size(); ++t) CHECK(tr.reward(t, 0) == 0.0);
    }
  }

  TEST_CASE("DST reward bounds and spec") {
    DeepSeaTreasure env;
    const EnvSpec& s = env.spec();
    CHECK(s.num_objectives == 2);
    CHECK(s.horizon == 100);
    CHECK(s.discount == 1.0);
    CHECK(s.state_count == 121);
    CHECK(s.reward_bounds[0].lo == 0.0);
    CHECK(s.reward_bounds[0].hi == 23.7);
    CHECK(s.reward_bounds[1].lo == -1.0);
    CHECK(s.reward_bounds[1].hi == 0.0);
  }

  TEST_CASE("layout parser rejects malformed maps") {
    CHECK_THROWS_AS(DstLayout::parse(". .\n."), ConfigError);
    CHECK_THROWS_AS(DstLayout::parse("S X"), ConfigError);
    CHECK_THROWS_AS(DstLayout::parse(". ."), ConfigError);  // no start
  }

  TEST_CASE("server queues observation features") {
    ServerQueues env(2, 10, 0.9);
    ServerQueuesState st = env.initial_state();
    std::vector<double> f = env.observe(st);
    CHECK(f == std::vector<double>{0.0, 0.0, 1.0});
    st.t = 3;
    st.served = {2, 1};
    f = env.observe(st);
    CHECK(f == std::vector<double>{0.5, 0.25, 1.0});
  }

  TEST_CASE("server queues: shares sum to t/(t+1) and service counts to t") {
    ServerQueues env(3, 20, 0.99);
    ServerQueuesState st = env.initial_state();
    RngStream rng(11);
    std::vector<double> reward(3);
    for (int t = 0; t < 20; ++t) {
      const std::vector<double> f = env.observe(st);
      CHECK(f[0] + f[1] + f[2] == doctest::Approx(static_cast<double>(t) / (t + 1)).epsilon(1e-14));
      std::int64_t total = 0;
      for (auto c : st.served) total += c;
      CHECK(total == t);
      const bool done = env.step(st, t % 3, reward, rng);
      CHECK(done == (t + 1 == 20));
    }
  }

  TEST_CASE("server queues with no arrivals never pays") {
    ServerQueues env(3, 30, 0.9, {0.0, 0.0, 0.0});
    ServerQueuesState st = env.initial_state();
    RngStream rng(2);
    std::vector<double> reward(3);
    for (int t = 0; t < 30; ++t) {
      env.step(st, t % 3, reward, rng);
      CHECK(reward == std::vector<double>{0.0, 0.0, 0.0});
    }
  }

  TEST_CASE("serving a non-empty queue pays exactly one in its component") {
    ServerQueues env(2, 5, 0.9, {0.0, 0.0});
    ServerQueuesState st = env.initial_state();
    st.queue = {1, 0};
    RngStream rng(2);
    std::vector<double> reward(2);
    env.step(st, 0, reward, rng);
    CHECK(reward == std::vector<double>{1.0, 0.0});
    CHECK(st.queue[0] == 0);
  }

  TEST_CASE("cumulative reward never exceeds arrivals or the horizon") {
    const int M = 3, H = 40;
    ServerQueues env(M, H, 1.0 - 1e-3);
    RngStream rng(17);
    std::vector<double> reward(M);
    for (int ep = 0; ep < 200; ++ep) {
      ServerQueuesState st = env.initial_state();
      std::vector<double> got(M, 0.0);
      std::vector<std::int64_t> arrived(M, 0);
      for (int t = 0; t < H; ++t) {
        const std::vector<std::int64_t> before = st.queue;
        const int a = static_cast<int>(rng.uniform() * M);
        env.step(st, a, reward, rng);
        for (int m = 0; m < M; ++m) {
          // queue after = before + arrivals - served
          arrived[m] += st.queue[m] - before[m] + static_cast<std::int64_t>(reward[m]);
          got[m] += reward[m];
        }
      }
      for (int m = 0; m < M; ++m) {
        CHECK(got[m] <= static_cast<double>(std::min<std::int64_t>(H, arrived[m])));
      }
    }
  }

  TEST_CASE("empirical arrival rate matches the Poisson mean") {
    const double lambda = 0.3;
    ServerQueues env(1, 100000, 0.9, {lambda});
    ServerQueuesState st = env.initial_state();
    RngStream rng(23);
    std::vector<double> reward(1);
    std::int64_t arrivals = 0;
    for (int t = 0; t < 100000; ++t) {
      const std::int64_t before = st.queue[0];
      env.step(st, 0, reward, rng);
      arrivals += st.queue[0] - before + static_cast<std::int64_t>(reward[0]);
    }
    const double se = std::sqrt(lambda / 100000.0);
    CHECK(std::abs(static_cast<double>(arrivals) / 100000.0 - lambda) <= 3.0 * se);
  }

  TEST_CASE("default arrival rates are 0.8 / M") {
    ServerQueues env(8, 100, 0.9999);
    for (double r : env.arrival_rates()) CHECK(r == 0.1);
    CHECK(env.spec().feature_dim == 9);
    CHECK(env.num_actions() == 8);
  }

  TEST_CASE("state count examples") {
    CHECK(sq_state_count(3, 3) == 10);
    CHECK(sq_state_count(2, 2) == 3);
    for (int h = 1; h < 20; ++h) CHECK(sq_state_count(1, h) == 1);
    CHECK(sq_state_count(8, 100) == binom(107, 7));
  }

  TEST_CASE("state count satisfies the Pascal recurrence") {
    for (int M = 2; M <= 6; ++M) {
      for (int H = 1; H <= 6; ++H) {
        // The k = H term, count(M - 1, 0) = 1, is the empty composition.
        std::uint64_t sum = 1;
        for (int k = 0; k <= H - 1; ++k) sum += sq_state_count(M - 1, H - k);
        CHECK(sq_state_count(M, H) == sum);
        if (H > 1) CHECK(sq_state_count(M, H) == sq_state_count(M, H - 1) + sq_state_count(M - 1, H));
      }
    }
  }

  TEST_CASE("state count overflow is reported") {
    CHECK_THROWS_AS(sq_state_count(64, 500), OverflowError);
  }
}
