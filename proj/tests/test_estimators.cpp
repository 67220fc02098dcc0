#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "morl/errors.hpp"
#include "morl/estimators.hpp"
#include "morl/oracle.hpp"
#include "test_util.hpp"

using namespace morl;

namespace {

Trajectory tabular_traj(int M, std::initializer_list<std::pair<int, int>> steps,
                        std::vector<double> rewards) {
  Trajectory tr(M, 0);
  std::size_t k = 0;
  for (auto [s, a] : steps) {
    tr.push(s, {}, a, std::span<const double>(rewards).subspan(k, M));
    k += M;
  }
  return tr;
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("equal parameters give weights of exactly one") {
    std::mt19937_64 gen(1);
    const TabularMdp mdp = random_tabular_mdp(3, 3, 2, 4);
    TabularMdpEnv env(mdp, 6);
    TabularSoftmax p(3, 3);
    const Vector theta = test::gaussian_vector(gen, 9);
    RngStream rng(3);
    const Trajectory tr = sample_trajectory(env, p, theta, 6, rng);
    for (double w : is_weights(tr, p, theta, theta)) CHECK(w == 1.0);
    CHECK(estimate_return(tr, p, theta, theta, mdp.gamma) == discounted_return(tr, mdp.gamma));
  }

  TEST_CASE("hand-computed first-step weight") {
    TabularSoftmax p(1, 2);
    Vector t1 = Vector::Zero(2), t2(2);
    t2 << std::log(3.0), 0.0;
    const Trajectory tr = tabular_traj(1, {{0, 0}, {0, 1}}, {1.0, 1.0});
    CHECK(is_weight(tr, p, t1, t2, 0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(is_weight(tr, p, t1, t2, 1) == doctest::Approx(1.5 * 0.5).epsilon(1e-15));
    CHECK_THROWS_AS(is_weight(tr, p, t1, t2, 2), UsageError);
  }

  TEST_CASE("weights are multiplicative and match direct products") {
    std::mt19937_64 gen(2);
    const TabularMdp mdp = random_tabular_mdp(3, 2, 1, 9);
    TabularMdpEnv env(mdp, 5);
    TabularSoftmax p(3, 2);
    const Vector t1 = test::gaussian_vector(gen, 6), t2 = test::gaussian_vector(gen, 6);
    RngStream rng(4);
    const Trajectory tr = sample_trajectory(env, p, t1, 5, rng);
    const std::vector<double> w = is_weights(tr, p, t1, t2);
    double direct = 1.0;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const double ratio = std::exp(p.log_prob(t2, tr.observation(t), tr.action(t)) -
                                    p.log_prob(t1, tr.observation(t), tr.action(t)));
      direct *= ratio;
      CHECK(std::abs(w[t] - direct) <= 1e-12 * direct);
      if (t > 0) CHECK(w[t] == doctest::Approx(w[t - 1] * ratio).epsilon(1e-13));
    }
  }

  TEST_CASE("zero probability under the behaviour policy is reported") {
    TabularSoftmax p(1, 2);
    Vector t1(2), t2 = Vector::Zero(2);
    t1 << 0.0, -std::numeric_limits<double>::infinity();
    const Trajectory tr = tabular_traj(1, {{0, 1}}, {1.0});
    CHECK_THROWS_AS(is_weights(tr, p, t1, t2), DegenerateSupportError);
  }

  TEST_CASE("zero rewards give zero estimates") {
    std::mt19937_64 gen(3);
    TabularSoftmax p(2, 2);
    const Vector t1 = test::gaussian_vector(gen, 4), t2 = test::gaussian_vector(gen, 4);
    const Trajectory tr = tabular_traj(2, {{0, 1}, {1, 0}, {1, 1}}, std::vector<double>(6, 0.0));
    CHECK(estimate_return(tr, p, t1, t2, 0.9).isZero(0.0));
    const ScalarizationSpec spec = alpha_fairness(3.0, 1.0);
    const OmegaBox box = omega_box({{0, 1}, {0, 1}}, 0.9, 3);
    const Vector j = Vector::Constant(2, 0.5);
    CHECK(estimate_gradient(tr, p, t1, t2, j, spec, box, 0.9).isZero(0.0));
    CHECK(estimate_gradient(tr, p, t2, j, spec, box, 0.9).isZero(0.0));
  }

  TEST_CASE("one-step gradient expands by hand") {
    // Single state, 2 actions, rewards r(0) = (1, 0), r(1) = (0.25, 0.5).
    TabularSoftmax p(1, 2);
    Vector theta(2);
    theta << 0.3, -0.4;
    const ScalarizationSpec spec = alpha_fairness(1.0, 1.0);
    const OmegaBox box = omega_box({{0, 1}, {0, 1}}, 0.5, 1);
    Vector j(2);
    j << 0.2, 0.7;
    const Vector df = scalarize_grad(spec, j);
    for (int a = 0; a < 2; ++a) {
      const std::vector<double> r = a == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.25, 0.5};
      const Trajectory tr = tabular_traj(2, {{0, a}}, r);
      const Vector expected = p.grad_log_prob(theta, ObservationView{0, {}}, a) * (df[0] * r[0] + df[1] * r[1]);
      CHECK((estimate_gradient(tr, p, theta, j, spec, box, 0.5) - expected).norm() <= 1e-15);
    }
  }

  TEST_CASE("enumeration: return estimator is unbiased for J^H(theta2)") {
    std::mt19937_64 gen(4);
    const TabularMdp mdp = random_tabular_mdp(2, 2, 2, 31);
    TabularSoftmax p(2, 2);
    for (int rep = 0; rep < 5; ++rep) {
      const Vector t1 = test::gaussian_vector(gen, 4), t2 = test::gaussian_vector(gen, 4);
      const Vector e = enumerate_expectation(mdp, t1, 3, [&](const Trajectory& tr) {
        return estimate_return(tr, p, t1, t2, mdp.gamma);
      });
      CHECK((e - exact_truncated_value(mdp, t2, 3)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("enumeration: gradient estimator is unbiased off-policy") {
    std::mt19937_64 gen(5);
    const TabularMdp mdp = random_tabular_mdp(2, 2, 2, 32);
    TabularSoftmax p(2, 2);
    const ScalarizationSpec spec = alpha_fairness(2.0, 1.0);
    const OmegaBox box = omega_box(mdp.reward_bounds(), mdp.gamma, 2);
    for (int rep = 0; rep < 5; ++rep) {
      const Vector t1 = test::gaussian_vector(gen, 4), t2 = test::gaussian_vector(gen, 4);
      Vector j(2);
      j << 0.3 * box.hi[0], 0.8 * box.hi[1];
      const Vector e = enumerate_expectation(mdp, t1, 2, [&](const Trajectory& tr) {
        return estimate_gradient(tr, p, t1, t2, j, spec, box, mdp.gamma);
      });
      const Vector exact = exact_value_jacobian(mdp, t2, 2) * scalarize_grad(spec, j);
      CHECK((e - exact).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("return estimate outside Omega is refused") {
    TabularSoftmax p(1, 2);
    const Trajectory tr = tabular_traj(1, {{0, 0}}, {1.0});
    const OmegaBox box = omega_box({{0, 1}}, 0.5, 1);
    Vector j(1);
    j << 1.5;
    CHECK_THROWS_AS(estimate_gradient(tr, p, Vector::Zero(2), j, alpha_fairness(1.0, 1.0), box, 0.5),
                    DomainError);
  }

  TEST_CASE("batch_mean") {
    Vector v(3);
    v << 0.1, -7.3, 1e-3;
    CHECK(batch_mean(std::vector<Vector>{v}) == v);
    CHECK(batch_mean(std::vector<Vector>{v, -v}).isZero(0.0));
    for (int n : {2, 3, 7, 288}) CHECK(batch_mean(std::vector<Vector>(n, v)) == v);
    CHECK_THROWS_AS(batch_mean(std::vector<Vector>{}), UsageError);
    CHECK_THROWS_AS(batch_mean(std::vector<Vector>{v, Vector::Zero(2)}), UsageError);
  }
}
