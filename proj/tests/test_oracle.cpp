#include <cmath>
#include <random>

#include "doctest.h"
#include "morl/errors.hpp"
#include "morl/oracle.hpp"
#include "test_util.hpp"

using namespace morl;

namespace {

Vector value_by_enumeration(const TabularMdp& mdp, const Vector& theta, int H) {
  return enumerate_expectation(mdp, theta, H,
                               [&](const Trajectory& tr) { return discounted_return(tr, mdp.gamma); });
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("checked-in corpus matches the generator") {
    const std::vector<CorpusEntry> file = load_corpus(MORL_CORPUS_PATH);
    const std::vector<CorpusEntry> gen = generate_corpus();
    REQUIRE(file.size() == gen.size());
    for (std::size_t i = 0; i < gen.size(); ++i) {
      CHECK(file[i].seed == gen[i].seed);
      CHECK(file[i].horizon == gen[i].horizon);
      CHECK(file[i].mdp.gamma == gen[i].mdp.gamma);
      CHECK(file[i].mdp.transition == gen[i].mdp.transition);
      CHECK(file[i].mdp.reward == gen[i].mdp.reward);
      CHECK(file[i].mdp.initial == gen[i].mdp.initial);
      CHECK_NOTHROW(file[i].mdp.validate());
    }
  }

  TEST_CASE("corpus round-trips through a file") {
    test::TempDir dir("corpus");
    const auto gen = generate_corpus();
    save_corpus(gen, dir.path() / "c.json");
    const auto back = load_corpus(dir.path() / "c.json");
    REQUIRE(back.size() == gen.size());
    CHECK(back.back().mdp.reward == gen.back().mdp.reward);
    CHECK_THROWS_AS(load_corpus(dir.path() / "missing.json"), IoError);
  }

  TEST_CASE("dynamic programming agrees with enumeration") {
    std::mt19937_64 gen(1);
    for (const CorpusEntry& e : generate_corpus()) {
      const Vector theta = test::gaussian_vector(gen, e.mdp.num_params());
      for (int H = 1; H <= 4; ++H) {
        const Vector dp = exact_truncated_value(e.mdp, theta, H);
        const Vector en = value_by_enumeration(e.mdp, theta, H);
        CHECK((dp - en).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("single-state values by hand") {
    const TabularMdp one = test::single_state_mdp(1, 2, {1.0, 0.5}, 0.3);
    const Vector v1 = exact_truncated_value(one, Vector::Zero(1), 1);
    CHECK(v1[0] == 1.0);
    CHECK(v1[1] == 0.5);
    const TabularMdp geo = test::single_state_mdp(1, 1, {1.0}, 0.5);
    CHECK(exact_truncated_value(geo, Vector::Zero(1), 3)[0] == doctest::Approx(1.75).epsilon(1e-15));
    // Two actions, uniform policy: the mean reward per step.
    const TabularMdp two = test::single_state_mdp(2, 1, {1.0, 0.0}, 1.0);
    CHECK(exact_truncated_value(two, Vector::Zero(2), 4)[0] == doctest::Approx(2.0));
  }

  TEST_CASE("enumerated probabilities sum to one") {
    std::mt19937_64 gen(2);
    for (const CorpusEntry& e : generate_corpus()) {
      const Vector theta = test::gaussian_vector(gen, e.mdp.num_params(), 2.0);
      const Vector total = enumerate_expectation(e.mdp, theta, e.horizon,
                                                 [](const Trajectory&) { return Vector::Ones(1).eval(); });
      CHECK(total[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("jacobian matches central differences") {
    std::mt19937_64 gen(3);
    const auto corpus = generate_corpus();
    for (std::size_t i = 0; i < corpus.size(); i += 2) {
      const CorpusEntry& e = corpus[i];
      const Vector theta = test::gaussian_vector(gen, e.mdp.num_params());
      const Eigen::MatrixXd jac = exact_value_jacobian(e.mdp, theta, e.horizon);
      REQUIRE(jac.rows() == e.mdp.num_params());
      REQUIRE(jac.cols() == e.mdp.num_objectives);
      for (int m = 0; m < e.mdp.num_objectives; ++m) {
        const Vector fd = finite_diff_grad(
            [&](const Vector& t) { return exact_truncated_value(e.mdp, t, e.horizon)[m]; }, theta, 1e-5);
        CHECK((fd - jac.col(m)).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
  }

  TEST_CASE("tabular softmax is invariant to per-state logit shifts") {
    std::mt19937_64 gen(4);
    const TabularMdp mdp = random_tabular_mdp(3, 3, 2, 44);
    const Vector theta = test::gaussian_vector(gen, mdp.num_params());
    Vector shifted = theta;
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 3; ++a) shifted[s * 3 + a] += 1.5 * (s + 1);
    CHECK((exact_truncated_value(mdp, theta, 5) - exact_truncated_value(mdp, shifted, 5))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    // The gradient is orthogonal to the shift directions.
    const Eigen::MatrixXd jac = exact_value_jacobian(mdp, theta, 5);
    for (int s = 0; s < 3; ++s) {
      Vector dir = Vector::Zero(9);
      dir.segment(s * 3, 3).setOnes();
      CHECK((jac.transpose() * dir).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("truncation error is bounded by the discounted tail") {
    const TabularMdp mdp = random_tabular_mdp(3, 2, 2, 45);
    const Vector theta = Vector::Zero(mdp.num_params());
    const double g = mdp.gamma;
    const Vector far = exact_truncated_value(mdp, theta, 2000);
    for (int H : {1, 2, 5, 10, 30}) {
      const Vector near = exact_truncated_value(mdp, theta, H);
      const double tail = std::pow(g, H) / (1.0 - g);
      CHECK(((far - near).array() >= -1e-12).all());
      CHECK((far - near).maxCoeff() <= tail + 1e-12);
    }
  }

  TEST_CASE("scalarized gradient chains the jacobian") {
    const TabularMdp mdp = random_tabular_mdp(2, 3, 2, 46);
    std::mt19937_64 gen(5);
    const Vector theta = test::gaussian_vector(gen, mdp.num_params());
    const ScalarizationSpec spec = alpha_fairness(3.0, 1.0);
    const Vector g = exact_scalarized_gradient(mdp, theta, 3, spec);
    const Vector fd = finite_diff_grad(
        [&](const Vector& t) { return scalarize(spec, exact_truncated_value(mdp, t, 3)); }, theta, 1e-5);
    CHECK((g - fd).cwiseAbs().maxCoeff() <= 1e-7);
  }

  TEST_CASE("enumeration budget") {
    const TabularMdp mdp = random_tabular_mdp(3, 3, 1, 47);
    const Vector theta = Vector::Zero(9);
    auto fn = [&](const Trajectory& tr) { return discounted_return(tr, mdp.gamma); };
    CHECK_THROWS_AS(enumerate_expectation(mdp, theta, 4, fn, 1000), BudgetExceededError);
    CHECK_NOTHROW(enumerate_expectation(mdp, theta, 3, fn, 1000));
  }

  TEST_CASE("central differences") {
    Vector x(2);
    x << 1.0, -2.0;
    const Vector g = finite_diff_grad([](const Vector& v) { return v[0] * v[0] + 3.0 * v[1]; }, x, 1e-3);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(finite_diff_grad([](const Vector&) { return 0.0; }, x, 0.0), UsageError);
  }

  TEST_CASE("malformed tables are rejected") {
    TabularMdp mdp = random_tabular_mdp(2, 2, 1, 48);
    mdp.initial = {0.7, 0.7};
    CHECK_THROWS_AS(mdp.validate(), ConfigError);
    mdp = random_tabular_mdp(2, 2, 1, 48);
    mdp.reward.pop_back();
    CHECK_THROWS_AS(mdp.validate(), ConfigError);
    mdp = random_tabular_mdp(2, 2, 1, 48);
    CHECK_THROWS_AS(exact_truncated_value(mdp, Vector::Zero(3), 2), ConfigError);
  }
}
