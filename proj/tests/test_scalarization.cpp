#include <cmath>
#include <random>

#include "doctest.h"
#include "morl/errors.hpp"
#include "morl/oracle.hpp"
#include "morl/scalarization.hpp"
#include "test_util.hpp"

using namespace morl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_SUITE("scalarization") {
  TEST_CASE("sqrt-treasure value and gradient at the origin") {
    const ScalarizationSpec s = sqrt_treasure(1.0);
    CHECK(scalarize(s, vec({0, 0})) == doctest::Approx(1.0 + std::sqrt(101.0)).epsilon(1e-15));
    CHECK(scalarize(s, vec({0, 0})) == doctest::Approx(11.049876).epsilon(1e-7));
    const Vector g = scalarize_grad(s, vec({0, 0}));
    CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(1.0 / (2.0 * std::sqrt(101.0))).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.0497519).epsilon(1e-6));
  }

  TEST_CASE("alpha-fairness value and gradient at zero") {
    const ScalarizationSpec s = alpha_fairness(100.0, 1.0);
    CHECK(scalarize(s, Vector::Zero(8)) == -800.0);
    const Vector g = scalarize_grad(s, Vector::Zero(8));
    for (int m = 0; m < 8; ++m) CHECK(g[m] == 100.0);
  }

  TEST_CASE("alpha-fairness is increasing with positive, decreasing gradient") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    const ScalarizationSpec s = alpha_fairness(50.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
      Vector a(3), b(3);
      for (int m = 0; m < 3; ++m) a[m] = u(gen);
      b = a;
      const int k = rep % 3;
      b[k] += 0.1 + u(gen);
      CHECK(scalarize(s, b) > scalarize(s, a));
      const Vector ga = scalarize_grad(s, a), gb = scalarize_grad(s, b);
      CHECK(ga[k] > 0.0);
      CHECK(gb[k] < ga[k]);
    }
  }

  TEST_CASE("gradients match central differences within 1e-7") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
      ScalarizationSpec s;
      Vector j;
      if (rep % 2 == 0) {
        s = sqrt_treasure(1.0);
        j = vec({23.7 * u(gen), -100.0 * u(gen)});
      } else {
        s = alpha_fairness(100.0, 1.0);
        j = Vector(4);
        for (int m = 0; m < 4; ++m) j[m] = 100.0 * u(gen);
      }
      const Vector fd = finite_diff_grad([&](const Vector& x) { return scalarize(s, x); }, j, 1e-4);
      const Vector g = scalarize_grad(s, j);
      CHECK((g - fd).norm() / g.norm() <= 1e-7);
    }
  }

  TEST_CASE("custom table is a weighted sum") {
    const ScalarizationSpec s = custom_table({2.0, -1.0, 0.5});
    CHECK(scalarize(s, vec({1, 2, 4})) == 2.0);
    CHECK(scalarize_grad(s, vec({7, 7, 7})) == vec({2.0, -1.0, 0.5}));
    CHECK_THROWS_AS(scalarize(s, vec({1, 2})), ConfigError);
  }

  TEST_CASE("domain errors signal a missing projection") {
    CHECK_THROWS_AS(scalarize(sqrt_treasure(1.0), vec({-2.0, 0.0})), DomainError);
    CHECK_THROWS_AS(scalarize(sqrt_treasure(1.0), vec({0.0, -101.0})), DomainError);
    CHECK_THROWS_AS(scalarize_grad(sqrt_treasure(1.0), vec({-1.0, 0.0})), DomainError);
    CHECK_THROWS_AS(scalarize(alpha_fairness(10.0, 1.0), vec({-1.0})), DomainError);
  }

  TEST_CASE("omega box examples") {
    const OmegaBox near = omega_box({{0, 1}, {0, 1}}, 0.5, 200);
    CHECK(near.lo == std::vector<double>{0.0, 0.0});
    CHECK(near.hi[0] == doctest::Approx(2.0).epsilon(1e-15));
    const OmegaBox dst = omega_box({{0, 23.7}, {-1, 0}}, 1.0, 100);
    CHECK(dst.lo[1] == -100.0);
    CHECK(dst.hi[1] == 0.0);
    CHECK(dst.hi[0] == doctest::Approx(2370.0));
    const OmegaBox flat = omega_box({{0, 0}}, 0.9, 10);
    CHECK(flat.lo[0] == 0.0);
    CHECK(flat.hi[0] == 0.0);
  }

  TEST_CASE("projection clamps, is idempotent and non-expansive") {
    const OmegaBox box = omega_box({{0, 1}, {0, 1}}, 0.5, 200);
    const Vector inside = vec({0.3, 1.9});
    CHECK(project_omega(inside, box) == inside);
    const Vector p = project_omega(vec({-0.3, 5.0}), box);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == box.hi[1]);
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 10000; ++rep) {
      const Vector x = test::gaussian_vector(gen, 2, 3.0), y = test::gaussian_vector(gen, 2, 3.0);
      const Vector px = project_omega(x, box);
      CHECK(project_omega(px, box) == px);
      CHECK((px - project_omega(y, box)).norm() <= (x - y).norm());
    }
  }

  TEST_CASE("default constants on the box") {
    const OmegaBox box = omega_box({{0, 1}, {0, 1}}, 0.5, 10);
    const ScalarizationSpec f = with_default_constants(alpha_fairness(10.0, 1.0), box);
    CHECK(f.grad_bound == 10.0);
    CHECK(f.grad_lipschitz == 20.0);
    const OmegaBox dst = omega_box({{0, 23.7}, {-1, 0}}, 1.0, 100);
    const ScalarizationSpec t = with_default_constants(sqrt_treasure(1.0), dst);
    CHECK(t.grad_bound == doctest::Approx(0.5));
    CHECK(t.grad_lipschitz == doctest::Approx(0.25));
    ScalarizationSpec preset = alpha_fairness(10.0, 1.0);
    preset.grad_bound = 3.0;
    CHECK(with_default_constants(preset, box).grad_bound == 3.0);
  }
}
