#include <cmath>
#include <set>

#include "doctest.h"
#include "morl/errors.hpp"
#include "morl/rng.hpp"

using namespace morl;

TEST_SUITE("rng") {
  TEST_CASE("equal keys give identical streams") {
    RngStream a(StreamKey{7, 3, 2, 11});
    RngStream b(StreamKey{7, 3, 2, 11});
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  }

  TEST_CASE("each key component changes the stream") {
    const StreamKey base{7, 3, 2, 11};
    std::set<std::uint64_t> seeds = {derive_seed(base)};
    seeds.insert(derive_seed(StreamKey{8, 3, 2, 11}));
    seeds.insert(derive_seed(StreamKey{7, 4, 2, 11}));
    seeds.insert(derive_seed(StreamKey{7, 3, 3, 11}));
    seeds.insert(derive_seed(StreamKey{7, 3, 2, 12}));
    CHECK(seeds.size() == 5);
  }

  TEST_CASE("batch keys separate the return and gradient batches") {
    CHECK(batch_key(1, 2, 3, 0, 4) == StreamKey{1, 2, 6, 4});
    CHECK(batch_key(1, 2, 3, 1, 4) == StreamKey{1, 2, 7, 4});
    CHECK(derive_seed(batch_key(1, 2, 3, 0, 4)) != derive_seed(batch_key(1, 2, 3, 1, 4)));
  }

  TEST_CASE("uniform draws stay in [0, 1)") {
    RngStream r(123);
    for (int i = 0; i < 10000; ++i) {
      const double u = r.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("poisson mean within 3 standard errors") {
    RngStream r(StreamKey{5, 0, 0, 0});
    const double lambda = 0.2;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(r.poisson(lambda));
    const double se = std::sqrt(lambda / n);
    CHECK(std::abs(sum / n - lambda) <= 3.0 * se);
  }

  TEST_CASE("poisson with mean zero is zero and negative means are rejected") {
    RngStream r(1);
    CHECK(r.poisson(0.0) == 0);
    CHECK_THROWS_AS(r.poisson(-1.0), UsageError);
  }
}
