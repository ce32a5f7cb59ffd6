#include "doctest.h"

#include <cmath>
#include <set>

#include "distgen/rng.hpp"

using namespace distgen;

TEST_CASE("child_seed is stable and label-separated") {
  CHECK(child_seed(42, "a", 0) == child_seed(42, "a", 0));
  CHECK(child_seed(42, "a", 0) != child_seed(42, "a", 1));
  CHECK(child_seed(42, "a", 0) != child_seed(42, "b", 0));
  CHECK(child_seed(42, "a", 0) != child_seed(43, "a", 0));
}

TEST_CASE("uniform stays in [0,1) and is deterministic") {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
}

TEST_CASE("gaussian moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("sample_without_replacement returns distinct in-range indices") {
  Rng rng(5);
  const auto idx = rng.sample_without_replacement(100, 40);
  REQUIRE(idx.size() == 40);
  std::set<int> seen(idx.begin(), idx.end());
  CHECK(seen.size() == 40);
  CHECK(*seen.begin() >= 0);
  CHECK(*seen.rbegin() < 100);

  // Full draw is a permutation.
  Rng rng2(6);
  const auto perm = rng2.sample_without_replacement(50, 50);
  CHECK(std::set<int>(perm.begin(), perm.end()).size() == 50);
}
