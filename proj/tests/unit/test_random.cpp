#include <doctest.h>

#include <set>

#include "netweave/random.hpp"

using namespace netweave;

TEST_CASE("stable_hash is 64-bit FNV-1a") {
  CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
  CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(stable_hash("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derive_seed separates salts and parents") {
  CHECK(derive_seed(1, "local") != derive_seed(1, "global"));
  CHECK(derive_seed(1, "local") != derive_seed(2, "local"));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("same seed, same stream") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("uniform and below stay in range") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto bound = 1 + rng.below(17);
    CHECK(rng.below(bound) < bound);
  }
}

TEST_CASE("below is close to uniform") {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[rng.below(6)];
  for (int c : counts) CHECK(std::abs(c - draws / 6) < 500);
}

TEST_CASE("weighted_index never picks zero weight") {
  Rng rng(5);
  const std::vector<double> w{0.0, 2.0, 0.0, 1.0};
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 3000; ++i) ++counts[rng.weighted_index(w)];
  CHECK(counts[0] == 0);
  CHECK(counts[2] == 0);
  CHECK(counts[1] > counts[3]);
}

TEST_CASE("sample_without_replacement gives k distinct values") {
  Rng rng(8);
  for (std::size_t n = 1; n < 30; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      const auto s = sample_without_replacement(n, k, rng);
      REQUIRE(s.size() == k);
      const std::set<std::size_t> distinct(s.begin(), s.end());
      CHECK(distinct.size() == k);
      for (auto v : s) CHECK(v < n);
    }
  }
}
