#include <random>

#include "doctest.h"
#include "dpt/errors.hpp"
#include "dpt/text.hpp"
#include "oracles.hpp"

using namespace dpt;

TEST_CASE("append_sentinel") {
  auto t = Text::from_raw("banana");
  CHECK(t.size() == 6);
  CHECK(t.at(7) == kSentinel);
  CHECK(t.at(1) == 'b');

  auto empty = Text::from_raw("");
  CHECK(empty.size() == 0);
  CHECK(empty.at(1) == kSentinel);

  CHECK_THROWS_AS(Text::from_raw(std::string("ab\0c", 4)), SentinelInInput);
}

TEST_CASE("suffix array examples") {
  CHECK(build_suffix_array(Text::from_raw("banana")) == SuffixArray{7, 6, 4, 2, 1, 5, 3});
  CHECK(build_suffix_array(Text::from_raw("aaa")) == SuffixArray{4, 3, 2, 1});
  CHECK(build_suffix_array(Text::from_raw("")) == SuffixArray{1});
}

TEST_CASE("lcp array examples") {
  auto t = Text::from_raw("banana");
  auto sa = build_suffix_array(t);
  CHECK(build_lcp_array(t, sa) == LcpArray{0, 0, 1, 3, 0, 0, 2});
  auto a = Text::from_raw("aaa");
  CHECK(build_lcp_array(a, build_suffix_array(a)) == LcpArray{0, 0, 1, 2});
}

TEST_CASE("lcp_pair") {
  auto t = Text::from_raw("banana");
  CHECK(lcp_pair(t, 2, 4) == 3);
  CHECK(lcp_pair(t, 1, 2) == 0);
  for (Position k = 1; k <= 7; ++k) CHECK(lcp_pair(t, k, k) == t.size() + 2 - k);
}

TEST_CASE("naive_occurrences") {
  auto t = Text::from_raw("banana");
  CHECK(naive_occurrences(t, "an") == std::vector<Position>{2, 4});
  CHECK(naive_occurrences(t, "x").empty());
  CHECK(naive_occurrences(t, "banana") == std::vector<Position>{1});
  CHECK_THROWS_AS(naive_occurrences(t, ""), EmptyPattern);
}

TEST_CASE("suffix and lcp arrays match the naive oracles on random texts") {
  std::mt19937_64 rng(7);
  for (unsigned sigma : {2U, 4U, 26U, 256U}) {
    for (int round = 0; round < 12; ++round) {
      std::uniform_int_distribution<std::size_t> len(0, 2000);
      auto t = Text::from_raw(oracle::random_body(rng, len(rng), sigma));
      auto sa = build_suffix_array(t);
      REQUIRE(sa == oracle::naive_suffix_sort(t));

      std::vector<bool> seen(sa.size() + 1, false);
      for (auto p : sa) {
        REQUIRE(p >= 1);
        REQUIRE(p <= sa.size());
        REQUIRE_FALSE(seen[p]);
        seen[p] = true;
      }

      auto lcp = build_lcp_array(t, sa);
      REQUIRE(lcp[0] == 0);
      for (std::size_t i = 1; i < sa.size(); ++i) {
        REQUIRE(lcp[i] == oracle::naive_lcp(t, sa[i - 1], sa[i]));
        REQUIRE(lcp[i] == lcp_pair(t, sa[i - 1], sa[i]));
        REQUIRE(lcp[i] <= std::min(t.suffix_length(sa[i - 1]), t.suffix_length(sa[i])));
      }
    }
  }
}

TEST_CASE("naive_occurrences agrees with the window oracle") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    auto body = oracle::random_body(rng, 300, 3);
    auto t = Text::from_raw(body);
    for (const auto& p : oracle::random_patterns(rng, body, 20, 6, 3)) {
      REQUIRE(naive_occurrences(t, p) == oracle::scan_occurrences(t, p));
    }
  }
}
