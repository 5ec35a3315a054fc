#include <random>

#include "doctest.h"
#include "dpt/dpt_index.hpp"
#include "dpt/errors.hpp"
#include "oracles.hpp"

using namespace dpt;

namespace {

constexpr TrieBacking kAllBackings[] = {TrieBacking::Pointer, TrieBacking::Louds, TrieBacking::Dfuds,
                                        TrieBacking::Bp};

DptIndex make(std::string_view raw, std::size_t c, Position pmax = 30, TrieBacking b = TrieBacking::Pointer,
              std::uint64_t s = 0) {
  BuildConfig cfg;
  cfg.pe_count = c;
  cfg.pmax = pmax;
  cfg.backing = b;
  cfg.label_batch = s;
  return DptIndex::build(Text::from_raw(raw), cfg);
}

std::uint64_t query_steps(DptIndex& idx, const std::function<QueryResult(DptIndex&)>& run, QueryResult* out) {
  auto before = idx.machine().ledger().supersteps();
  auto r = run(idx);
  if (out) *out = r;
  return idx.machine().ledger().supersteps() - before;
}

}  // namespace

TEST_CASE("banana queries") {
  auto idx = make("banana", 2);
  CHECK(idx.query_exists("an", 0).exists);
  CHECK(idx.query_count("an", 1).count == 2);
  CHECK(idx.query_count("na", 0).count == 2);
  CHECK(idx.query_count("x", 0).count == 0);
  CHECK(idx.query_enumerate("an", 0).positions == std::vector<Position>{2, 4});
  CHECK(idx.query_enumerate("banana", 1).positions == std::vector<Position>{1});
  CHECK(idx.query_enumerate("a", 1).positions == std::vector<Position>{2, 4, 6});

  QueryResult r;
  auto steps = query_steps(idx, [](DptIndex& i) { return i.query_exists("xyz", 0); }, &r);
  CHECK_FALSE(r.exists);
  CHECK(steps <= 2);
  CHECK(r.supersteps <= 2);
}

TEST_CASE("interval route answers at the arrival PE") {
  auto idx = make("aaaa", 2);
  QueryResult r;
  auto steps = query_steps(idx, [](DptIndex& i) { return i.query_exists("a", 1); }, &r);
  CHECK(r.exists);
  CHECK(steps == 1);
  CHECK(r.words == 0);
  CHECK(idx.query_enumerate("a", 0).positions == std::vector<Position>{1, 2, 3, 4});
  CHECK(idx.query_count("a", 0).count == 4);
}

TEST_CASE("counting formula with interior PEs") {
  // 24 a's over 5 PEs: "aa" prefixes every boundary except the sentinel's.
  std::string text(24, 'a');
  auto idx = make(text, 5);
  auto route = idx.global_trie(0).route("aa");
  REQUIRE(route.kind == RoutingResult::Kind::Interval);
  REQUIRE(route.last - route.first >= 2);
  auto occ = [&](PeId p) {
    std::uint64_t k = 0;
    for (auto q : idx.machine().pe(p).sa_block) k += q + 1 <= text.size() ? 1 : 0;
    return k;
  };
  std::uint64_t expected = occ(route.first) + occ(route.last);
  for (PeId p = route.first + 1; p < route.last; ++p) expected += idx.machine().block_length(p);
  auto r = idx.query_count("aa", 2);
  CHECK(r.count == expected);
  CHECK(r.count == 23);
}

TEST_CASE("superstep bounds per kind and per batch") {
  std::mt19937_64 rng(5);
  auto body = oracle::random_body(rng, 1500, 4);
  auto idx = make(body, 8);
  for (const auto& p : oracle::random_patterns(rng, body, 60, 12, 4)) {
    CHECK(query_steps(idx, [&](DptIndex& i) { return i.query_exists(p, rng() % 8); }, nullptr) <= 3);
    CHECK(query_steps(idx, [&](DptIndex& i) { return i.query_count(p, rng() % 8); }, nullptr) <= 4);
    CHECK(query_steps(idx, [&](DptIndex& i) { return i.query_enumerate(p, rng() % 8); }, nullptr) <= 4);
  }

  std::vector<Query> batch;
  for (const auto& p : oracle::random_patterns(rng, body, 100, 12, 4)) {
    batch.push_back({static_cast<QueryKind>(rng() % 3), p, static_cast<PeId>(rng() % 8)});
  }
  auto before = idx.machine().ledger().supersteps();
  auto results = idx.query_batch(batch);
  CHECK(idx.machine().ledger().supersteps() - before <= 4);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto single = batch[i].kind == QueryKind::Exists  ? idx.query_exists(batch[i].pattern, batch[i].arrival)
                  : batch[i].kind == QueryKind::Count ? idx.query_count(batch[i].pattern, batch[i].arrival)
                                                      : idx.query_enumerate(batch[i].pattern, batch[i].arrival);
    CHECK(results[i].exists == single.exists);
    CHECK(results[i].count == single.count);
    CHECK(results[i].positions == single.positions);
    CHECK(results[i].words == single.words);
  }
}

TEST_CASE("per-query errors do not abort a batch") {
  auto idx = make("mississippi", 3, 4);
  std::vector<Query> batch{{QueryKind::Count, "ssi", 0}, {QueryKind::Count, "ssissi", 1}, {QueryKind::Count, "", 2},
                           {QueryKind::Exists, "ppi", 7}, {QueryKind::Count, "i", 2}};
  auto r = idx.query_batch(batch);
  CHECK(r[0].count == 2);
  CHECK_FALSE(r[1].ok());
  CHECK(r[1].error->rfind("PatternTooLong", 0) == 0);
  CHECK(r[2].error->rfind("EmptyPattern", 0) == 0);
  CHECK_FALSE(r[3].ok());
  CHECK(r[4].count == 4);
  CHECK(idx.query_batch({}).empty());
}

TEST_CASE("oracle equivalence across backings and PE counts") {
  std::mt19937_64 rng(77);
  const std::size_t cs[] = {1, 2, 3, 8, 16};
  for (int round = 0; round < 40; ++round) {
    unsigned sigma = std::vector<unsigned>{2, 4, 26}[round % 3];
    auto body = oracle::random_body(rng, 1 + rng() % 800, sigma);
    auto text = Text::from_raw(body);
    std::size_t c = std::min<std::size_t>(cs[round % 5], text.size_with_sentinel());
    Position pmax = 4 + rng() % 12;
    auto patterns = oracle::random_patterns(rng, body, 30, pmax, sigma);
    std::vector<std::vector<QueryResult>> per_backing;
    for (auto b : kAllBackings) {
      auto idx = make(body, c, pmax, b);
      std::vector<Query> batch;
      for (std::size_t i = 0; i < patterns.size(); ++i) {
        for (auto k : {QueryKind::Exists, QueryKind::Count, QueryKind::Enumerate}) {
          batch.push_back({k, patterns[i], static_cast<PeId>((i * 7 + static_cast<int>(k)) % c)});
        }
      }
      auto results = idx.query_batch(batch);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        auto truth = oracle::scan_occurrences(text, batch[i].pattern);
        REQUIRE(results[i].ok());
        switch (batch[i].kind) {
          case QueryKind::Exists: REQUIRE(results[i].exists == !truth.empty()); break;
          case QueryKind::Count: REQUIRE(results[i].count == truth.size()); break;
          case QueryKind::Enumerate: REQUIRE(results[i].positions == truth); break;
        }
      }
      per_backing.push_back(results);
    }
    for (std::size_t b = 1; b < per_backing.size(); ++b) {
      for (std::size_t i = 0; i < per_backing[0].size(); ++i) {
        REQUIRE(per_backing[b][i].supersteps == per_backing[0][i].supersteps);
        REQUIRE(per_backing[b][i].words == per_backing[0][i].words);
      }
    }
  }
}

TEST_CASE("label batch size changes barriers, not the index") {
  std::mt19937_64 rng(12);
  auto body = oracle::random_body(rng, 300, 3);
  auto one = make(body, 4, 10, TrieBacking::Louds, 0);
  auto small = make(body, 4, 10, TrieBacking::Louds, 1);
  auto mid = make(body, 4, 10, TrieBacking::Louds, 16);
  for (PeId p = 0; p < 4; ++p) {
    CHECK(small.trie(p) == one.trie(p));
    CHECK(mid.trie(p) == one.trie(p));
    CHECK(small.global_trie(p) == one.global_trie(p));
  }
  CHECK(one.build_supersteps() == 1 + 3);
  CHECK(mid.build_supersteps() > one.build_supersteps());
  CHECK(small.build_supersteps() > mid.build_supersteps());
  // ceil(max edges / s) label supersteps plus three for the global trie.
  std::size_t max_edges = 0;
  for (PeId p = 0; p < 4; ++p) max_edges = std::max<std::size_t>(max_edges, one.trie(p).node_count() - 1);
  CHECK(small.build_supersteps() == max_edges + 3);
  CHECK(mid.build_supersteps() == (max_edges + 15) / 16 + 3);
}

TEST_CASE("replicated global tries are identical") {
  auto idx = make("abracadabra", 4, 5);
  for (PeId p = 1; p < 4; ++p) CHECK(idx.global_trie(p).serialize() == idx.global_trie(0).serialize());
  for (PeId p = 0; p < 4; ++p) CHECK(idx.trie(p).leaf_count() == idx.machine().block_length(p));
}

TEST_CASE("save and load answer identically") {
  std::mt19937_64 rng(3);
  for (auto b : kAllBackings) {
    auto body = oracle::random_body(rng, 500, 4);
    auto idx = make(body, 5, 8, b);
    auto bytes = idx.save();
    auto back = DptIndex::load(bytes);
    CHECK(back.save() == bytes);
    for (const auto& p : oracle::random_patterns(rng, body, 20, 8, 4)) {
      CHECK(back.query_enumerate(p, 1).positions == idx.query_enumerate(p, 1).positions);
      CHECK(back.query_count(p, 3).count == idx.query_count(p, 3).count);
    }
  }
  auto idx = make("banana", 2);
  auto bytes = idx.save();
  CHECK_THROWS_AS(DptIndex::load(bytes.substr(0, bytes.size() - 1)), FormatError);
  bytes[0] = 'X';
  CHECK_THROWS_AS(DptIndex::load(bytes), FormatError);
}

TEST_CASE("query histogram counts arrivals and forwards") {
  auto idx = make("mississippi", 3, 6);
  std::vector<Query> batch;
  for (int k = 0; k < 50; ++k) batch.push_back({QueryKind::Count, "ssi", static_cast<PeId>(k % 2)});
  auto before = idx.forwarded();
  auto results = idx.query_batch(batch);
  for (const auto& r : results) CHECK(r.count == 2);
  auto arrivals = idx.arrivals();
  CHECK(arrivals == std::vector<std::uint64_t>{25, 25, 0});
  auto after = idx.forwarded();
  std::uint64_t forwarded = 0;
  for (PeId p = 0; p < 3; ++p) forwarded += after[p] - before[p];
  auto route = idx.global_trie(0).route("ssi");
  CHECK(forwarded == 50 * (route.first == route.last ? 1 : 2));
}

TEST_CASE("builds and queries are deterministic, in parallel too") {
  std::mt19937_64 rng(21);
  auto body = oracle::random_body(rng, 2000, 4);
  std::vector<Query> batch;
  for (const auto& p : oracle::random_patterns(rng, body, 40, 10, 4)) batch.push_back({QueryKind::Enumerate, p, 3});
  auto run = [&](bool parallel) {
    BuildConfig cfg;
    cfg.pe_count = 6;
    cfg.pmax = 10;
    cfg.backing = TrieBacking::Dfuds;
    cfg.label_batch = 64;
    cfg.parallel = parallel;
    auto idx = DptIndex::build(Text::from_raw(body), cfg);
    idx.query_batch(batch);
    return std::make_pair(idx.machine().ledger().to_tsv(), idx.save());
  };
  auto a = run(false);
  CHECK(a == run(false));
  CHECK(a == run(true));
}
