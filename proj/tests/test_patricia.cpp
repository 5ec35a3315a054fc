#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "dpt/errors.hpp"
#include "dpt/patricia.hpp"
#include "oracles.hpp"

using namespace dpt;

namespace {

constexpr TrieBacking kAllBackings[] = {TrieBacking::Pointer, TrieBacking::Louds, TrieBacking::Dfuds,
                                        TrieBacking::Bp};

struct Fixture {
  Text text;
  SuffixArray sa;
  LcpArray lcp;
  explicit Fixture(std::string_view raw)
      : text(Text::from_raw(raw)), sa(build_suffix_array(text)), lcp(build_lcp_array(text, sa)) {}

  PatriciaTrie trie(TrieBacking backing = TrieBacking::Pointer) const {
    LocalCharProvider chars(text);
    return build_patricia(sa, lcp, text.size_with_sentinel(), chars, backing);
  }
};

// Children of the pointer-backed root as (first char, string depth).
std::vector<std::pair<int, Position>> root_edges(const PatriciaTrie& t) {
  std::vector<std::pair<int, Position>> out;
  for (std::uint64_t i = 1; i <= t.outdegree(t.root()); ++i) {
    auto c = t.child(t.root(), i);
    out.emplace_back(t.first_char(c), t.string_depth(c));
  }
  return out;
}

// Occurrences the trie reports for p: leaf range SA values, kept only when
// the witness verifies against the text.
std::vector<Position> trie_occurrences(const PatriciaTrie& trie, const Text& text, std::string_view p) {
  auto res = blind_search(trie, p);
  if (!res.matched()) return {};
  if (!verify_occurrence(p, text.substr(res.witness, p.size()))) return {};
  std::vector<Position> out(trie.sa().begin() + res.first_rank, trie.sa().begin() + res.last_rank + 1);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("banana trie shape") {
  Fixture f("banana");
  auto t = f.trie();
  // Root edges: sentinel leaf, 'a' node at depth 1, "banana" leaf, 'n' node at depth 2.
  auto edges = root_edges(t);
  REQUIRE(edges.size() == 4);
  CHECK(edges[0] == std::pair<int, Position>{0, 1});
  CHECK(edges[1] == std::pair<int, Position>{'a', 1});
  CHECK(edges[2] == std::pair<int, Position>{'b', 7});
  CHECK(edges[3] == std::pair<int, Position>{'n', 2});

  auto a_node = t.child(t.root(), 2);
  REQUIRE(t.outdegree(a_node) == 2);
  auto ana_node = t.child(a_node, 2);
  CHECK(t.string_depth(ana_node) == 3);
  CHECK(t.node_count() == 11);
  CHECK(t.leaf_count() == 7);

  // Leaves left to right carry the SA order.
  std::vector<Position> leaves;
  std::function<void(std::uint64_t)> walk = [&](std::uint64_t v) {
    if (t.is_leaf(v)) {
      leaves.push_back(t.sa()[t.leaf_rank(v)]);
      return;
    }
    for (std::uint64_t i = 1; i <= t.outdegree(v); ++i) walk(t.child(v, i));
  };
  walk(t.root());
  CHECK(leaves == std::vector<Position>(f.sa.begin(), f.sa.end()));
}

TEST_CASE("single-suffix block is a leaf under the root") {
  Fixture f("");
  auto t = f.trie();
  CHECK(t.node_count() == 2);
  CHECK(t.outdegree(t.root()) == 1);
  CHECK(t.is_leaf(t.child(t.root(), 1)));
}

TEST_CASE("aaa gives a unary spine") {
  Fixture f("aaa");
  auto t = f.trie();
  std::vector<Position> depths;
  auto v = t.root();
  while (!t.is_leaf(v)) {
    depths.push_back(t.string_depth(v));
    v = t.child(v, t.outdegree(v));
  }
  CHECK(depths == std::vector<Position>{0, 1, 2});
}

TEST_CASE("blind search examples") {
  Fixture f("banana");
  auto t = f.trie();
  auto nan = blind_search(t, "nan");
  REQUIRE(nan.matched());
  CHECK(nan.witness == 3);
  CHECK(leaf_range_count(nan) == 1);
  CHECK(t.sa()[nan.first_rank] == 3);

  CHECK_FALSE(blind_search(t, "z").matched());

  auto ana = blind_search(t, "ana");
  REQUIRE(ana.matched());
  CHECK(leaf_range_count(ana) == 2);
  std::set<Position> got{t.sa()[ana.first_rank], t.sa()[ana.last_rank]};
  CHECK(got == std::set<Position>{2, 4});
}

TEST_CASE("verify_occurrence and blind-search false positives") {
  CHECK(verify_occurrence("nan", "nan"));
  CHECK_FALSE(verify_occurrence("nan", "nab"));
  CHECK_FALSE(verify_occurrence("nan", "na"));

  Fixture f("banana");
  auto t = f.trie();
  // Branching characters a (depth 0) and n (depth 1) match, the text does not.
  auto res = blind_search(t, "anb");
  REQUIRE(res.matched());
  CHECK_FALSE(verify_occurrence("anb", f.text.substr(res.witness, 3)));
}

TEST_CASE("leaf_range_count arithmetic") {
  BlindSearchResult r;
  r.outcome = BlindSearchResult::Outcome::Matched;
  r.first_rank = 2;
  r.last_rank = 4;
  CHECK(leaf_range_count(r) == 3);
  r.last_rank = 2;
  CHECK(leaf_range_count(r) == 1);

  Fixture f("mississippi");
  auto t = f.trie();
  BlindSearchResult all;
  all.first_rank = t.leaf_rank(t.leftmost_leaf(t.root()));
  all.last_rank = t.leaf_rank(t.rightmost_leaf(t.root()));
  CHECK(leaf_range_count(all) == t.leaf_count());
}

TEST_CASE("malformed lcp input is rejected") {
  Fixture f("banana");
  LocalCharProvider chars(f.text);
  auto bad = f.lcp;
  bad[1] = 5;  // lcp of "$" and "a$" cannot be 5
  CHECK_THROWS_AS(build_patricia(f.sa, bad, f.text.size_with_sentinel(), chars), MalformedLcp);

  // Claims a longer match than the text has: siblings collide on a character.
  auto collide = f.lcp;
  collide[4] = 1;  // banana vs anana really share 0 chars
  CHECK_THROWS_AS(build_patricia(f.sa, collide, f.text.size_with_sentinel(), chars), MalformedLcp);

  std::vector<Position> short_lcp(f.sa.size() - 1, 0);
  CHECK_THROWS_AS(build_patricia(f.sa, short_lcp, f.text.size_with_sentinel(), chars), MalformedLcp);
}

TEST_CASE("streaming DFUDS equals the two-phase route") {
  Fixture f("banana");
  LocalCharProvider chars(f.text);
  auto streamed = build_patricia_dfuds_streaming(f.sa, f.lcp, f.text.size_with_sentinel(), chars);
  auto two_phase = f.trie(TrieBacking::Dfuds);
  CHECK(streamed == two_phase);
  auto skeleton = scan_patricia(f.sa, f.lcp, f.text.size_with_sentinel());
  CHECK(streamed.succinct()->bits() == SuccinctTree::encode(skeleton.tree, TreeEncoding::Dfuds).bits());

  Fixture single("");
  LocalCharProvider c2(single.text);
  auto s = build_patricia_dfuds_streaming(single.sa, single.lcp, single.text.size_with_sentinel(), c2);
  CHECK(s == single.trie(TrieBacking::Dfuds));
  CHECK(s.succinct()->bits().size() == 4);
}

TEST_CASE("random blocks: construction bounds, backings and oracle equivalence") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 120; ++round) {
    unsigned sigma = std::vector<unsigned>{2, 4, 26}[round % 3];
    auto body = oracle::random_body(rng, 1 + rng() % 400, sigma);
    Fixture f(body);
    // Random block of the SA.
    std::size_t m = f.sa.size();
    std::size_t start = rng() % m;
    std::size_t len = 1 + rng() % (m - start);
    std::span<const Position> sa_block(f.sa.data() + start, len);
    std::span<const Position> lcp_block(f.lcp.data() + start, len);

    auto skeleton = scan_patricia(sa_block, lcp_block, f.text.size_with_sentinel());
    REQUIRE(skeleton.edge_positions().size() < 2 * len);
    REQUIRE(skeleton.pushes == skeleton.pops);
    // Stack depth never exceeds the number of internal nodes on a root-leaf path.
    std::uint64_t height = 0;
    {
      std::vector<std::pair<NodeId, std::uint64_t>> todo{{0, 1}};
      while (!todo.empty()) {
        auto [v, h] = todo.back();
        todo.pop_back();
        if (skeleton.tree.outdegree(v) == 0) continue;
        height = std::max(height, h);
        for (auto c : skeleton.tree.children(v)) todo.emplace_back(c, h + 1);
      }
    }
    REQUIRE(skeleton.max_stack <= height);
    for (std::size_t v = 1; v < skeleton.node_count(); ++v) {
      // parent depth < child depth
      for (auto c : skeleton.tree.children(v)) REQUIRE(skeleton.depth[v] < skeleton.depth[c]);
    }

    LocalCharProvider chars(f.text);
    std::vector<PatriciaTrie> tries;
    for (auto b : kAllBackings) tries.push_back(build_patricia(sa_block, lcp_block, f.text.size_with_sentinel(), chars, b));
    REQUIRE(chars.requested() == 4 * skeleton.edge_positions().size());

    LocalCharProvider chars2(f.text);
    auto streamed = build_patricia_dfuds_streaming(sa_block, lcp_block, f.text.size_with_sentinel(), chars2);
    REQUIRE(streamed == tries[2]);

    std::set<Position> in_block(sa_block.begin(), sa_block.end());
    for (const auto& p : oracle::random_patterns(rng, body, 30, 6, sigma)) {
      std::vector<Position> expected;
      for (auto pos : oracle::scan_occurrences(f.text, p)) {
        if (in_block.count(pos)) expected.push_back(pos);
      }
      auto reference = blind_search(tries[0], p);
      for (std::size_t b = 0; b < tries.size(); ++b) {
        REQUIRE(trie_occurrences(tries[b], f.text, p) == expected);
        auto res = blind_search(tries[b], p);
        REQUIRE(res.outcome == reference.outcome);
        if (res.matched()) {
          REQUIRE(res.first_rank == reference.first_rank);
          REQUIRE(res.last_rank == reference.last_rank);
          REQUIRE(res.witness == reference.witness);
        }
      }
    }
  }
}

TEST_CASE("trie records survive save/load") {
  Fixture f("abracadabra");
  for (auto b : kAllBackings) {
    auto t = f.trie(b);
    ByteWriter w;
    t.save(w);
    ByteReader r(w.str());
    auto back = PatriciaTrie::load(r);
    CHECK(back == t);
    CHECK(r.remaining() == 0);
  }
}

TEST_CASE("space report: succinct backings are far smaller than pointer") {
  std::mt19937_64 rng(1);
  Fixture f(oracle::random_body(rng, 20000, 26));
  auto pointer = f.trie(TrieBacking::Pointer).space(40);
  auto louds = f.trie(TrieBacking::Louds).space(40);
  CHECK(louds.sa_bits == pointer.sa_bits);
  CHECK(2 * louds.total() < pointer.total());
}
