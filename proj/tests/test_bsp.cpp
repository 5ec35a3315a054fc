#include <random>

#include "doctest.h"
#include "dpt/bsp.hpp"
#include "dpt/errors.hpp"
#include "oracles.hpp"

using namespace dpt;

namespace {

struct Fixture {
  Text text;
  SuffixArray sa;
  LcpArray lcp;
  explicit Fixture(std::string_view raw)
      : text(Text::from_raw(raw)), sa(build_suffix_array(text)), lcp(build_lcp_array(text, sa)) {}

  Machine machine(std::size_t c, Position padding = 3) const { return Machine::distribute(text, sa, lcp, c, padding); }
};

// Deterministic mixed traffic over a few supersteps.
Machine chatter(bool parallel, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Fixture f(oracle::random_body(rng, 300, 4));
  auto m = f.machine(5, 8);
  m.set_parallel(parallel);
  for (int step = 0; step < 4; ++step) {
    m.run_superstep("chatter", [&](PeContext& ctx) {
      std::mt19937_64 local(seed * 131 + step * 17 + ctx.id());
      for (int k = 0; k < 3; ++k) {
        PeId dst = local() % ctx.pe_count();
        ctx.send(dst, MessageKind::PartialResult, std::string(1 + local() % 30, 'x'), k);
      }
      PeId next = (ctx.id() + 1) % ctx.pe_count();
      ctx.drma_get(next, Region::Text, m.pe(next).text_begin, 1, 9);
      ctx.work(ctx.inbox().size());
    });
  }
  return m;
}

}  // namespace

TEST_CASE("a superstep that sends nothing has h = 0") {
  Fixture f("banana");
  auto m = f.machine(2);
  m.run_superstep("idle", [](PeContext& ctx) { ctx.work(ctx.id() + 1); });
  REQUIRE(m.ledger().supersteps() == 1);
  CHECK(m.ledger().entries()[0].h == 0);
  CHECK(m.ledger().entries()[0].w == 2);
}

TEST_CASE("all-to-one traffic is bounded by the receiver") {
  Fixture f("banana");
  auto m = f.machine(4);
  m.run_superstep("gather", [](PeContext& ctx) { ctx.send(0, MessageKind::PartialResult, "12345678"); });
  const auto& e = m.ledger().entries()[0];
  CHECK(e.h == 3);
  CHECK(e.p2p_words == 3);
  CHECK(e.messages == 4);
  // Delivery in source order.
  m.run_superstep("read", [](PeContext& ctx) {
    if (ctx.id() != 0) {
      CHECK(ctx.inbox().empty());
      return;
    }
    REQUIRE(ctx.inbox().size() == 4);
    for (PeId k = 0; k < 4; ++k) CHECK(ctx.inbox()[k].src == k);
  });
  CHECK(m.received_messages(0, MessageKind::PartialResult) == 4);
}

TEST_CASE("payload words round up") {
  Message m;
  m.payload = std::string(9, 'a');
  CHECK(m.payload_words() == 2);
  m.payload.clear();
  CHECK(m.payload_words() == 0);
}

TEST_CASE("messages to a missing PE are rejected") {
  Fixture f("banana");
  auto m = f.machine(2);
  CHECK_THROWS_AS(m.run_superstep("bad", [](PeContext& ctx) { ctx.send(2, MessageKind::PartialResult, "x"); }),
                  DeliveryToInvalidPe);
}

TEST_CASE("drma fetches: inside, into the padding, past the padding") {
  Fixture f("banana");
  auto m = f.machine(2, 3);  // blocks of 4 and 3
  REQUIRE(m.pe(1).text_begin == 5);
  std::string got, padded;
  std::uint64_t t1 = 0, t2 = 0;
  m.run_superstep("fetch", [&](PeContext& ctx) {
    if (ctx.id() != 0) return;
    t1 = ctx.drma_get(1, Region::Text, 5, 3);
    t2 = ctx.drma_get(0, Region::Text, 3, 5);  // 3..4 own, 5..7 padding
    CHECK_THROWS_AS(ctx.drma_get(0, Region::Text, 5, 4), FetchOutOfSlice);
    CHECK_THROWS_AS(ctx.drma_get(1, Region::Text, 9, 3), FetchOutOfSlice);
    CHECK_THROWS_AS(ctx.drma_get(1, Region::Text, 4, 1), FetchOutOfSlice);
  });
  const auto& e = m.ledger().entries()[0];
  CHECK(e.one_sided_words == 2 + 1);  // request plus 3-char reply; self-fetch is free
  m.run_superstep("read", [&](PeContext& ctx) {
    for (const auto& msg : ctx.inbox()) {
      CHECK(msg.kind == MessageKind::DrmaReply);
      if (msg.ticket == t1) got = msg.payload;
      if (msg.ticket == t2) padded = msg.payload;
    }
  });
  CHECK(got == "na" + std::string(1, '\0'));
  CHECK(padded == "nana" + std::string(1, '\0'));

  // Last PE pads with sentinels.
  CHECK(m.pe(1).text_slice == "na" + std::string(4, '\0'));
}

TEST_CASE("suffix-array fetches return the block entries") {
  Fixture f("banana");
  auto m = f.machine(2);
  std::vector<std::uint64_t> got;
  m.run_superstep("fetch", [&](PeContext& ctx) {
    if (ctx.id() == 0) ctx.drma_get(1, Region::SuffixArray, 5, 3);
  });
  m.run_superstep("read", [&](PeContext& ctx) {
    for (const auto& msg : ctx.inbox()) got = decode_words(msg.payload);
  });
  CHECK(got == std::vector<std::uint64_t>{1, 5, 3});
  CHECK(m.ledger().entries()[0].h == 3);
}

TEST_CASE("distribute: block lengths and reassembly") {
  Fixture f("banana");
  auto m = f.machine(2);
  CHECK(m.pe(0).block_len() == 4);
  CHECK(m.pe(1).block_len() == 3);
  CHECK(m.sa_owner(4) == 0);
  CHECK(m.sa_owner(5) == 1);
  CHECK(m.text_owner(7) == 1);

  auto one = f.machine(1);
  CHECK(one.pe(0).sa_block == f.sa);

  auto all = f.machine(7);
  for (PeId p = 0; p < 7; ++p) CHECK(all.pe(p).block_len() == 1);
  CHECK_THROWS_AS(f.machine(8), OutOfRange);

  auto explicit_split = Machine::distribute(f.text, f.sa, f.lcp, 2, 3, std::vector<Position>{3, 4});
  CHECK(explicit_split.pe(0).sa_block == SuffixArray{7, 6, 4});

  std::mt19937_64 rng(4);
  for (int round = 0; round < 30; ++round) {
    Fixture g(oracle::random_body(rng, rng() % 200, 3));
    std::size_t c = 1 + rng() % std::min<std::size_t>(16, g.sa.size());
    auto mc = g.machine(c, 5);
    SuffixArray sa;
    LcpArray lcp;
    std::string text;
    for (PeId p = 0; p < c; ++p) {
      const auto& s = mc.pe(p);
      REQUIRE(s.text_slice.size() == s.block_len() + 5);
      sa.insert(sa.end(), s.sa_block.begin(), s.sa_block.end());
      lcp.insert(lcp.end(), s.lcp_block.begin(), s.lcp_block.end());
      text += s.text_slice.substr(0, s.text_block_len);
    }
    REQUIRE(sa == g.sa);
    REQUIRE(lcp == g.lcp);
    REQUIRE(text == g.text.bytes());
  }
}

TEST_CASE("ledger TSV and totals") {
  Fixture f("banana");
  auto m = f.machine(2);
  m.run_superstep("a", [](PeContext& ctx) {
    ctx.work(5);
    if (ctx.id() == 0) ctx.send(1, MessageKind::LabelExchange, std::string(16, 'x'));
  });
  CHECK(m.ledger().to_tsv() == "superstep\tw\th\tmode_breakdown\n1\t5\t2\tone_sided=0;collective=2;p2p=0\n");
  CHECK(m.ledger().total_cost(3, 10) == doctest::Approx(5 + 2 * 3 + 10));
  CHECK(m.ledger().total_words() == 2);
}

TEST_CASE("runs are deterministic and parallel mode matches") {
  auto a = chatter(false, 42);
  auto b = chatter(false, 42);
  auto p = chatter(true, 42);
  CHECK(a.trace() == b.trace());
  CHECK(a.trace() == p.trace());
  CHECK(a.ledger().to_tsv() == p.ledger().to_tsv());
  CHECK(a.words_for_tag(9) == p.words_for_tag(9));
}

TEST_CASE("locality audit") {
  Fixture f("banana");
  auto m = f.machine(2);
  m.set_audit(true);
  CHECK_THROWS_AS(m.run_superstep("peek", [&](PeContext& ctx) { (void)m.pe(1 - ctx.id()); }), LocalityViolation);
  CHECK_NOTHROW(m.run_superstep("own", [&](PeContext& ctx) { (void)m.pe(ctx.id()); }));
  m.set_parallel(true);
  CHECK_THROWS_AS(m.run_superstep("peek", [&](PeContext& ctx) { (void)m.pe(1 - ctx.id()); }), LocalityViolation);
  CHECK_NOTHROW((void)m.pe(1));
}
