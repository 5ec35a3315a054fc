#include "dpt/dsa.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

constexpr std::uint64_t kMaxSupersteps = 1000;

struct Segment {
  PeId owner;
  Position from;
  Position len;
};

// Splits T[from .. from+len-1] at text block boundaries.
std::vector<Segment> split_by_owner(const Machine& m, Position from, Position len) {
  std::vector<Segment> out;
  while (len > 0) {
    PeId o = m.text_owner(from);
    Position end = m.block_start(o) + m.block_length(o);
    Position take = std::min(len, end - from);
    out.push_back({o, from, take});
    from += take;
    len -= take;
  }
  return out;
}

// Unsigned byte comparison of a against b over their common length; the
// shorter string is smaller when one is a prefix of the other.
int compare_bytes(std::string_view a, std::string_view b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    auto x = static_cast<std::uint8_t>(a[i]), y = static_cast<std::uint8_t>(b[i]);
    if (x != y) return x < y ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

// One binary search: first SA index whose suffix is >= p (lower) or > p
// (upper), comparing suffixes truncated to |p|.
struct Search {
  enum class Phase : std::uint8_t { Probe, Text, Done };
  bool upper = false;
  int level = 0;  // 0: over block starts, 1: inside one block
  Position lo = 0, hi = 0;
  Position mid = 0;
  Phase phase = Phase::Probe;
  std::uint32_t outstanding = 0;
  Position sa_value = 0;
  std::string pruned;
  std::vector<std::string> segments;
  Position result = 0;
};

struct Pending {
  std::size_t query;
  int side;
  int what;  // 0: SA value, 1: pruned entry, 2 + k: text segment k
};

}  // namespace

DsaIndex DsaIndex::build(const Text& text, const DsaConfig& config) {
  auto sa = build_suffix_array(text);
  auto lcp = build_lcp_array(text, sa);
  return build(text, sa, lcp, config);
}

DsaIndex DsaIndex::build(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                         const DsaConfig& config) {
  DsaIndex idx;
  idx.prune_len_ = config.prune_len;
  idx.machine_ = Machine::distribute(text, sa, lcp, config.pe_count, 0);
  auto& m = idx.machine_;
  m.set_parallel(config.parallel);
  const Position ell = config.prune_len;
  const Position last = text.size_with_sentinel();
  if (ell == 0) return idx;

  const std::size_t c = m.size();
  // Per PE: (entry, offset inside the entry) for each issued fetch, by ticket.
  std::vector<std::vector<std::pair<Position, Position>>> issued(c);
  m.run_superstep("pruned store", [&](PeContext& ctx) {
    const auto& s = ctx.state();
    for (Position k = 0; k < s.block_len(); ++k) {
      Position q = s.sa_block[k];
      Position len = std::min(ell, last + 1 - q);
      Position offset = 0;
      for (const auto& seg : split_by_owner(m, q, len)) {
        ctx.drma_get(seg.owner, Region::Text, seg.from, seg.len);
        issued[ctx.id()].emplace_back(k, offset);
        offset += seg.len;
      }
    }
    ctx.work(s.block_len());
  });
  for (PeId p = 0; p < c; ++p) {
    auto& s = m.pe(p);
    s.prune_len = ell;
    s.pruned.assign(s.block_len() * ell, static_cast<char>(kSentinel));
    for (const auto& msg : m.drain(p)) {
      auto [entry, offset] = issued[p].at(msg.ticket - 1);
      s.pruned.replace(entry * ell + offset, msg.payload.size(), msg.payload);
    }
  }
  idx.build_supersteps_ = m.ledger().supersteps();
  return idx;
}

DsaResult DsaIndex::count(std::string_view pattern, PeId arrival) {
  std::pair<std::string, PeId> q{std::string(pattern), arrival};
  return count_batch(std::span<const std::pair<std::string, PeId>>(&q, 1)).front();
}

std::vector<DsaResult> DsaIndex::count_batch(std::span<const std::pair<std::string, PeId>> queries) {
  auto& m = machine_;
  const std::size_t c = m.size();
  const Position last = m.text_size() + 1;
  const Position ell = prune_len_;
  for (const auto& [p, arrival] : queries) {
    if (p.empty()) throw EmptyPattern("dsa count");
    if (arrival >= c) throw DeliveryToInvalidPe("arrival pe " + std::to_string(arrival));
  }

  std::vector<DsaResult> results(queries.size());
  std::vector<std::array<Search, 2>> searches(queries.size());
  std::vector<std::uint64_t> tags(queries.size());
  std::vector<std::vector<std::size_t>> arriving(c);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    tags[i] = next_tag_++;
    arriving[queries[i].second].push_back(i);
    searches[i][1].upper = true;
  }
  std::vector<std::vector<Pending>> prev(c), cur(c);
  std::uint64_t step = 0;

  auto block_end = [&](Position k) { return k == c ? last + 1 : m.block_start(static_cast<PeId>(k)); };

  auto issue = [&](PeContext& ctx, std::size_t i, int side, PeId target, Region region, Position offset, Position len,
                   int what) {
    auto ticket = ctx.drma_get(target, region, offset, len, tags[i]);
    cur[ctx.id()].push_back({i, side, what});
    if (ticket != cur[ctx.id()].size()) throw std::logic_error("ticket order");
  };

  // Starts the next probe, or finishes the search.
  auto next_probe = [&](PeContext& ctx, std::size_t i, int side) {
    auto& s = searches[i][side];
    if (s.level == 0 && s.lo >= s.hi) {
      Position k = s.lo;
      if (k == 0) {
        s.result = 1;
        s.phase = Search::Phase::Done;
        return;
      }
      s.level = 1;
      s.lo = m.block_start(static_cast<PeId>(k - 1)) + 1;
      s.hi = block_end(k);
    }
    if (s.level == 1 && s.lo >= s.hi) {
      s.result = s.lo;
      s.phase = Search::Phase::Done;
      return;
    }
    s.mid = (s.lo + s.hi) / 2;
    Position index = s.level == 0 ? m.block_start(static_cast<PeId>(s.mid)) : s.mid;
    PeId owner = m.sa_owner(index);
    s.phase = Search::Phase::Probe;
    s.outstanding = ell > 0 ? 2 : 1;
    s.pruned.clear();
    issue(ctx, i, side, owner, Region::SuffixArray, index, 1, 0);
    if (ell > 0) issue(ctx, i, side, owner, Region::Pruned, index, 1, 1);
  };

  auto decide = [&](PeContext& ctx, std::size_t i, int side, int cmp) {
    auto& s = searches[i][side];
    bool pred = s.upper ? cmp > 0 : cmp >= 0;
    if (pred) {
      s.hi = s.mid;
    } else {
      s.lo = s.mid + 1;
    }
    next_probe(ctx, i, side);
  };

  // All replies for the current phase of a search are in.
  auto advance = [&](PeContext& ctx, std::size_t i, int side) {
    auto& s = searches[i][side];
    const auto& p = queries[i].first;
    auto& stats = results[i].stats;
    if (s.phase == Search::Phase::Probe) {
      ++stats.probes;
      Position known = std::min<Position>(ell, p.size());
      int cmp = compare_bytes(std::string_view(s.pruned).substr(0, known), std::string_view(p).substr(0, known));
      ctx.work(known + 1);
      if (cmp != 0 || ell >= p.size()) {
        decide(ctx, i, side, cmp);
        return;
      }
      Position from = s.sa_value + ell;
      Position len = from > last ? 0 : std::min<Position>(p.size() - ell, last + 1 - from);
      if (len == 0) {
        decide(ctx, i, side, -1);
        return;
      }
      auto segs = split_by_owner(m, from, len);
      s.segments.assign(segs.size(), {});
      s.outstanding = segs.size();
      s.phase = Search::Phase::Text;
      for (std::size_t k = 0; k < segs.size(); ++k) {
        ++stats.text_fetches;
        if (segs[k].owner != ctx.id()) stats.remote_chars += segs[k].len;
        issue(ctx, i, side, segs[k].owner, Region::Text, segs[k].from, segs[k].len, 2 + static_cast<int>(k));
      }
      return;
    }
    std::string fetched;
    for (const auto& seg : s.segments) fetched += seg;
    ctx.work(fetched.size() + 1);
    decide(ctx, i, side, compare_bytes(fetched, std::string_view(p).substr(ell)));
  };

  auto compute = [&](PeContext& ctx) {
    const PeId pe = ctx.id();
    if (step == 1) {
      for (auto i : arriving[pe]) {
        for (int side = 0; side < 2; ++side) {
          auto& s = searches[i][side];
          s.level = 0;
          s.lo = 0;
          s.hi = c;
          next_probe(ctx, i, side);
        }
      }
    }
    for (const auto& msg : ctx.inbox()) {
      if (msg.kind != MessageKind::DrmaReply) throw std::logic_error("unexpected message in a search superstep");
      const auto pend = prev[pe].at(msg.ticket - 1);
      auto& s = searches[pend.query][pend.side];
      if (pend.what == 0) {
        s.sa_value = decode_words(msg.payload).at(0);
      } else if (pend.what == 1) {
        s.pruned = msg.payload;
      } else {
        s.segments.at(pend.what - 2) = msg.payload;
      }
      if (--s.outstanding == 0) advance(ctx, pend.query, pend.side);
    }
    for (auto i : arriving[pe]) {
      auto& st = results[i].stats;
      if (st.supersteps == 0 && searches[i][0].phase == Search::Phase::Done &&
          searches[i][1].phase == Search::Phase::Done) {
        st.supersteps = step;
        results[i].count = searches[i][1].result - searches[i][0].result;
      }
    }
  };

  auto pending = [&] {
    return std::any_of(results.begin(), results.end(), [](const DsaResult& r) { return r.stats.supersteps == 0; });
  };
  while (pending()) {
    if (++step > kMaxSupersteps) throw std::logic_error("binary search did not finish");
    m.run_superstep("dsa search", compute);
    prev.swap(cur);
    for (auto& v : cur) v.clear();
  }
  for (std::size_t i = 0; i < queries.size(); ++i) results[i].stats.words = m.words_for_tag(tags[i]);
  return results;
}

std::uint64_t DsaIndex::space_bits(unsigned position_bits) const {
  std::uint64_t bits = 0;
  for (PeId p = 0; p < machine_.size(); ++p) {
    bits += machine_.block_length(p) * position_bits;
    bits += machine_.pe(p).pruned.size() * 8;
  }
  return bits;
}

}  // namespace dpt
