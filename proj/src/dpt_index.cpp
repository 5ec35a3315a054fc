#include "dpt/dpt_index.hpp"

#include <algorithm>
#include <stdexcept>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

constexpr std::uint64_t kMaxQuerySupersteps = 4;

std::string encode_query(std::uint64_t index, std::string_view pattern) {
  std::vector<std::uint64_t> head{index};
  return encode_words(head) + std::string(pattern);
}

std::string encode_partial(std::uint64_t index, std::uint64_t count, std::span<const Position> positions) {
  std::vector<std::uint64_t> words{index, count};
  words.insert(words.end(), positions.begin(), positions.end());
  return encode_words(words);
}

struct QueryState {
  RoutingResult route;
  bool done = false;
  std::uint64_t tag = 0;
  std::uint32_t parts_expected = 0;
  std::uint32_t parts_got = 0;
  std::uint64_t count = 0;
  std::vector<Position> positions;
};

struct Pending {
  enum class Kind : std::uint8_t { Witness, Interior } kind;
  std::uint64_t query;
  std::uint64_t first_rank = 0;
  std::uint64_t last_rank = 0;
};

}  // namespace

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::Exists: return "exists";
    case QueryKind::Count: return "count";
    case QueryKind::Enumerate: return "enumerate";
  }
  return "?";
}

std::optional<QueryKind> parse_query_kind(std::string_view name) {
  if (name == "exists") return QueryKind::Exists;
  if (name == "count") return QueryKind::Count;
  if (name == "enumerate" || name == "enum") return QueryKind::Enumerate;
  return std::nullopt;
}

DptIndex DptIndex::build(const Text& text, const BuildConfig& config) {
  auto sa = build_suffix_array(text);
  auto lcp = build_lcp_array(text, sa);
  return build(text, sa, lcp, config);
}

DptIndex DptIndex::build(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                         const BuildConfig& config) {
  if (config.pmax == 0) throw OutOfRange("pmax must be at least 1");
  DptIndex idx;
  idx.pmax_ = config.pmax;
  idx.backing_ = config.backing;
  idx.label_batch_ = config.label_batch;
  idx.machine_ = Machine::distribute(text, sa, lcp, config.pe_count, config.pmax, config.block_lengths);
  auto& m = idx.machine_;
  m.set_parallel(config.parallel);
  const std::size_t c = m.size();
  const Position text_size = text.size_with_sentinel();

  // Local tries: scan, then fetch one character per edge in batches.
  std::vector<PatriciaSkeleton> skeletons(c);
  std::vector<std::vector<Position>> wanted(c);
  std::vector<std::vector<std::uint8_t>> chars(c);
  std::vector<std::size_t> issued(c, 0), batch_start(c, 0);
  auto batch_of = [&](std::size_t total, std::size_t from) {
    std::size_t s = config.label_batch == 0 ? total : config.label_batch;
    return std::min(total - from, s);
  };
  auto take_replies = [&](PeId pe, std::span<const Message> inbox) {
    for (const auto& msg : inbox) {
      if (msg.kind != MessageKind::DrmaReply || msg.payload.size() != 1) throw std::logic_error("unexpected label reply");
      chars[pe][batch_start[pe] + msg.ticket - 1] = static_cast<std::uint8_t>(msg.payload[0]);
    }
  };
  bool first = true;
  bool more = true;
  while (more) {
    m.run_superstep("trie labels", [&](PeContext& ctx) {
      PeId pe = ctx.id();
      const auto& s = ctx.state();
      if (first) {
        skeletons[pe] = config.backing == TrieBacking::Dfuds
                            ? scan_patricia_dfuds(s.sa_block, s.lcp_block, text_size)
                            : scan_patricia(s.sa_block, s.lcp_block, text_size);
        wanted[pe] = skeletons[pe].edge_positions();
        chars[pe].assign(wanted[pe].size(), 0);
        ctx.work(s.block_len());
      } else {
        take_replies(pe, ctx.inbox());
      }
      batch_start[pe] = issued[pe];
      auto len = batch_of(wanted[pe].size(), issued[pe]);
      for (std::size_t k = 0; k < len; ++k) {
        Position q = wanted[pe][issued[pe] + k];
        ctx.drma_get(m.text_owner(q), Region::Text, q, 1);
      }
      issued[pe] += len;
    });
    first = false;
    more = false;
    for (PeId pe = 0; pe < c; ++pe) more = more || issued[pe] < wanted[pe].size();
  }
  for (PeId pe = 0; pe < c; ++pe) {
    auto inbox = m.drain(pe);
    take_replies(pe, inbox);
    const auto& s = m.pe(pe);
    BlockMeta meta{pe, s.sa_begin, s.block_len()};
    idx.tries_.push_back(PatriciaTrie::assemble(skeletons[pe], chars[pe], s.sa_block, config.backing, meta));
  }

  auto views = gather_boundaries(m);
  idx.global_ = build_global_trie(m, views, config.pmax);
  idx.build_supersteps_ = m.ledger().supersteps();
  idx.arrivals_.assign(c, 0);
  return idx;
}

QueryResult DptIndex::query_exists(std::string_view p, PeId arrival) {
  Query q{QueryKind::Exists, std::string(p), arrival};
  return query_batch(std::span<const Query>(&q, 1)).front();
}

QueryResult DptIndex::query_count(std::string_view p, PeId arrival) {
  Query q{QueryKind::Count, std::string(p), arrival};
  return query_batch(std::span<const Query>(&q, 1)).front();
}

QueryResult DptIndex::query_enumerate(std::string_view p, PeId arrival) {
  Query q{QueryKind::Enumerate, std::string(p), arrival};
  return query_batch(std::span<const Query>(&q, 1)).front();
}

std::vector<QueryResult> DptIndex::query_batch(std::span<const Query> queries) {
  const std::size_t c = machine_.size();
  std::vector<QueryResult> results(queries.size());
  std::vector<QueryState> state(queries.size());
  std::vector<std::vector<std::uint64_t>> arriving(c);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    results[i].kind = queries[i].kind;
    state[i].tag = next_tag_++;
    if (queries[i].arrival >= c) {
      results[i].error = "DeliveryToInvalidPe: arrival pe " + std::to_string(queries[i].arrival);
      state[i].done = true;
      continue;
    }
    arriving[queries[i].arrival].push_back(i);
  }

  std::vector<std::vector<Pending>> prev(c), cur(c);
  std::uint64_t step = 0;

  auto finish = [&](std::uint64_t i) {
    state[i].done = true;
    results[i].supersteps = step;
  };
  auto finalize_parts = [&](std::uint64_t i) {
    auto& st = state[i];
    auto& r = results[i];
    if (queries[i].kind == QueryKind::Enumerate) {
      std::sort(st.positions.begin(), st.positions.end());
      r.positions = std::move(st.positions);
      r.count = r.positions.size();
    } else {
      r.count = st.count;
    }
    r.exists = r.count > 0;
    finish(i);
  };

  auto compute = [&](PeContext& ctx) {
    const PeId pe = ctx.id();
    if (step == 1) {
      for (auto i : arriving[pe]) {
        const auto& q = queries[i];
        auto& st = state[i];
        auto& r = results[i];
        ++arrivals_[pe];
        std::uint64_t work = 0;
        try {
          st.route = global_[pe].route(q.pattern, &work);
        } catch (const Error& e) {
          r.error = e.what();
          finish(i);
          continue;
        }
        ctx.work(work + 1);
        const auto& rt = st.route;
        if (rt.kind == RoutingResult::Kind::Absent) {
          finish(i);
          continue;
        }
        if (q.kind == QueryKind::Exists) {
          if (rt.kind == RoutingResult::Kind::Interval) {
            r.exists = true;
            finish(i);
          } else {
            ctx.send(rt.first, MessageKind::QueryForward, encode_query(i, q.pattern), st.tag);
          }
          continue;
        }
        st.parts_expected = rt.first == rt.last ? 1 : 2;
        ctx.send(rt.first, MessageKind::QueryForward, encode_query(i, q.pattern), st.tag);
        if (rt.last != rt.first) ctx.send(rt.last, MessageKind::QueryForward, encode_query(i, q.pattern), st.tag);
        for (PeId k = rt.first + 1; k < rt.last; ++k) {
          if (q.kind == QueryKind::Count) {
            st.count += machine_.block_length(k);
          } else {
            auto ticket = ctx.drma_get(k, Region::SuffixArray, machine_.block_start(k), machine_.block_length(k), st.tag);
            cur[pe].push_back({Pending::Kind::Interior, i});
            if (ticket != cur[pe].size()) throw std::logic_error("ticket order");
          }
        }
      }
    }

    for (const auto& msg : ctx.inbox()) {
      switch (msg.kind) {
        case MessageKind::QueryForward: {
          auto i = decode_words(std::string_view(msg.payload).substr(0, kWordBytes)).front();
          std::string_view p = std::string_view(msg.payload).substr(kWordBytes);
          const auto& q = queries[i];
          auto res = blind_search(tries_[pe], p);
          ctx.work(res.work);
          if (!res.matched()) {
            if (q.kind == QueryKind::Exists) {
              finish(i);
            } else {
              ctx.send(q.arrival, MessageKind::PartialResult, encode_partial(i, 0, {}), msg.tag);
            }
            break;
          }
          auto ticket = ctx.drma_get(machine_.text_owner(res.witness), Region::Text, res.witness, p.size(), msg.tag);
          cur[pe].push_back({Pending::Kind::Witness, i, res.first_rank, res.last_rank});
          if (ticket != cur[pe].size()) throw std::logic_error("ticket order");
          break;
        }
        case MessageKind::DrmaReply: {
          const auto& pend = prev[pe].at(msg.ticket - 1);
          auto i = pend.query;
          const auto& q = queries[i];
          if (pend.kind == Pending::Kind::Interior) {
            auto pos = decode_words(msg.payload);
            ctx.work(pos.size());
            state[i].positions.insert(state[i].positions.end(), pos.begin(), pos.end());
            break;
          }
          bool ok = verify_occurrence(q.pattern, msg.payload);
          ctx.work(q.pattern.size());
          if (msg.src != pe) results[i].remote_chars += msg.payload.size();
          if (q.kind == QueryKind::Exists) {
            results[i].exists = ok;
            finish(i);
            break;
          }
          std::uint64_t n = ok ? pend.last_rank - pend.first_rank + 1 : 0;
          std::span<const Position> hits;
          if (ok && q.kind == QueryKind::Enumerate) hits = tries_[pe].sa().subspan(pend.first_rank, n);
          ctx.send(q.arrival, MessageKind::PartialResult, encode_partial(i, n, hits), msg.tag);
          break;
        }
        case MessageKind::PartialResult: {
          auto words = decode_words(msg.payload);
          auto i = words.at(0);
          auto& st = state[i];
          st.count += words.at(1);
          st.positions.insert(st.positions.end(), words.begin() + 2, words.end());
          ctx.work(words.size());
          if (++st.parts_got == st.parts_expected) finalize_parts(i);
          break;
        }
        default:
          throw std::logic_error("unexpected message in a query superstep");
      }
    }
  };

  auto pending = [&] { return std::any_of(state.begin(), state.end(), [](const QueryState& s) { return !s.done; }); };
  while (pending()) {
    ++step;
    if (step > kMaxQuerySupersteps) throw std::logic_error("query protocol did not finish");
    machine_.run_superstep("query", compute);
    prev.swap(cur);
    for (auto& v : cur) v.clear();
  }
  for (std::size_t i = 0; i < queries.size(); ++i) results[i].words = machine_.words_for_tag(state[i].tag);
  return results;
}

std::vector<std::uint64_t> DptIndex::forwarded() const {
  std::vector<std::uint64_t> out;
  for (PeId p = 0; p < machine_.size(); ++p) out.push_back(machine_.received_messages(p, MessageKind::QueryForward));
  return out;
}

TrieSpace DptIndex::space(unsigned position_bits) const {
  TrieSpace total;
  for (const auto& t : tries_) total += t.space(position_bits);
  return total;
}

}  // namespace dpt
