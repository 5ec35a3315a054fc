#include "dpt/bsp.hpp"

#include <algorithm>
#include <exception>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

thread_local const Machine* tl_machine = nullptr;
thread_local PeId tl_pe = 0;

constexpr std::uint64_t kRequestWords = 2;
constexpr std::size_t kKindCount = 6;

std::uint64_t words_of(std::uint64_t bytes) { return (bytes + kWordBytes - 1) / kWordBytes; }

}  // namespace

TrafficMode mode_of(MessageKind kind) {
  switch (kind) {
    case MessageKind::DrmaRequest:
    case MessageKind::DrmaReply:
      return TrafficMode::OneSided;
    case MessageKind::LabelExchange:
    case MessageKind::BoundaryBroadcast:
      return TrafficMode::Collective;
    case MessageKind::QueryForward:
    case MessageKind::PartialResult:
      break;
  }
  return TrafficMode::PointToPoint;
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::QueryForward: return "QueryForward";
    case MessageKind::DrmaRequest: return "DrmaRequest";
    case MessageKind::DrmaReply: return "DrmaReply";
    case MessageKind::PartialResult: return "PartialResult";
    case MessageKind::LabelExchange: return "LabelExchange";
    case MessageKind::BoundaryBroadcast: return "BoundaryBroadcast";
  }
  return "?";
}

double CostLedger::total_cost(double word_cost, double barrier_cost) const {
  double total = 0;
  for (const auto& e : entries_) total += static_cast<double>(e.w) + static_cast<double>(e.h) * word_cost + barrier_cost;
  return total;
}

std::uint64_t CostLedger::total_words() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.total_words();
  return total;
}

std::string CostLedger::to_tsv(std::size_t from) const {
  std::ostringstream out;
  out << "superstep\tw\th\tmode_breakdown\n";
  for (std::size_t k = from; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    out << (k - from + 1) << '\t' << e.w << '\t' << e.h << "\tone_sided=" << e.one_sided_words
        << ";collective=" << e.collective_words << ";p2p=" << e.p2p_words << '\n';
  }
  return out.str();
}

std::size_t PeContext::pe_count() const { return machine_.size(); }

PeState& PeContext::state() { return machine_.pes_[id_]; }

void PeContext::send(PeId dst, MessageKind kind, std::string payload, std::uint64_t tag) {
  if (dst >= machine_.size()) throw DeliveryToInvalidPe("pe " + std::to_string(dst));
  Message m;
  m.src = id_;
  m.dst = dst;
  m.kind = kind;
  m.tag = tag;
  m.seq = machine_.next_seq(id_);
  m.payload = std::move(payload);
  outbox_.push_back(std::move(m));
}

std::uint64_t PeContext::drma_get(PeId target, Region region, Position offset, Position len, std::uint64_t tag) {
  if (target >= machine_.size()) throw DeliveryToInvalidPe("pe " + std::to_string(target));
  const PeState& s = machine_.pes_[target];
  Position begin = region == Region::Text ? s.text_begin : s.sa_begin;
  Position size = region == Region::Text ? s.text_slice.size() : s.sa_block.size();
  if (region == Region::Pruned && s.prune_len == 0) throw FetchOutOfSlice("pe " + std::to_string(target) + " has no pruned store");
  if (offset < begin || offset + len > begin + size) {
    throw FetchOutOfSlice("pe " + std::to_string(target) + " offset " + std::to_string(offset) + " len " +
                          std::to_string(len));
  }
  std::uint64_t ticket = drma_.size() + 1;
  drma_.push_back({target, region, offset, len, tag, ticket});
  return ticket;
}

Machine::Machine(std::vector<PeState> pes, Position text_size) : pes_(std::move(pes)), text_size_(text_size) {
  for (std::size_t p = 0; p < pes_.size(); ++p) {
    pes_[p].id = static_cast<PeId>(p);
    sa_starts_.push_back(pes_[p].sa_begin);
    text_starts_.push_back(pes_[p].text_begin);
  }
  inboxes_.resize(pes_.size());
  seq_.assign(pes_.size(), 0);
  pe_words_.assign(pes_.size(), 0);
  received_by_kind_.assign(pes_.size(), std::vector<std::uint64_t>(kKindCount, 0));
}

std::string encode_words(std::span<const std::uint64_t> values) {
  std::string out(values.size() * kWordBytes, '\0');
  for (std::size_t k = 0; k < values.size(); ++k) {
    for (std::size_t b = 0; b < kWordBytes; ++b) out[k * kWordBytes + b] = static_cast<char>(values[k] >> (8 * b));
  }
  return out;
}

std::vector<std::uint64_t> decode_words(std::string_view payload) {
  if (payload.size() % kWordBytes != 0) throw FormatError("payload is not word aligned");
  std::vector<std::uint64_t> out(payload.size() / kWordBytes, 0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t b = 0; b < kWordBytes; ++b) {
      out[k] |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(payload[k * kWordBytes + b])) << (8 * b);
    }
  }
  return out;
}

std::vector<Position> balanced_blocks(Position total, std::size_t c) {
  if (c == 0) throw OutOfRange("pe count must be at least 1");
  std::vector<Position> out(c, total / c);
  for (Position k = 0; k < total % c; ++k) ++out[k];
  return out;
}

Machine Machine::distribute(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                            std::size_t c, Position padding, std::optional<std::vector<Position>> block_lengths) {
  Position total = text.size_with_sentinel();
  if (c == 0 || c > total) throw OutOfRange("pe count " + std::to_string(c) + " for " + std::to_string(total) + " suffixes");
  if (sa.size() != total || lcp.size() != total) throw OutOfRange("SA/LCP length does not match the text");
  auto lengths = block_lengths ? *block_lengths : balanced_blocks(total, c);
  if (lengths.size() != c) throw OutOfRange("block table size");
  Position sum = 0;
  for (auto l : lengths) {
    if (l == 0) throw OutOfRange("empty block");
    sum += l;
  }
  if (sum != total) throw OutOfRange("block lengths do not cover the text");

  std::vector<PeState> pes(c);
  Position begin = 1;
  for (std::size_t p = 0; p < c; ++p) {
    auto& s = pes[p];
    s.id = static_cast<PeId>(p);
    s.sa_begin = begin;
    s.sa_block.assign(sa.begin() + (begin - 1), sa.begin() + (begin - 1 + lengths[p]));
    s.lcp_block.assign(lcp.begin() + (begin - 1), lcp.begin() + (begin - 1 + lengths[p]));
    s.text_begin = begin;
    s.text_block_len = lengths[p];
    s.text_slice = std::string(text.substr(begin, lengths[p] + padding));
    s.text_slice.resize(lengths[p] + padding, static_cast<char>(kSentinel));
    begin += lengths[p];
  }
  return Machine(std::move(pes), text.size());
}

void Machine::check_local(PeId id) const {
  if (audit_ && tl_machine == this && id != tl_pe) {
    throw LocalityViolation("pe " + std::to_string(tl_pe) + " touched pe " + std::to_string(id));
  }
}

PeState& Machine::pe(PeId id) {
  check_local(id);
  return pes_.at(id);
}

const PeState& Machine::pe(PeId id) const {
  check_local(id);
  return pes_.at(id);
}

Position Machine::block_length(PeId id) const {
  Position end = id + 1 < sa_starts_.size() ? sa_starts_[id + 1] : text_size_ + 2;
  return end - sa_starts_.at(id);
}

PeId Machine::text_owner(Position pos) const {
  auto it = std::upper_bound(text_starts_.begin(), text_starts_.end(), pos);
  return static_cast<PeId>(it - text_starts_.begin() - 1);
}

PeId Machine::sa_owner(Position sa_index) const {
  auto it = std::upper_bound(sa_starts_.begin(), sa_starts_.end(), sa_index);
  return static_cast<PeId>(it - sa_starts_.begin() - 1);
}

std::vector<Message> Machine::drain(PeId id) { return std::exchange(inboxes_.at(id), {}); }

std::uint64_t Machine::words_for_tag(std::uint64_t tag) const {
  auto it = tag_words_.find(tag);
  return it == tag_words_.end() ? 0 : it->second;
}

std::uint64_t Machine::received_messages(PeId id, MessageKind kind) const {
  return received_by_kind_.at(id)[static_cast<std::size_t>(kind)];
}

void Machine::run_superstep(std::string_view label, const std::function<void(PeContext&)>& compute) {
  const std::size_t c = pes_.size();
  std::vector<PeContext> contexts;
  contexts.reserve(c);
  for (std::size_t p = 0; p < c; ++p) contexts.push_back(PeContext(*this, static_cast<PeId>(p), inboxes_[p]));

  auto run_one = [&](std::size_t p) {
    tl_machine = this;
    tl_pe = static_cast<PeId>(p);
    try {
      compute(contexts[p]);
    } catch (...) {
      tl_machine = nullptr;
      throw;
    }
    tl_machine = nullptr;
  };

  if (parallel_ && c > 1) {
    std::vector<std::exception_ptr> errors(c);
    std::vector<std::thread> workers;
    workers.reserve(c);
    for (std::size_t p = 0; p < c; ++p) {
      workers.emplace_back([&, p] {
        try {
          run_one(p);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t p = 0; p < c; ++p) run_one(p);
  }

  // Barrier: collect, charge and deliver.
  LedgerEntry entry;
  entry.label = std::string(label);
  std::vector<std::uint64_t> sent(c, 0), received(c, 0);
  std::vector<Message> delivered;

  auto charge = [&](PeId src, PeId dst, MessageKind kind, std::uint64_t tag, std::uint64_t words) {
    if (src == dst) return;
    sent[src] += words;
    received[dst] += words;
    switch (mode_of(kind)) {
      case TrafficMode::OneSided: entry.one_sided_words += words; break;
      case TrafficMode::Collective: entry.collective_words += words; break;
      case TrafficMode::PointToPoint: entry.p2p_words += words; break;
    }
    tag_words_[tag] += words;
  };

  for (auto& ctx : contexts) {
    entry.w = std::max(entry.w, ctx.work_);
    for (auto& m : ctx.outbox_) {
      charge(m.src, m.dst, m.kind, m.tag, m.payload_words());
      delivered.push_back(std::move(m));
    }
  }
  for (auto& ctx : contexts) {
    for (const auto& r : ctx.drma_) {
      charge(ctx.id_, r.target, MessageKind::DrmaRequest, r.tag, kRequestWords);
      const PeState& s = pes_[r.target];
      Message reply;
      reply.src = r.target;
      reply.dst = ctx.id_;
      reply.kind = MessageKind::DrmaReply;
      reply.tag = r.tag;
      reply.ticket = r.ticket;
      reply.seq = next_seq(r.target);
      if (r.region == Region::Text) {
        reply.payload = s.text_slice.substr(r.offset - s.text_begin, r.len);
      } else if (r.region == Region::Pruned) {
        reply.payload = s.pruned.substr((r.offset - s.sa_begin) * s.prune_len, r.len * s.prune_len);
      } else {
        reply.payload = encode_words(std::span<const Position>(s.sa_block).subspan(r.offset - s.sa_begin, r.len));
      }
      charge(reply.src, reply.dst, reply.kind, reply.tag, words_of(reply.payload.size()));
      delivered.push_back(std::move(reply));
    }
  }

  std::sort(delivered.begin(), delivered.end(),
            [](const Message& a, const Message& b) { return std::tie(a.src, a.seq) < std::tie(b.src, b.seq); });
  std::vector<std::vector<Message>> next(c);
  const std::uint64_t step = ledger_.supersteps() + 1;
  for (auto& m : delivered) {
    trace_.push_back({step, m.src, m.dst, m.kind, m.tag, m.src == m.dst ? 0 : m.payload_words()});
    ++received_by_kind_[m.dst][static_cast<std::size_t>(m.kind)];
    next[m.dst].push_back(std::move(m));
  }
  entry.messages = delivered.size();
  for (std::size_t p = 0; p < c; ++p) {
    entry.h = std::max({entry.h, sent[p], received[p]});
    pe_words_[p] += sent[p] + received[p];
  }
  contexts.clear();
  inboxes_ = std::move(next);
  ledger_.append(std::move(entry));
}

}  // namespace dpt
