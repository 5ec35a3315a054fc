#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpt/text.hpp"

namespace dpt {

using PeId = std::uint32_t;

enum class MessageKind : std::uint8_t {
  QueryForward,
  DrmaRequest,
  DrmaReply,
  PartialResult,
  LabelExchange,
  BoundaryBroadcast,
};

/// Accounting mode of a message: DRMA traffic is one-sided, bulk exchanges are
/// collective, query hand-offs and partial results are point-to-point.
enum class TrafficMode : std::uint8_t { OneSided, Collective, PointToPoint };

TrafficMode mode_of(MessageKind kind);
std::string_view to_string(MessageKind kind);

inline constexpr std::uint64_t kWordBytes = 8;

struct Message {
  PeId src = 0;
  PeId dst = 0;
  MessageKind kind = MessageKind::QueryForward;
  std::uint64_t tag = 0;     // caller-defined, e.g. a query id
  std::uint64_t ticket = 0;  // DRMA replies: ticket returned by drma_get
  std::uint64_t seq = 0;     // per-source sequence number
  std::string payload;

  std::uint64_t payload_words() const { return (payload.size() + kWordBytes - 1) / kWordBytes; }
};

/// Memory a DRMA fetch can address on the target PE.
enum class Region : std::uint8_t { Text, SuffixArray, Pruned };

/// The data a PE owns. text_slice holds T[text_begin .. text_begin+block_len-1]
/// followed by `padding` further characters (sentinels past the text end).
struct PeState {
  PeId id = 0;
  Position sa_begin = 1;  // 1-based SA index of sa_block[0]
  std::vector<Position> sa_block;
  std::vector<Position> lcp_block;
  Position text_begin = 1;
  Position text_block_len = 0;
  std::string text_slice;
  /// First prune_len characters of each local suffix, entry after entry.
  std::string pruned;
  Position prune_len = 0;

  Position block_len() const { return sa_block.size(); }
};

struct LedgerEntry {
  std::string label;
  std::uint64_t w = 0;  // max work units over PEs
  std::uint64_t h = 0;  // max words sent or received by one PE
  std::uint64_t one_sided_words = 0;
  std::uint64_t collective_words = 0;
  std::uint64_t p2p_words = 0;
  std::uint64_t messages = 0;

  std::uint64_t total_words() const { return one_sided_words + collective_words + p2p_words; }
};

/// Append-only per-superstep cost record.
class CostLedger {
 public:
  void append(LedgerEntry e) { entries_.push_back(std::move(e)); }
  std::span<const LedgerEntry> entries() const { return entries_; }
  std::size_t supersteps() const { return entries_.size(); }

  /// Sum over supersteps of w + h*G + L.
  double total_cost(double word_cost, double barrier_cost) const;
  std::uint64_t total_words() const;

  /// superstep, w, h, mode_breakdown; rows for entries [from, end).
  std::string to_tsv(std::size_t from = 0) const;

 private:
  std::vector<LedgerEntry> entries_;
};

/// One delivered message, as recorded for determinism checks.
struct TraceRecord {
  std::uint64_t superstep;
  PeId src;
  PeId dst;
  MessageKind kind;
  std::uint64_t tag;
  std::uint64_t words;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class Machine;

/// A PE's view during its compute phase.
class PeContext {
 public:
  PeId id() const { return id_; }
  std::size_t pe_count() const;
  PeState& state();
  std::span<const Message> inbox() const { return inbox_; }

  void send(PeId dst, MessageKind kind, std::string payload, std::uint64_t tag = 0);
  /// Requests `len` entries of `region` starting at `offset` (text position, or
  /// 1-based SA index for the other regions) on `target`. The reply arrives next superstep as a
  /// DrmaReply carrying the returned ticket. Throws FetchOutOfSlice.
  std::uint64_t drma_get(PeId target, Region region, Position offset, Position len, std::uint64_t tag = 0);
  void work(std::uint64_t units) { work_ += units; }

 private:
  friend class Machine;
  PeContext(Machine& m, PeId id, std::span<const Message> inbox) : machine_(m), id_(id), inbox_(inbox) {}

  struct DrmaRequest {
    PeId target;
    Region region;
    Position offset;
    Position len;
    std::uint64_t tag;
    std::uint64_t ticket;
  };

  Machine& machine_;
  PeId id_;
  std::span<const Message> inbox_;
  std::vector<Message> outbox_;
  std::vector<DrmaRequest> drma_;
  std::uint64_t work_ = 0;
};

/// Deterministic bulk-synchronous machine. Messages sent in superstep t are
/// in the receivers' inboxes during t+1, ordered by (src, seq).
class Machine {
 public:
  Machine() = default;
  explicit Machine(std::vector<PeState> pes, Position text_size);

  /// Block distribution of SA, LCP and text. The first (n+1) mod c blocks are
  /// one entry longer unless explicit block lengths are given.
  static Machine distribute(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                            std::size_t c, Position padding,
                            std::optional<std::vector<Position>> block_lengths = std::nullopt);

  std::size_t size() const { return pes_.size(); }
  Position text_size() const { return text_size_; }

  /// Direct access to a PE's state. During a compute phase with auditing on,
  /// touching any PE other than the running one throws LocalityViolation.
  PeState& pe(PeId id);
  const PeState& pe(PeId id) const;
  void check_local(PeId id) const;

  /// Block table, known to every PE.
  Position block_start(PeId id) const { return sa_starts_.at(id); }
  Position block_length(PeId id) const;

  PeId text_owner(Position pos) const;
  PeId sa_owner(Position sa_index) const;

  void run_superstep(std::string_view label, const std::function<void(PeContext&)>& compute);

  /// Hands over a PE's undelivered inbox for the local step after the final
  /// barrier of a phase. The messages will not reach the next superstep.
  std::vector<Message> drain(PeId id);

  const CostLedger& ledger() const { return ledger_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  /// Charged words per caller tag, accumulated across supersteps.
  std::uint64_t words_for_tag(std::uint64_t tag) const;
  void reset_tag_words() { tag_words_.clear(); }
  std::uint64_t pe_words(PeId id) const { return pe_words_[id]; }
  std::uint64_t received_messages(PeId id, MessageKind kind) const;

  void set_parallel(bool on) { parallel_ = on; }
  void set_audit(bool on) { audit_ = on; }

 private:
  friend class PeContext;
  std::uint64_t next_seq(PeId id) { return seq_[id]++; }

  std::vector<PeState> pes_;
  Position text_size_ = 0;
  std::vector<Position> sa_starts_;
  std::vector<Position> text_starts_;
  std::vector<std::vector<Message>> inboxes_;
  std::vector<std::uint64_t> seq_;
  CostLedger ledger_;
  std::vector<TraceRecord> trace_;
  std::map<std::uint64_t, std::uint64_t> tag_words_;
  std::vector<std::uint64_t> pe_words_;
  std::vector<std::vector<std::uint64_t>> received_by_kind_;
  bool parallel_ = false;
  bool audit_ = false;
};

/// 8-byte little-endian words, the payload format of SA replies.
std::string encode_words(std::span<const std::uint64_t> values);
std::vector<std::uint64_t> decode_words(std::string_view payload);

/// ceil split of `total` into c blocks, the first total mod c one longer.
std::vector<Position> balanced_blocks(Position total, std::size_t c);

}  // namespace dpt
