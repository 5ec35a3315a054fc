#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpt/bsp.hpp"
#include "dpt/byte_io.hpp"
#include "dpt/text.hpp"

namespace dpt {

/// The 2c boundary suffixes in global order: entry 2p is the smallest suffix
/// of PE p, entry 2p+1 its largest. lcp[k] is the lcp of entries k-1 and k.
struct Boundaries {
  std::vector<Position> pos;
  std::vector<Position> lcp;

  friend bool operator==(const Boundaries&, const Boundaries&) = default;
};

/// What one PE contributes: its two boundary suffixes, the seam lcp against
/// the previous block, and the common prefix length of its whole block.
struct BoundaryRecord {
  Position min_pos = 0;
  Position max_pos = 0;
  Position seam_lcp = 0;
  Position within_lcp = 0;
};

/// Longest common prefix of all suffixes of a block; the suffix length when
/// the block holds a single suffix. text_size is n + 1.
Position block_common_prefix(std::span<const Position> sa_block, std::span<const Position> lcp_block,
                             Position text_size);

BoundaryRecord boundary_record(const PeState& s, Position text_size);
Boundaries assemble_boundaries(std::span<const BoundaryRecord> records);

struct RoutingResult {
  enum class Kind : std::uint8_t { Interval, Candidate, Absent };
  Kind kind = Kind::Absent;
  PeId first = 0;  // Interval: l; Candidate: the PE
  PeId last = 0;   // Interval: r; Candidate: equal to first

  static RoutingResult interval(PeId l, PeId r) { return {Kind::Interval, l, r}; }
  static RoutingResult candidate(PeId p) { return {Kind::Candidate, p, p}; }
  static RoutingResult absent() { return {}; }
  friend bool operator==(const RoutingResult&, const RoutingResult&) = default;
};

std::string_view to_string(RoutingResult::Kind k);

/// Replicated first-level trie over the boundary suffixes truncated to pmax.
/// Equal truncated suffixes share one leaf that covers a range of leaf ranks.
class GlobalTrie {
 public:
  struct Node {
    Position depth = 0;
    std::uint32_t lo = 0;  // leftmost leaf rank below
    std::uint32_t hi = 0;  // rightmost leaf rank below
    Position label_pos = 0;  // text position of the incoming label
    std::string label;
    std::vector<std::uint32_t> children;

    friend bool operator==(const Node&, const Node&) = default;
  };

  GlobalTrie() = default;

  /// Shape from boundary positions and lcps alone; labels still missing.
  static GlobalTrie plan(const Boundaries& b, Position pmax, Position text_size);
  /// (text position, length) of every edge label, in node order from node 1.
  std::vector<std::pair<Position, Position>> label_requests() const;
  void attach_labels(std::span<const std::string> labels);

  /// Plan plus labels read straight from the text.
  static GlobalTrie build_local(const Boundaries& b, Position pmax, const Text& text);

  /// Throws EmptyPattern, PatternTooLong, and SentinelInInput for a pattern
  /// containing the sentinel byte. work, if given, receives descent steps.
  RoutingResult route(std::string_view pattern, std::uint64_t* work = nullptr) const;

  Position pmax() const { return pmax_; }
  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t pe_count() const { return leaf_count_ / 2; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::uint64_t label_volume() const;

  void save(ByteWriter& out) const;
  static GlobalTrie load(ByteReader& in);
  std::string serialize() const;

  friend bool operator==(const GlobalTrie&, const GlobalTrie&) = default;

 private:
  RoutingResult below_left(std::uint32_t node) const;
  RoutingResult below_right(std::uint32_t node) const;

  Position pmax_ = 0;
  std::size_t leaf_count_ = 0;
  std::vector<Node> nodes_;
};

/// One BoundaryBroadcast superstep; returns every PE's view of the boundaries.
std::vector<Boundaries> gather_boundaries(Machine& machine);

/// Two LabelExchange supersteps: label owners send to collectors, collectors
/// broadcast. Returns every PE's replica. Requires text padding >= pmax.
std::vector<GlobalTrie> build_global_trie(Machine& machine, const std::vector<Boundaries>& views, Position pmax);

}  // namespace dpt
