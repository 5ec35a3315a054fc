#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dpt/bit_vector.hpp"
#include "dpt/byte_io.hpp"
#include "dpt/succinct_tree.hpp"
#include "dpt/text.hpp"

namespace dpt {

enum class TrieBacking : std::uint8_t { Pointer = 0, Louds = 1, Dfuds = 2, Bp = 3 };

std::string_view to_string(TrieBacking b);
std::optional<TrieBacking> parse_backing(std::string_view name);

struct BlockMeta {
  std::uint32_t pe_id = 0;
  Position block_start = 1;  // 1-based SA index of the block's first entry
  Position block_len = 0;

  friend bool operator==(const BlockMeta&, const BlockMeta&) = default;
};

/// Resolves text positions to characters for edge labels.
class CharProvider {
 public:
  virtual ~CharProvider() = default;
  virtual std::vector<std::uint8_t> fetch(std::span<const Position> positions) = 0;
};

/// Reads straight from a Text and counts what was asked for.
class LocalCharProvider : public CharProvider {
 public:
  explicit LocalCharProvider(const Text& text) : text_(text) {}
  std::vector<std::uint8_t> fetch(std::span<const Position> positions) override;
  std::uint64_t requested() const { return requested_; }

 private:
  const Text& text_;
  std::uint64_t requested_ = 0;
};

/// Output of the left-to-right stack scan: trie shape and per-node payload
/// in preorder. Edge characters are still text positions at this point.
struct PatriciaSkeleton {
  PointerTree tree;                  // node ids are preorder ranks
  std::vector<Position> depth;       // string depth; suffix length at leaves
  std::vector<Position> label_pos;   // text position of the incoming edge's first char (0 at root)
  std::vector<bool> leaf;
  /// Set instead of `tree` by the streaming DFUDS route.
  std::optional<BitVector> dfuds;
  Position text_size = 0;  // n + 1
  std::uint64_t max_stack = 0;
  std::uint64_t pushes = 0;
  std::uint64_t pops = 0;

  std::size_t node_count() const { return depth.size(); }
  /// Label positions of every edge, in preorder of the child node.
  std::vector<Position> edge_positions() const;
};

/// Stack construction over one SA/LCP block. lcp[0] is the seam value against
/// the previous block and does not shape the trie. text_size is n + 1.
PatriciaSkeleton scan_patricia(std::span<const Position> sa, std::span<const Position> lcp,
                               Position text_size);

/// Same scan, but each node is appended to a DFUDS chain when it leaves the
/// stack; no child lists are kept for finalized nodes.
PatriciaSkeleton scan_patricia_dfuds(std::span<const Position> sa, std::span<const Position> lcp,
                                     Position text_size);

struct BlindSearchResult {
  enum class Outcome : std::uint8_t { Matched, NoEdge };
  Outcome outcome = Outcome::NoEdge;
  std::uint64_t node = 0;
  Position witness = 0;
  std::uint64_t first_rank = 0;
  std::uint64_t last_rank = 0;
  std::uint64_t work = 0;

  bool matched() const { return outcome == Outcome::Matched; }
  friend bool operator==(const BlindSearchResult&, const BlindSearchResult&) = default;
};

struct TrieSpace {
  std::uint64_t tree_bits = 0;   // topology, navigation support, leaf maps
  std::uint64_t depth_bits = 0;
  std::uint64_t label_bits = 0;
  std::uint64_t sa_bits = 0;
  std::uint64_t total() const { return tree_bits + depth_bits + label_bits + sa_bits; }
  TrieSpace& operator+=(const TrieSpace& o) {
    tree_bits += o.tree_bits;
    depth_bits += o.depth_bits;
    label_bits += o.label_bits;
    sa_bits += o.sa_bits;
    return *this;
  }
};

/// Local blind trie over one SA block. Nodes are opaque handles: preorder ids
/// for the pointer backing, bit positions for the succinct ones.
class PatriciaTrie {
 public:
  PatriciaTrie() = default;

  /// Attaches fetched edge characters (one per edge, in edge_positions() order).
  /// Throws MalformedLcp when sibling characters are not strictly increasing.
  static PatriciaTrie assemble(const PatriciaSkeleton& skeleton, std::span<const std::uint8_t> edge_chars,
                               std::span<const Position> sa, TrieBacking backing, BlockMeta meta);

  TrieBacking backing() const { return backing_; }
  const BlockMeta& meta() const { return meta_; }
  std::span<const Position> sa() const { return sa_; }
  std::uint64_t node_count() const { return node_count_; }
  std::uint64_t leaf_count() const { return sa_.size(); }

  std::uint64_t root() const;
  std::uint64_t outdegree(std::uint64_t node) const;
  std::uint64_t child(std::uint64_t node, std::uint64_t i) const;
  bool is_leaf(std::uint64_t node) const;
  std::uint8_t first_char(std::uint64_t node) const;
  /// String depth; at leaves the suffix length.
  Position string_depth(std::uint64_t node) const;
  std::uint64_t leaf_rank(std::uint64_t node) const;
  std::uint64_t leftmost_leaf(std::uint64_t node) const;
  std::uint64_t rightmost_leaf(std::uint64_t node) const;

  /// Null for the pointer backing.
  const SuccinctTree* succinct() const { return std::get_if<SuccinctTree>(&topology_); }

  TrieSpace space(unsigned position_bits) const;

  void save(ByteWriter& out) const;
  static PatriciaTrie load(ByteReader& in);

  friend bool operator==(const PatriciaTrie&, const PatriciaTrie&) = default;

 private:
  std::uint64_t ordinal(std::uint64_t node) const;
  std::uint64_t leaf_ordinal(std::uint64_t ord) const;
  void finish_payload(const PatriciaSkeleton& skeleton, std::span<const std::uint8_t> edge_chars,
                      std::span<const NodeId> order);

  TrieBacking backing_ = TrieBacking::Pointer;
  BlockMeta meta_;
  std::vector<Position> sa_;
  std::uint64_t node_count_ = 0;
  Position text_size_ = 0;
  std::variant<PointerTree, SuccinctTree> topology_;

  // Indexed by ordinal (preorder, or level order for LOUDS).
  std::vector<std::uint8_t> first_char_;
  // Pointer backing: plain arrays over all nodes.
  std::vector<std::uint64_t> depth_words_;
  std::vector<std::uint64_t> leaf_rank_words_;
  // Succinct backings: leaf marks over ordinals, packed internal depths,
  // and for LOUDS the leaf rank of each leaf in level order.
  BitVector leaf_marks_;
  PackedArray internal_depth_;
  PackedArray louds_leaf_rank_;
};

PatriciaTrie build_patricia(std::span<const Position> sa, std::span<const Position> lcp,
                            Position text_size, CharProvider& chars,
                            TrieBacking backing = TrieBacking::Pointer, BlockMeta meta = {});

/// DFUDS-backed trie built by the streaming scan.
PatriciaTrie build_patricia_dfuds_streaming(std::span<const Position> sa, std::span<const Position> lcp,
                                            Position text_size, CharProvider& chars, BlockMeta meta = {});

/// Descends on branching characters only; never reads the text.
BlindSearchResult blind_search(const PatriciaTrie& trie, std::string_view pattern);

/// fetched is T[q..q+|p|-1] for the witness q; shorter when the suffix is.
bool verify_occurrence(std::string_view pattern, std::string_view fetched);

std::uint64_t leaf_range_count(const BlindSearchResult& res);

}  // namespace dpt
