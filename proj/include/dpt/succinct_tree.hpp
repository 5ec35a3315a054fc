#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dpt/bit_vector.hpp"

namespace dpt {

using NodeId = std::size_t;

/// Rooted ordered tree in compressed-sparse-row form. Node 0 is the root.
class PointerTree {
 public:
  PointerTree() : child_begin_{0, 0} {}
  /// children[v] lists the children of v in order.
  explicit PointerTree(const std::vector<std::vector<NodeId>>& children);

  std::size_t size() const { return child_begin_.size() - 1; }
  NodeId root() const { return 0; }
  std::size_t outdegree(NodeId v) const { return child_begin_[v + 1] - child_begin_[v]; }
  /// i-th child, 1-based. Throws NoSuchChild.
  NodeId child(NodeId v, std::size_t i) const;
  std::span<const NodeId> children(NodeId v) const {
    return {child_ids_.data() + child_begin_[v], outdegree(v)};
  }

  std::vector<NodeId> preorder() const;
  std::vector<NodeId> level_order() const;

  /// Bits of the two index arrays as held in memory.
  std::uint64_t structure_bits() const {
    return 64 * (child_begin_.size() + child_ids_.size());
  }

  friend bool operator==(const PointerTree&, const PointerTree&) = default;

 private:
  std::vector<std::size_t> child_begin_;
  std::vector<NodeId> child_ids_;
};

enum class TreeEncoding : std::uint8_t { Louds = 1, Dfuds = 2, Bp = 3 };

std::string_view to_string(TreeEncoding e);

/// Succinct ordinal tree over a BitVector. Nodes are addressed by bit
/// positions (1-based):
///   LOUDS  node = start of its unary degree run; root at 1; level order.
///   DFUDS  node = start of its unary degree run after the leading 1; root at 2; preorder.
///   BP     node = its opening parenthesis; root at 1; preorder.
/// ordinal() numbers nodes in that encoding's canonical order.
class SuccinctTree {
 public:
  SuccinctTree() = default;
  SuccinctTree(TreeEncoding encoding, BitVector bits, std::uint64_t node_count)
      : encoding_(encoding), bits_(std::move(bits)), node_count_(node_count) {}

  static SuccinctTree encode(const PointerTree& tree, TreeEncoding encoding);

  TreeEncoding encoding() const { return encoding_; }
  const BitVector& bits() const { return bits_; }
  std::uint64_t node_count() const { return node_count_; }

  std::uint64_t root() const { return encoding_ == TreeEncoding::Dfuds ? 2 : 1; }
  std::uint64_t outdegree(std::uint64_t x) const;
  bool is_leaf(std::uint64_t x) const;
  /// i-th child, 1-based. Throws NoSuchChild.
  std::uint64_t child(std::uint64_t x, std::uint64_t i) const;

  std::uint64_t ordinal(std::uint64_t x) const;
  std::uint64_t position(std::uint64_t ordinal) const;

  /// Canonical order of the source tree's nodes for this encoding.
  static std::vector<NodeId> node_order(const PointerTree& tree, TreeEncoding encoding);

  friend bool operator==(const SuccinctTree&, const SuccinctTree&) = default;

 private:
  std::uint64_t degree_run_end(std::uint64_t x) const;

  TreeEncoding encoding_ = TreeEncoding::Louds;
  BitVector bits_;
  std::uint64_t node_count_ = 0;
};

}  // namespace dpt
