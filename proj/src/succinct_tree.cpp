#include "dpt/succinct_tree.hpp"

#include <deque>
#include <string>

#include "dpt/errors.hpp"

namespace dpt {

PointerTree::PointerTree(const std::vector<std::vector<NodeId>>& children) {
  child_begin_.reserve(children.size() + 1);
  child_begin_.push_back(0);
  for (const auto& list : children) {
    child_ids_.insert(child_ids_.end(), list.begin(), list.end());
    child_begin_.push_back(child_ids_.size());
  }
  if (children.empty()) child_begin_.push_back(0);
}

NodeId PointerTree::child(NodeId v, std::size_t i) const {
  if (i < 1 || i > outdegree(v)) {
    throw NoSuchChild("node " + std::to_string(v) + " child " + std::to_string(i));
  }
  return child_ids_[child_begin_[v] + i - 1];
}

std::vector<NodeId> PointerTree::preorder() const {
  std::vector<NodeId> order;
  order.reserve(size());
  std::vector<NodeId> stack{root()};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    order.push_back(v);
    auto kids = children(v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<NodeId> PointerTree::level_order() const {
  std::vector<NodeId> order;
  order.reserve(size());
  order.push_back(root());
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto c : children(order[head])) order.push_back(c);
  }
  return order;
}

std::string_view to_string(TreeEncoding e) {
  switch (e) {
    case TreeEncoding::Louds: return "louds";
    case TreeEncoding::Dfuds: return "dfuds";
    case TreeEncoding::Bp: return "bp";
  }
  return "?";
}

std::vector<NodeId> SuccinctTree::node_order(const PointerTree& tree, TreeEncoding encoding) {
  return encoding == TreeEncoding::Louds ? tree.level_order() : tree.preorder();
}

SuccinctTree SuccinctTree::encode(const PointerTree& tree, TreeEncoding encoding) {
  std::vector<bool> bits;
  bits.reserve(2 * tree.size());
  switch (encoding) {
    case TreeEncoding::Louds:
      for (auto v : tree.level_order()) {
        bits.insert(bits.end(), tree.outdegree(v), true);
        bits.push_back(false);
      }
      break;
    case TreeEncoding::Dfuds:
      bits.push_back(true);
      for (auto v : tree.preorder()) {
        bits.insert(bits.end(), tree.outdegree(v), true);
        bits.push_back(false);
      }
      break;
    case TreeEncoding::Bp: {
      // (node, next child index); a node closes once its children are done.
      std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
      bits.push_back(true);
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < tree.outdegree(v)) {
          auto c = tree.children(v)[next++];
          bits.push_back(true);
          stack.emplace_back(c, 0);
        } else {
          bits.push_back(false);
          stack.pop_back();
        }
      }
      break;
    }
  }
  return SuccinctTree(encoding, BitVector(bits), tree.size());
}

// First 0 at or after x.
std::uint64_t SuccinctTree::degree_run_end(std::uint64_t x) const {
  auto zeros_before = x > 1 ? bits_.rank(false, x - 1) : 0;
  return bits_.select(false, zeros_before + 1);
}

std::uint64_t SuccinctTree::outdegree(std::uint64_t x) const {
  if (encoding_ != TreeEncoding::Bp) return degree_run_end(x) - x;
  std::uint64_t deg = 0;
  for (auto y = x + 1; y <= bits_.size() && bits_[y]; y = bits_.findclose(y) + 1) ++deg;
  return deg;
}

bool SuccinctTree::is_leaf(std::uint64_t x) const {
  if (encoding_ == TreeEncoding::Bp) return !bits_[x + 1];
  return !bits_[x];
}

std::uint64_t SuccinctTree::child(std::uint64_t x, std::uint64_t i) const {
  auto fail = [&] {
    return NoSuchChild("position " + std::to_string(x) + " child " + std::to_string(i));
  };
  if (i < 1) throw fail();
  switch (encoding_) {
    case TreeEncoding::Louds: {
      if (i > outdegree(x)) throw fail();
      return bits_.select(false, bits_.rank(true, x) + i - 1) + 1;
    }
    case TreeEncoding::Dfuds: {
      auto end = degree_run_end(x);
      if (i > end - x) throw fail();
      return bits_.findclose(end - i) + 1;
    }
    case TreeEncoding::Bp: {
      auto y = x + 1;
      for (std::uint64_t k = 1;; ++k) {
        if (y > bits_.size() || !bits_[y]) throw fail();
        if (k == i) return y;
        y = bits_.findclose(y) + 1;
      }
    }
  }
  throw fail();
}

std::uint64_t SuccinctTree::ordinal(std::uint64_t x) const {
  switch (encoding_) {
    case TreeEncoding::Louds: return x == 1 ? 0 : bits_.rank(false, x - 1);
    case TreeEncoding::Dfuds: return x == 2 ? 0 : bits_.rank(false, x - 1);
    case TreeEncoding::Bp: return bits_.rank(true, x) - 1;
  }
  return 0;
}

std::uint64_t SuccinctTree::position(std::uint64_t ordinal) const {
  switch (encoding_) {
    case TreeEncoding::Louds: return ordinal == 0 ? 1 : bits_.select(false, ordinal) + 1;
    case TreeEncoding::Dfuds: return ordinal == 0 ? 2 : bits_.select(false, ordinal) + 1;
    case TreeEncoding::Bp: return bits_.select(true, ordinal + 1);
  }
  return 0;
}

}  // namespace dpt
