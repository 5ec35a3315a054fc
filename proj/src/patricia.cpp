#include "dpt/patricia.hpp"

#include <algorithm>
#include <string>

#include "dpt/errors.hpp"

namespace dpt {

std::string_view to_string(TrieBacking b) {
  switch (b) {
    case TrieBacking::Pointer: return "pointer";
    case TrieBacking::Louds: return "louds";
    case TrieBacking::Dfuds: return "dfuds";
    case TrieBacking::Bp: return "bp";
  }
  return "?";
}

std::optional<TrieBacking> parse_backing(std::string_view name) {
  for (auto b : {TrieBacking::Pointer, TrieBacking::Louds, TrieBacking::Dfuds, TrieBacking::Bp}) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

std::vector<std::uint8_t> LocalCharProvider::fetch(std::span<const Position> positions) {
  std::vector<std::uint8_t> out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(text_.at(p));
  requested_ += positions.size();
  return out;
}

std::vector<Position> PatriciaSkeleton::edge_positions() const {
  return std::vector<Position>(label_pos.begin() + 1, label_pos.end());
}

namespace {

void validate_block(std::span<const Position> sa, std::span<const Position> lcp, Position text_size) {
  if (sa.empty()) throw MalformedLcp("empty block");
  if (sa.size() != lcp.size()) throw MalformedLcp("SA and LCP blocks differ in length");
  auto suffix_len = [&](Position p) {
    if (p < 1 || p > text_size) throw MalformedLcp("SA value " + std::to_string(p) + " outside text");
    return text_size + 1 - p;
  };
  suffix_len(sa[0]);
  for (std::size_t k = 1; k < sa.size(); ++k) {
    if (lcp[k] >= std::min(suffix_len(sa[k - 1]), suffix_len(sa[k]))) {
      throw MalformedLcp("lcp[" + std::to_string(k) + "] = " + std::to_string(lcp[k]) +
                         " reaches past a suffix end");
    }
  }
}

struct ScanNode {
  Position depth;
  Position label_pos;
  bool leaf;
  std::vector<std::size_t> children;
};

}  // namespace

PatriciaSkeleton scan_patricia(std::span<const Position> sa, std::span<const Position> lcp,
                               Position text_size) {
  validate_block(sa, lcp, text_size);
  PatriciaSkeleton out;
  out.text_size = text_size;
  std::vector<ScanNode> nodes;
  nodes.push_back({0, 0, false, {}});
  auto new_leaf = [&](std::size_t k, Position parent_depth) {
    nodes.push_back({text_size + 1 - sa[k], sa[k] + parent_depth, true, {}});
    return nodes.size() - 1;
  };

  // Internal nodes on the rightmost path.
  std::vector<std::size_t> stack{0};
  out.pushes = 1;
  auto first_leaf = new_leaf(0, 0);
  nodes[0].children.push_back(first_leaf);
  for (std::size_t k = 1; k < sa.size(); ++k) {
    const Position l = lcp[k];
    while (nodes[stack.back()].depth > l) {
      stack.pop_back();
      ++out.pops;
    }
    const std::size_t v = stack.back();
    if (nodes[v].depth == l) {
      auto leaf = new_leaf(k, l);
      nodes[v].children.push_back(leaf);
      continue;
    }
    // Branch below v: w takes over v's rightmost child x and its edge.
    const std::size_t x = nodes[v].children.back();
    const Position w_label = nodes[x].label_pos;
    nodes[x].label_pos = sa[k - 1] + l;
    auto leaf = new_leaf(k, l);
    nodes.push_back({l, w_label, false, {x, leaf}});
    const std::size_t w = nodes.size() - 1;
    nodes[v].children.back() = w;
    stack.push_back(w);
    ++out.pushes;
    out.max_stack = std::max<std::uint64_t>(out.max_stack, stack.size());
  }
  out.pops += stack.size();
  out.max_stack = std::max<std::uint64_t>(out.max_stack, 1);

  // Renumber in preorder.
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  std::vector<std::size_t> dfs{0};
  while (!dfs.empty()) {
    auto v = dfs.back();
    dfs.pop_back();
    order.push_back(v);
    for (auto it = nodes[v].children.rbegin(); it != nodes[v].children.rend(); ++it) dfs.push_back(*it);
  }
  std::vector<std::size_t> rank_of(nodes.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = r;
  std::vector<std::vector<NodeId>> children(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& node = nodes[order[r]];
    for (auto c : node.children) children[r].push_back(rank_of[c]);
    out.depth.push_back(node.depth);
    out.label_pos.push_back(node.label_pos);
    out.leaf.push_back(node.leaf);
  }
  out.tree = PointerTree(children);
  return out;
}

namespace {

// One finalized node in DFUDS order; `next` links the chain.
struct ChainRecord {
  Position depth;
  Position label_pos;
  std::uint64_t degree;
  bool leaf;
  std::int64_t next;
};

struct Chain {
  std::int64_t head;
  std::int64_t tail;
};

struct OpenNode {
  Position depth;
  Position label_pos;
  std::vector<Chain> finished_children;
};

}  // namespace

PatriciaSkeleton scan_patricia_dfuds(std::span<const Position> sa, std::span<const Position> lcp,
                                     Position text_size) {
  validate_block(sa, lcp, text_size);
  PatriciaSkeleton out;
  out.text_size = text_size;
  std::vector<ChainRecord> records;
  records.reserve(2 * sa.size());

  auto leaf_chain = [&](std::size_t k, Position parent_depth) {
    records.push_back({text_size + 1 - sa[k], sa[k] + parent_depth, 0, true, -1});
    auto id = static_cast<std::int64_t>(records.size() - 1);
    return Chain{id, id};
  };
  // A node leaving the stack is final: its header goes in front of its
  // already finalized children.
  auto finalize = [&](OpenNode& node) {
    records.push_back({node.depth, node.label_pos, node.finished_children.size(), false, -1});
    auto id = static_cast<std::int64_t>(records.size() - 1);
    Chain chain{id, id};
    for (const auto& c : node.finished_children) {
      records[chain.tail].next = c.head;
      chain.tail = c.tail;
    }
    return chain;
  };

  std::vector<OpenNode> stack;
  stack.push_back({0, 0, {}});
  out.pushes = 1;
  stack.back().finished_children.push_back(leaf_chain(0, 0));
  for (std::size_t k = 1; k < sa.size(); ++k) {
    const Position l = lcp[k];
    while (stack.back().depth > l) {
      auto chain = finalize(stack.back());
      stack.pop_back();
      ++out.pops;
      stack.back().finished_children.push_back(chain);
    }
    auto& v = stack.back();
    if (v.depth == l) {
      v.finished_children.push_back(leaf_chain(k, l));
      continue;
    }
    Chain x = v.finished_children.back();
    v.finished_children.pop_back();
    const Position w_label = records[x.head].label_pos;
    records[x.head].label_pos = sa[k - 1] + l;
    OpenNode w{l, w_label, {x, leaf_chain(k, l)}};
    stack.push_back(std::move(w));
    ++out.pushes;
    out.max_stack = std::max<std::uint64_t>(out.max_stack, stack.size());
  }
  out.max_stack = std::max<std::uint64_t>(out.max_stack, 1);
  while (stack.size() > 1) {
    auto chain = finalize(stack.back());
    stack.pop_back();
    ++out.pops;
    stack.back().finished_children.push_back(chain);
  }
  Chain all = finalize(stack.back());
  ++out.pops;

  std::vector<bool> bits{true};
  bits.reserve(2 * records.size());
  for (auto r = all.head; r != -1; r = records[r].next) {
    const auto& rec = records[r];
    bits.insert(bits.end(), rec.degree, true);
    bits.push_back(false);
    out.depth.push_back(rec.depth);
    out.label_pos.push_back(rec.label_pos);
    out.leaf.push_back(rec.leaf);
  }
  out.dfuds = BitVector(bits);
  return out;
}

PatriciaTrie PatriciaTrie::assemble(const PatriciaSkeleton& skeleton, std::span<const std::uint8_t> edge_chars,
                                    std::span<const Position> sa, TrieBacking backing, BlockMeta meta) {
  const std::size_t count = skeleton.node_count();
  if (edge_chars.size() + 1 != count) throw MalformedLcp("edge character count mismatch");
  PatriciaTrie trie;
  trie.backing_ = backing;
  trie.meta_ = meta;
  trie.meta_.block_len = sa.size();
  trie.sa_.assign(sa.begin(), sa.end());
  trie.node_count_ = count;
  trie.text_size_ = skeleton.text_size;

  std::vector<NodeId> order(count);
  for (std::size_t v = 0; v < count; ++v) order[v] = v;

  if (skeleton.dfuds) {
    if (backing != TrieBacking::Dfuds) throw MalformedLcp("streamed skeleton only backs DFUDS");
    trie.topology_ = SuccinctTree(TreeEncoding::Dfuds, *skeleton.dfuds, count);
  } else if (backing == TrieBacking::Pointer) {
    trie.topology_ = skeleton.tree;
  } else {
    auto enc = static_cast<TreeEncoding>(static_cast<std::uint8_t>(backing));
    trie.topology_ = SuccinctTree::encode(skeleton.tree, enc);
    if (enc == TreeEncoding::Louds) order = skeleton.tree.level_order();
  }
  trie.finish_payload(skeleton, edge_chars, order);

  // Sibling first characters must be strictly increasing.
  std::vector<std::uint64_t> todo{trie.root()};
  while (!todo.empty()) {
    auto v = todo.back();
    todo.pop_back();
    const auto deg = trie.outdegree(v);
    int prev = -1;
    for (std::uint64_t i = 1; i <= deg; ++i) {
      auto c = trie.child(v, i);
      if (static_cast<int>(trie.first_char(c)) <= prev) {
        throw MalformedLcp("sibling edges out of order below a node of depth " +
                           std::to_string(trie.string_depth(v)));
      }
      prev = trie.first_char(c);
      if (!trie.is_leaf(c)) todo.push_back(c);
    }
  }
  return trie;
}

void PatriciaTrie::finish_payload(const PatriciaSkeleton& skeleton, std::span<const std::uint8_t> edge_chars,
                                  std::span<const NodeId> order) {
  const std::size_t count = order.size();
  std::vector<std::uint64_t> leaf_rank_pre(count, 0);
  for (std::size_t v = 0, r = 0; v < count; ++v) {
    if (skeleton.leaf[v]) leaf_rank_pre[v] = r++;
  }
  first_char_.resize(count);
  for (std::size_t ord = 0; ord < count; ++ord) {
    auto v = order[ord];
    first_char_[ord] = v == 0 ? 0 : edge_chars[v - 1];
  }
  if (backing_ == TrieBacking::Pointer) {
    depth_words_.assign(skeleton.depth.begin(), skeleton.depth.end());
    leaf_rank_words_ = leaf_rank_pre;
    return;
  }
  std::vector<bool> marks(count);
  std::vector<std::uint64_t> depths, louds_ranks;
  for (std::size_t ord = 0; ord < count; ++ord) {
    auto v = order[ord];
    marks[ord] = skeleton.leaf[v];
    if (skeleton.leaf[v]) {
      louds_ranks.push_back(leaf_rank_pre[v]);
    } else {
      depths.push_back(skeleton.depth[v]);
    }
  }
  leaf_marks_ = BitVector(marks);
  internal_depth_ = PackedArray(depths.size(), bit_width_for(text_size_));
  for (std::size_t i = 0; i < depths.size(); ++i) internal_depth_.set(i, depths[i]);
  if (backing_ == TrieBacking::Louds) {
    louds_leaf_rank_ = PackedArray(louds_ranks.size(), bit_width_for(sa_.size()));
    for (std::size_t i = 0; i < louds_ranks.size(); ++i) louds_leaf_rank_.set(i, louds_ranks[i]);
  }
}

std::uint64_t PatriciaTrie::root() const {
  if (auto* t = succinct()) return t->root();
  return 0;
}

std::uint64_t PatriciaTrie::outdegree(std::uint64_t node) const {
  if (auto* t = succinct()) return t->outdegree(node);
  return std::get<PointerTree>(topology_).outdegree(node);
}

std::uint64_t PatriciaTrie::child(std::uint64_t node, std::uint64_t i) const {
  if (auto* t = succinct()) return t->child(node, i);
  return std::get<PointerTree>(topology_).child(node, i);
}

bool PatriciaTrie::is_leaf(std::uint64_t node) const {
  if (auto* t = succinct()) return t->is_leaf(node);
  return std::get<PointerTree>(topology_).outdegree(node) == 0;
}

std::uint64_t PatriciaTrie::ordinal(std::uint64_t node) const {
  if (auto* t = succinct()) return t->ordinal(node);
  return node;
}

std::uint64_t PatriciaTrie::leaf_ordinal(std::uint64_t ord) const {
  return ord == 0 ? 0 : leaf_marks_.rank(true, ord);
}

std::uint8_t PatriciaTrie::first_char(std::uint64_t node) const { return first_char_[ordinal(node)]; }

Position PatriciaTrie::string_depth(std::uint64_t node) const {
  if (backing_ == TrieBacking::Pointer) return depth_words_[node];
  if (is_leaf(node)) return text_size_ + 1 - sa_[leaf_rank(node)];
  auto ord = ordinal(node);
  return internal_depth_.get(ord - leaf_ordinal(ord));
}

std::uint64_t PatriciaTrie::leaf_rank(std::uint64_t node) const {
  switch (backing_) {
    case TrieBacking::Pointer: return leaf_rank_words_[node];
    case TrieBacking::Louds: return louds_leaf_rank_.get(leaf_ordinal(ordinal(node)));
    default: return leaf_ordinal(ordinal(node));
  }
}

std::uint64_t PatriciaTrie::leftmost_leaf(std::uint64_t node) const {
  while (!is_leaf(node)) node = child(node, 1);
  return node;
}

std::uint64_t PatriciaTrie::rightmost_leaf(std::uint64_t node) const {
  while (!is_leaf(node)) node = child(node, outdegree(node));
  return node;
}

TrieSpace PatriciaTrie::space(unsigned position_bits) const {
  TrieSpace s;
  s.label_bits = 8 * first_char_.size();
  s.sa_bits = static_cast<std::uint64_t>(position_bits) * sa_.size();
  if (backing_ == TrieBacking::Pointer) {
    s.tree_bits = std::get<PointerTree>(topology_).structure_bits() + 64 * leaf_rank_words_.size();
    s.depth_bits = 64 * depth_words_.size();
    return s;
  }
  const auto& bits = succinct()->bits();
  s.tree_bits = bits.size() + bits.support_bits() + leaf_marks_.size() + leaf_marks_.support_bits() +
                louds_leaf_rank_.bit_size();
  s.depth_bits = internal_depth_.bit_size();
  return s;
}

namespace {

void save_bits(ByteWriter& out, const BitVector& bv) {
  out.u64(bv.size());
  out.words(bv.words());
}

BitVector load_bits(ByteReader& in) {
  auto size = in.u64();
  auto words = in.words();
  return BitVector(std::move(words), size);
}

void save_packed(ByteWriter& out, const PackedArray& a) {
  out.u32(a.width());
  out.u64(a.size());
  out.words(a.words());
}

PackedArray load_packed(ByteReader& in) {
  auto width = in.u32();
  auto size = in.u64();
  if (width > 64) throw FormatError("packed width");
  PackedArray a(size, width);
  auto words = in.words();
  if (words.size() != a.words().size()) throw FormatError("packed array length");
  a.words() = std::move(words);
  return a;
}

PointerTree decode_bp(const BitVector& bp) {
  std::vector<std::vector<NodeId>> children;
  std::vector<NodeId> stack;
  for (std::uint64_t p = 1; p <= bp.size(); ++p) {
    if (bp[p]) {
      NodeId id = children.size();
      children.emplace_back();
      if (!stack.empty()) children[stack.back()].push_back(id);
      stack.push_back(id);
    } else {
      if (stack.empty()) throw FormatError("unbalanced tree bits");
      stack.pop_back();
    }
  }
  if (!stack.empty() || children.empty()) throw FormatError("unbalanced tree bits");
  return PointerTree(children);
}

}  // namespace

void PatriciaTrie::save(ByteWriter& out) const {
  out.u8(static_cast<std::uint8_t>(backing_));
  out.u32(meta_.pe_id);
  out.u64(meta_.block_start);
  out.u64(meta_.block_len);
  out.u64(text_size_);
  out.u64(node_count_);
  out.words(sa_);
  out.bytes(std::string_view(reinterpret_cast<const char*>(first_char_.data()), first_char_.size()));
  if (backing_ == TrieBacking::Pointer) {
    save_bits(out, SuccinctTree::encode(std::get<PointerTree>(topology_), TreeEncoding::Bp).bits());
    out.words(depth_words_);
    out.words(leaf_rank_words_);
    return;
  }
  save_bits(out, succinct()->bits());
  save_bits(out, leaf_marks_);
  save_packed(out, internal_depth_);
  save_packed(out, louds_leaf_rank_);
}

PatriciaTrie PatriciaTrie::load(ByteReader& in) {
  PatriciaTrie t;
  auto tag = in.u8();
  if (tag > 3) throw FormatError("unknown trie backing tag " + std::to_string(tag));
  t.backing_ = static_cast<TrieBacking>(tag);
  t.meta_.pe_id = in.u32();
  t.meta_.block_start = in.u64();
  t.meta_.block_len = in.u64();
  t.text_size_ = in.u64();
  t.node_count_ = in.u64();
  t.sa_ = in.words();
  auto chars = in.bytes();
  t.first_char_.assign(chars.begin(), chars.end());
  if (t.first_char_.size() != t.node_count_ || t.sa_.size() != t.meta_.block_len) {
    throw FormatError("trie record sizes disagree");
  }
  if (t.backing_ == TrieBacking::Pointer) {
    t.topology_ = decode_bp(load_bits(in));
    t.depth_words_ = in.words();
    t.leaf_rank_words_ = in.words();
    if (std::get<PointerTree>(t.topology_).size() != t.node_count_) throw FormatError("node count");
    return t;
  }
  auto enc = static_cast<TreeEncoding>(tag);
  t.topology_ = SuccinctTree(enc, load_bits(in), t.node_count_);
  t.leaf_marks_ = load_bits(in);
  t.internal_depth_ = load_packed(in);
  t.louds_leaf_rank_ = load_packed(in);
  return t;
}

PatriciaTrie build_patricia(std::span<const Position> sa, std::span<const Position> lcp,
                            Position text_size, CharProvider& chars, TrieBacking backing, BlockMeta meta) {
  auto skeleton = scan_patricia(sa, lcp, text_size);
  auto edge_chars = chars.fetch(skeleton.edge_positions());
  return PatriciaTrie::assemble(skeleton, edge_chars, sa, backing, meta);
}

PatriciaTrie build_patricia_dfuds_streaming(std::span<const Position> sa, std::span<const Position> lcp,
                                            Position text_size, CharProvider& chars, BlockMeta meta) {
  auto skeleton = scan_patricia_dfuds(sa, lcp, text_size);
  auto edge_chars = chars.fetch(skeleton.edge_positions());
  return PatriciaTrie::assemble(skeleton, edge_chars, sa, TrieBacking::Dfuds, meta);
}

BlindSearchResult blind_search(const PatriciaTrie& trie, std::string_view pattern) {
  BlindSearchResult res;
  auto v = trie.root();
  const bool linear = trie.backing() == TrieBacking::Bp;
  while (!trie.is_leaf(v)) {
    ++res.work;
    const auto depth = trie.string_depth(v);
    if (depth >= pattern.size()) break;
    const auto want = static_cast<std::uint8_t>(pattern[depth]);
    const auto deg = trie.outdegree(v);
    std::optional<std::uint64_t> next;
    if (linear) {
      // BP reaches the i-th child in O(i) anyway.
      for (auto c = trie.child(v, 1);; ) {
        ++res.work;
        if (trie.first_char(c) == want) {
          next = c;
          break;
        }
        if (trie.first_char(c) > want) break;
        const auto& bits = trie.succinct()->bits();
        auto after = bits.findclose(c) + 1;
        if (after > bits.size() || !bits[after]) break;
        c = after;
      }
    } else {
      std::uint64_t lo = 1, hi = deg;
      while (lo <= hi) {
        ++res.work;
        auto mid = (lo + hi) / 2;
        auto c = trie.child(v, mid);
        auto ch = trie.first_char(c);
        if (ch == want) {
          next = c;
          break;
        }
        if (ch < want) lo = mid + 1; else hi = mid - 1;
      }
    }
    if (!next) {
      res.outcome = BlindSearchResult::Outcome::NoEdge;
      return res;
    }
    v = *next;
  }
  res.outcome = BlindSearchResult::Outcome::Matched;
  res.node = v;
  res.first_rank = trie.leaf_rank(trie.leftmost_leaf(v));
  res.last_rank = trie.leaf_rank(trie.rightmost_leaf(v));
  res.witness = trie.sa()[res.first_rank];
  return res;
}

bool verify_occurrence(std::string_view pattern, std::string_view fetched) { return pattern == fetched; }

std::uint64_t leaf_range_count(const BlindSearchResult& res) { return res.last_rank - res.first_rank + 1; }

}  // namespace dpt
