#include "dpt/global_trie.hpp"

#include <algorithm>
#include <functional>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

struct Group {
  Position pos = 0;
  Position len = 0;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  Position lcp_prev = 0;  // truncated lcp against the previous group
};

std::uint8_t byte_at(std::string_view s, std::size_t i) { return static_cast<std::uint8_t>(s[i]); }

}  // namespace

std::string_view to_string(RoutingResult::Kind k) {
  switch (k) {
    case RoutingResult::Kind::Interval: return "Interval";
    case RoutingResult::Kind::Candidate: return "Candidate";
    case RoutingResult::Kind::Absent: return "Absent";
  }
  return "?";
}

Position block_common_prefix(std::span<const Position> sa_block, std::span<const Position> lcp_block,
                             Position text_size) {
  if (sa_block.empty()) throw OutOfRange("empty block");
  if (sa_block.size() == 1) return text_size + 1 - sa_block[0];
  return *std::min_element(lcp_block.begin() + 1, lcp_block.end());
}

BoundaryRecord boundary_record(const PeState& s, Position text_size) {
  BoundaryRecord r;
  r.min_pos = s.sa_block.front();
  r.max_pos = s.sa_block.back();
  r.seam_lcp = s.lcp_block.front();
  r.within_lcp = block_common_prefix(s.sa_block, s.lcp_block, text_size);
  return r;
}

Boundaries assemble_boundaries(std::span<const BoundaryRecord> records) {
  Boundaries b;
  for (std::size_t p = 0; p < records.size(); ++p) {
    b.pos.push_back(records[p].min_pos);
    b.lcp.push_back(p == 0 ? 0 : records[p].seam_lcp);
    b.pos.push_back(records[p].max_pos);
    b.lcp.push_back(records[p].within_lcp);
  }
  return b;
}

GlobalTrie GlobalTrie::plan(const Boundaries& b, Position pmax, Position text_size) {
  if (pmax == 0) throw OutOfRange("pmax must be at least 1");
  if (b.pos.empty() || b.pos.size() % 2 != 0 || b.lcp.size() != b.pos.size()) {
    throw OutOfRange("boundary arrays must hold 2c entries");
  }
  GlobalTrie gt;
  gt.pmax_ = pmax;
  gt.leaf_count_ = b.pos.size();

  std::vector<Group> groups;
  for (std::uint32_t k = 0; k < b.pos.size(); ++k) {
    if (b.pos[k] < 1 || b.pos[k] > text_size) throw OutOfRange("boundary position");
    Position len = std::min(pmax, text_size + 1 - b.pos[k]);
    if (k > 0) {
      Position t = std::min({b.lcp[k], len, groups.back().len});
      if (t == len && t == groups.back().len) {
        groups.back().hi = k;
        continue;
      }
      groups.push_back({b.pos[k], len, k, k, t});
    } else {
      groups.push_back({b.pos[k], len, k, k, 0});
    }
  }

  auto& nodes = gt.nodes_;
  // Node for groups [a, b] hanging below a node of depth parent_depth.
  std::function<std::uint32_t(std::size_t, std::size_t, Position)> make;
  auto split = [&](std::size_t a, std::size_t z, Position m) {
    std::vector<std::uint32_t> kids;
    std::size_t start = a;
    for (std::size_t k = a + 1; k <= z; ++k) {
      if (groups[k].lcp_prev == m) {
        kids.push_back(make(start, k - 1, m));
        start = k;
      }
    }
    kids.push_back(make(start, z, m));
    return kids;
  };
  auto min_lcp = [&](std::size_t a, std::size_t z) {
    Position m = groups[a + 1].lcp_prev;
    for (std::size_t k = a + 2; k <= z; ++k) m = std::min(m, groups[k].lcp_prev);
    return m;
  };
  make = [&](std::size_t a, std::size_t z, Position parent_depth) -> std::uint32_t {
    auto id = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    nodes[id].lo = groups[a].lo;
    nodes[id].hi = groups[z].hi;
    nodes[id].label_pos = groups[a].pos + parent_depth;
    if (a == z) {
      nodes[id].depth = groups[a].len;
      return id;
    }
    Position m = min_lcp(a, z);
    nodes[id].depth = m;
    auto kids = split(a, z, m);
    nodes[id].children = std::move(kids);
    return id;
  };

  nodes.emplace_back();
  nodes[0].lo = 0;
  nodes[0].hi = static_cast<std::uint32_t>(gt.leaf_count_ - 1);
  std::vector<std::uint32_t> root_kids;
  if (groups.size() == 1 || min_lcp(0, groups.size() - 1) > 0) {
    root_kids.push_back(make(0, groups.size() - 1, 0));
  } else {
    root_kids = split(0, groups.size() - 1, 0);
  }
  nodes[0].children = std::move(root_kids);
  return gt;
}

std::vector<std::pair<Position, Position>> GlobalTrie::label_requests() const {
  std::vector<Position> parent_depth(nodes_.size(), 0);
  for (const auto& v : nodes_) {
    for (auto c : v.children) parent_depth[c] = v.depth;
  }
  std::vector<std::pair<Position, Position>> out;
  for (std::size_t v = 1; v < nodes_.size(); ++v) out.emplace_back(nodes_[v].label_pos, nodes_[v].depth - parent_depth[v]);
  return out;
}

void GlobalTrie::attach_labels(std::span<const std::string> labels) {
  if (labels.size() + 1 != nodes_.size()) throw FormatError("label count does not match the trie");
  auto want = label_requests();
  for (std::size_t v = 1; v < nodes_.size(); ++v) {
    if (labels[v - 1].size() != want[v - 1].second) throw FormatError("label length does not match the trie");
    nodes_[v].label = labels[v - 1];
  }
}

GlobalTrie GlobalTrie::build_local(const Boundaries& b, Position pmax, const Text& text) {
  auto gt = plan(b, pmax, text.size_with_sentinel());
  std::vector<std::string> labels;
  for (auto [pos, len] : gt.label_requests()) labels.emplace_back(text.substr(pos, len));
  gt.attach_labels(labels);
  return gt;
}

RoutingResult GlobalTrie::below_left(std::uint32_t node) const {
  auto k = nodes_[node].lo;
  return k % 2 == 0 ? RoutingResult::absent() : RoutingResult::candidate(k / 2);
}

RoutingResult GlobalTrie::below_right(std::uint32_t node) const {
  auto k = nodes_[node].hi;
  return k % 2 == 0 ? RoutingResult::candidate(k / 2) : RoutingResult::absent();
}

RoutingResult GlobalTrie::route(std::string_view p, std::uint64_t* work) const {
  if (p.empty()) throw EmptyPattern("routing an empty pattern");
  if (p.size() > pmax_) {
    throw PatternTooLong("pattern of length " + std::to_string(p.size()) + " exceeds pmax " + std::to_string(pmax_));
  }
  if (p.find(static_cast<char>(kSentinel)) != std::string_view::npos) throw SentinelInInput("pattern");

  std::uint64_t steps = 0;
  auto matched = [&](std::uint32_t w) {
    const auto& n = nodes_[w];
    if (n.children.empty() && n.lo == n.hi) return RoutingResult::candidate(n.lo / 2);
    return RoutingResult::interval(n.lo / 2, n.hi / 2);
  };
  auto finish = [&](RoutingResult r) {
    if (work) *work += steps;
    return r;
  };

  std::uint32_t v = 0;
  std::size_t d = 0;
  while (true) {
    const auto& kids = nodes_[v].children;
    if (kids.empty()) return finish(below_right(v));
    std::uint8_t beta = byte_at(p, d);
    auto it = std::lower_bound(kids.begin(), kids.end(), beta,
                               [&](std::uint32_t c, std::uint8_t x) { return byte_at(nodes_[c].label, 0) < x; });
    ++steps;
    if (it == kids.end()) return finish(below_right(kids.back()));
    if (byte_at(nodes_[*it].label, 0) != beta) return finish(below_left(*it));
    std::uint32_t w = *it;
    const auto& label = nodes_[w].label;
    for (std::size_t j = 1; j < label.size() && d + j < p.size(); ++j) {
      ++steps;
      std::uint8_t a = byte_at(label, j), b = byte_at(p, d + j);
      if (a != b) return finish(a > b ? below_left(w) : below_right(w));
    }
    if (d + label.size() >= p.size()) return finish(matched(w));
    d += label.size();
    v = w;
  }
}

std::uint64_t GlobalTrie::label_volume() const {
  std::uint64_t total = 0;
  for (const auto& n : nodes_) total += n.label.size();
  return total;
}

void GlobalTrie::save(ByteWriter& out) const {
  out.u64(pmax_);
  out.u64(leaf_count_);
  out.u64(nodes_.size());
  for (const auto& n : nodes_) {
    out.u64(n.depth);
    out.u32(n.lo);
    out.u32(n.hi);
    out.u64(n.label_pos);
    out.bytes(n.label);
    out.u32(static_cast<std::uint32_t>(n.children.size()));
    for (auto c : n.children) out.u32(c);
  }
}

GlobalTrie GlobalTrie::load(ByteReader& in) {
  GlobalTrie gt;
  gt.pmax_ = in.u64();
  gt.leaf_count_ = in.u64();
  auto count = in.u64();
  if (count == 0 || count > in.remaining()) throw FormatError("global trie node count");
  gt.nodes_.resize(count);
  for (auto& n : gt.nodes_) {
    n.depth = in.u64();
    n.lo = in.u32();
    n.hi = in.u32();
    n.label_pos = in.u64();
    n.label = in.bytes();
    auto kids = in.u32();
    for (std::uint32_t i = 0; i < kids; ++i) {
      auto c = in.u32();
      if (c >= count) throw FormatError("global trie child id");
      n.children.push_back(c);
    }
    if (n.hi >= gt.leaf_count_ || n.lo > n.hi) throw FormatError("global trie leaf range");
  }
  return gt;
}

std::string GlobalTrie::serialize() const {
  ByteWriter w;
  save(w);
  return w.str();
}

std::vector<Boundaries> gather_boundaries(Machine& machine) {
  const Position text_size = machine.text_size() + 1;
  const std::size_t c = machine.size();
  machine.run_superstep("boundary broadcast", [&](PeContext& ctx) {
    auto r = boundary_record(ctx.state(), text_size);
    ctx.work(ctx.state().block_len());
    std::vector<std::uint64_t> words{r.min_pos, r.max_pos, r.seam_lcp, r.within_lcp};
    for (PeId q = 0; q < c; ++q) {
      if (q != ctx.id()) ctx.send(q, MessageKind::BoundaryBroadcast, encode_words(words));
    }
  });
  std::vector<Boundaries> views;
  for (PeId p = 0; p < c; ++p) {
    std::vector<BoundaryRecord> records(c);
    records[p] = boundary_record(machine.pe(p), text_size);
    for (const auto& m : machine.drain(p)) {
      auto w = decode_words(m.payload);
      records[m.src] = {w.at(0), w.at(1), w.at(2), w.at(3)};
    }
    views.push_back(assemble_boundaries(records));
  }
  return views;
}

std::vector<GlobalTrie> build_global_trie(Machine& machine, const std::vector<Boundaries>& views, Position pmax) {
  const std::size_t c = machine.size();
  const Position text_size = machine.text_size() + 1;
  std::vector<GlobalTrie> replicas(c);

  machine.run_superstep("label exchange: to collectors", [&](PeContext& ctx) {
    auto& gt = replicas[ctx.id()];
    gt = GlobalTrie::plan(views[ctx.id()], pmax, text_size);
    const auto& s = ctx.state();
    auto requests = gt.label_requests();
    std::vector<ByteWriter> out(c);
    std::vector<bool> used(c, false);
    for (std::uint32_t j = 0; j < requests.size(); ++j) {
      auto [pos, len] = requests[j];
      if (machine.text_owner(pos) != ctx.id()) continue;
      if (pos + len > s.text_begin + s.text_slice.size()) throw FetchOutOfSlice("label exceeds the padded slice");
      PeId collector = j % c;
      out[collector].u32(j);
      out[collector].bytes(std::string_view(s.text_slice).substr(pos - s.text_begin, len));
      used[collector] = true;
      ctx.work(len);
    }
    for (PeId q = 0; q < c; ++q) {
      if (used[q]) ctx.send(q, MessageKind::LabelExchange, out[q].str());
    }
  });

  machine.run_superstep("label exchange: broadcast", [&](PeContext& ctx) {
    std::string all;
    for (const auto& m : ctx.inbox()) all += m.payload;
    if (all.empty()) return;
    ctx.work(all.size());
    for (PeId q = 0; q < c; ++q) ctx.send(q, MessageKind::LabelExchange, all);
  });

  for (PeId p = 0; p < c; ++p) {
    auto& gt = replicas[p];
    std::vector<std::string> labels(gt.nodes().size() - 1);
    for (const auto& m : machine.drain(p)) {
      ByteReader r(m.payload);
      while (r.remaining() > 0) {
        auto j = r.u32();
        if (j >= labels.size()) throw FormatError("label index");
        labels[j] = r.bytes();
      }
    }
    gt.attach_labels(labels);
  }
  return replicas;
}

}  // namespace dpt
