#include <string_view>

#include "dpt/byte_io.hpp"
#include "dpt/dpt_index.hpp"
#include "dpt/errors.hpp"

namespace dpt {

namespace {

constexpr std::string_view kMagic = "DPTINDEX";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kIntegerWidth = 8;

}  // namespace

std::string DptIndex::save() const {
  ByteWriter w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kVersion);
  w.u8(kIntegerWidth);
  w.u8(kSentinel);
  w.u64(text_size());
  w.u64(pe_count());
  w.u64(pmax_);
  w.u8(static_cast<std::uint8_t>(backing_));
  w.u64(label_batch_);
  for (PeId p = 0; p < pe_count(); ++p) {
    w.u64(machine_.block_start(p));
    w.u64(machine_.block_length(p));
  }
  w.bytes(global_.front().serialize());
  for (PeId p = 0; p < pe_count(); ++p) {
    ByteWriter t;
    tries_[p].save(t);
    w.bytes(t.str());
    const auto& s = machine_.pe(p);
    w.words(s.sa_block);
    w.words(s.lcp_block);
    w.u64(s.text_begin);
    w.u64(s.text_block_len);
    w.bytes(s.text_slice);
  }
  return w.str();
}

DptIndex DptIndex::load(std::string_view bytes) {
  ByteReader r(bytes);
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw FormatError("not an index file");
  }
  if (auto v = r.u32(); v != kVersion) throw FormatError("unsupported version " + std::to_string(v));
  if (r.u8() != kIntegerWidth) throw FormatError("unsupported integer width");
  if (r.u8() != kSentinel) throw FormatError("unsupported sentinel value");
  DptIndex idx;
  Position n = r.u64();
  std::uint64_t c = r.u64();
  if (c == 0 || c > n + 1) throw FormatError("pe count");
  idx.pmax_ = r.u64();
  auto backing = r.u8();
  if (backing > static_cast<std::uint8_t>(TrieBacking::Bp)) throw FormatError("backing tag");
  idx.backing_ = static_cast<TrieBacking>(backing);
  idx.label_batch_ = r.u64();
  std::vector<std::pair<Position, Position>> table(c);
  for (auto& [start, len] : table) {
    start = r.u64();
    len = r.u64();
  }
  std::string gt_bytes = r.bytes();
  ByteReader gr(gt_bytes);
  auto gt = GlobalTrie::load(gr);
  if (gt.pe_count() != c) throw FormatError("global trie does not match the pe count");

  std::vector<PeState> pes(c);
  Position expected = 1;
  for (std::uint64_t p = 0; p < c; ++p) {
    std::string trie_bytes = r.bytes();
    ByteReader tr(trie_bytes);
    idx.tries_.push_back(PatriciaTrie::load(tr));
    auto& s = pes[p];
    s.id = static_cast<PeId>(p);
    s.sa_begin = table[p].first;
    s.sa_block = r.words();
    s.lcp_block = r.words();
    s.text_begin = r.u64();
    s.text_block_len = r.u64();
    s.text_slice = r.bytes();
    if (s.sa_begin != expected || s.sa_block.size() != table[p].second || s.lcp_block.size() != s.sa_block.size() ||
        s.text_begin != s.sa_begin || s.text_slice.size() < s.text_block_len) {
      throw FormatError("block table does not match pe " + std::to_string(p));
    }
    expected += table[p].second;
  }
  if (expected != n + 2) throw FormatError("blocks do not cover the text");
  if (r.remaining() != 0) throw FormatError("trailing bytes");
  idx.machine_ = Machine(std::move(pes), n);
  idx.global_.assign(c, gt);
  idx.arrivals_.assign(c, 0);
  return idx;
}

}  // namespace dpt
