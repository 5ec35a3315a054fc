#include "dpt/bit_vector.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

constexpr std::uint64_t kWordsPerSuper = 8;  // 512-bit superblocks
constexpr std::uint64_t kWordsPerGroup = 64;

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~0ULL : (1ULL << bits) - 1; }

// Offset of the k-th (1-based) set bit in w.
unsigned select_in_word(std::uint64_t w, std::uint64_t k) {
  for (unsigned off = 0; off < 64; ++off) {
    if ((w >> off) & 1U) {
      if (--k == 0) return off;
    }
  }
  return 64;
}

}  // namespace

BitVector::BitVector(const std::vector<bool>& bits) : size_(bits.size()) {
  words_.assign((size_ + 63) / 64, 0);
  for (std::uint64_t i = 0; i < size_; ++i) {
    if (bits[i]) words_[i >> 6] |= 1ULL << (i & 63);
  }
  build_support();
}

BitVector::BitVector(std::vector<std::uint64_t> words, std::uint64_t size)
    : words_(std::move(words)), size_(size) {
  if (words_.size() != (size_ + 63) / 64) throw FormatError("bit vector word count mismatch");
  if (size_ & 63) words_.back() &= low_mask(size_ & 63);
  build_support();
}

void BitVector::build_support() {
  const std::uint64_t nwords = words_.size();
  super_rank_.assign(nwords / kWordsPerSuper + 2, 0);
  ones_ = 0;
  for (std::uint64_t w = 0; w < nwords; ++w) {
    if (w % kWordsPerSuper == 0) super_rank_[w / kWordsPerSuper] = ones_;
    ones_ += std::popcount(words_[w]);
  }
  super_rank_[(nwords + kWordsPerSuper - 1) / kWordsPerSuper] = ones_;
  super_rank_.resize((nwords + kWordsPerSuper - 1) / kWordsPerSuper + 1);

  word_delta_.assign(nwords, 0);
  word_min_.assign(nwords, 0);
  for (std::uint64_t w = 0; w < nwords; ++w) {
    unsigned valid = (w + 1 == nwords && (size_ & 63)) ? (size_ & 63) : 64;
    int excess = 0, lowest = 64;
    for (unsigned b = 0; b < valid; ++b) {
      excess += ((words_[w] >> b) & 1U) ? 1 : -1;
      lowest = std::min(lowest, excess);
    }
    word_delta_[w] = static_cast<std::int8_t>(excess);
    word_min_[w] = static_cast<std::int8_t>(lowest);
  }
  const std::uint64_t ngroups = (nwords + kWordsPerGroup - 1) / kWordsPerGroup;
  group_delta_.assign(ngroups, 0);
  group_min_.assign(ngroups, 0);
  for (std::uint64_t g = 0; g < ngroups; ++g) {
    std::int32_t excess = 0, lowest = 1 << 20;
    for (std::uint64_t w = g * kWordsPerGroup; w < std::min(nwords, (g + 1) * kWordsPerGroup); ++w) {
      lowest = std::min<std::int32_t>(lowest, excess + word_min_[w]);
      excess += word_delta_[w];
    }
    group_delta_[g] = excess;
    group_min_[g] = lowest;
  }
}

std::uint64_t BitVector::support_bits() const {
  return 64 * super_rank_.size() + 8 * (word_delta_.size() + word_min_.size()) +
         32 * (group_delta_.size() + group_min_.size());
}

std::uint64_t BitVector::rank1_unchecked(std::uint64_t i) const {
  const std::uint64_t full_words = i >> 6;
  std::uint64_t r = super_rank_[full_words / kWordsPerSuper];
  for (std::uint64_t w = (full_words / kWordsPerSuper) * kWordsPerSuper; w < full_words; ++w) {
    r += std::popcount(words_[w]);
  }
  if (i & 63) r += std::popcount(words_[full_words] & low_mask(i & 63));
  return r;
}

std::uint64_t BitVector::rank(bool b, std::uint64_t i) const {
  if (i < 1 || i > size_) {
    throw OutOfRange("rank position " + std::to_string(i) + " of " + std::to_string(size_));
  }
  auto ones = rank1_unchecked(i);
  return b ? ones : i - ones;
}

std::uint64_t BitVector::select(bool b, std::uint64_t j) const {
  const std::uint64_t total = b ? ones_ : size_ - ones_;
  if (j < 1 || j > total) {
    throw OutOfRange("select rank " + std::to_string(j) + " of " + std::to_string(total));
  }
  auto count_before = [&](std::uint64_t s) {
    return b ? super_rank_[s] : s * kWordsPerSuper * 64 - super_rank_[s];
  };
  // Last superblock whose preceding count is < j.
  std::uint64_t lo = 0, hi = super_rank_.size() - 1;
  while (hi - lo > 1) {
    auto mid = (lo + hi) / 2;
    if (count_before(mid) < j) lo = mid; else hi = mid;
  }
  std::uint64_t remaining = j - count_before(lo);
  for (std::uint64_t w = lo * kWordsPerSuper; w < words_.size(); ++w) {
    std::uint64_t word = b ? words_[w] : ~words_[w];
    if (!b && w + 1 == words_.size() && (size_ & 63)) word &= low_mask(size_ & 63);
    auto pop = static_cast<std::uint64_t>(std::popcount(word));
    if (remaining <= pop) return w * 64 + select_in_word(word, remaining) + 1;
    remaining -= pop;
  }
  throw OutOfRange("select fell off the end");
}

std::uint64_t BitVector::findclose(std::uint64_t i) const {
  if (i < 1 || i > size_) throw OutOfRange("findclose position " + std::to_string(i));
  if (!(*this)[i]) throw NotOpen("position " + std::to_string(i) + " holds a closing bit");

  const std::uint64_t nwords = words_.size();
  std::int64_t rel = 1;
  auto scan_word = [&](std::uint64_t w, unsigned from) -> std::uint64_t {
    unsigned valid = (w + 1 == nwords && (size_ & 63)) ? (size_ & 63) : 64;
    for (unsigned b = from; b < valid; ++b) {
      rel += ((words_[w] >> b) & 1U) ? 1 : -1;
      if (rel == 0) return w * 64 + b + 1;
    }
    return 0;
  };

  std::uint64_t w = i >> 6;  // word of offset i, the bit after position i
  if (w < nwords) {
    if (auto hit = scan_word(w, i & 63)) return hit;
    ++w;
  }
  auto scan_words_until = [&](std::uint64_t end) -> std::uint64_t {
    for (; w < end; ++w) {
      if (rel + word_min_[w] <= 0) return scan_word(w, 0);
      rel += word_delta_[w];
    }
    return 0;
  };
  if (auto hit = scan_words_until(std::min(nwords, (w + kWordsPerGroup - 1) / kWordsPerGroup * kWordsPerGroup))) {
    return hit;
  }
  for (std::uint64_t g = w / kWordsPerGroup; g < group_delta_.size(); ++g) {
    if (rel + group_min_[g] <= 0) {
      w = g * kWordsPerGroup;
      if (auto hit = scan_words_until(std::min(nwords, w + kWordsPerGroup))) return hit;
      break;
    }
    rel += group_delta_[g];
  }
  throw Unbalanced("no closing match for position " + std::to_string(i));
}

PackedArray::PackedArray(std::uint64_t length, unsigned width)
    : words_((length * width + 63) / 64, 0), length_(length), width_(width) {}

PackedArray PackedArray::from(std::span<const std::uint64_t> values) {
  std::uint64_t top = 0;
  for (auto v : values) top = std::max(top, v);
  PackedArray out(values.size(), bit_width_for(top));
  for (std::uint64_t i = 0; i < values.size(); ++i) out.set(i, values[i]);
  return out;
}

std::uint64_t PackedArray::get(std::uint64_t i) const {
  if (width_ == 0) return 0;
  const std::uint64_t bit = i * width_;
  const std::uint64_t w = bit >> 6;
  const unsigned off = bit & 63;
  std::uint64_t v = words_[w] >> off;
  if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
  return v & low_mask(width_);
}

void PackedArray::set(std::uint64_t i, std::uint64_t value) {
  if (width_ == 0) return;
  value &= low_mask(width_);
  const std::uint64_t bit = i * width_;
  const std::uint64_t w = bit >> 6;
  const unsigned off = bit & 63;
  words_[w] = (words_[w] & ~(low_mask(width_) << off)) | (value << off);
  if (off + width_ > 64) {
    const unsigned spill = off + width_ - 64;
    words_[w + 1] = (words_[w + 1] & ~low_mask(spill)) | (value >> (64 - off));
  }
}

unsigned bit_width_for(std::uint64_t max_value) {
  return std::max(1U, static_cast<unsigned>(std::bit_width(max_value)));
}

}  // namespace dpt
