#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dpt {

/// Static bit vector with rank, select and findclose. Positions are 1-based.
/// A 1 bit reads as an opening parenthesis, a 0 bit as a closing one.
///
/// rank_b(i) counts b-bits in bits[1..i] inclusive.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(const std::vector<bool>& bits);
  BitVector(std::vector<std::uint64_t> words, std::uint64_t size);

  std::uint64_t size() const { return size_; }
  bool operator[](std::uint64_t pos) const {
    return (words_[(pos - 1) >> 6] >> ((pos - 1) & 63)) & 1U;
  }

  std::uint64_t rank(bool b, std::uint64_t i) const;
  std::uint64_t select(bool b, std::uint64_t j) const;
  std::uint64_t findclose(std::uint64_t i) const;

  std::uint64_t count_ones() const { return ones_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  /// Bits held by the support structures, excluding the raw bits.
  std::uint64_t support_bits() const;

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

 private:
  void build_support();
  std::uint64_t rank1_unchecked(std::uint64_t i) const;

  std::vector<std::uint64_t> words_;
  std::uint64_t size_ = 0;
  std::uint64_t ones_ = 0;

  // Cumulative ones before each 512-bit superblock.
  std::vector<std::uint64_t> super_rank_;

  // Excess summaries for findclose: per word the total excess change and the
  // minimum prefix excess; per 64-word group the same, relative to its start.
  std::vector<std::int8_t> word_delta_;
  std::vector<std::int8_t> word_min_;
  std::vector<std::int32_t> group_delta_;
  std::vector<std::int32_t> group_min_;
};

/// Fixed-width packed integer array.
class PackedArray {
 public:
  PackedArray() = default;
  PackedArray(std::uint64_t length, unsigned width);
  static PackedArray from(std::span<const std::uint64_t> values);

  std::uint64_t size() const { return length_; }
  unsigned width() const { return width_; }
  std::uint64_t get(std::uint64_t i) const;
  void set(std::uint64_t i, std::uint64_t value);
  std::uint64_t bit_size() const { return length_ * width_; }
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  friend bool operator==(const PackedArray&, const PackedArray&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t length_ = 0;
  unsigned width_ = 0;
};

/// Bits needed to store values in [0, max_value].
unsigned bit_width_for(std::uint64_t max_value);

}  // namespace dpt
