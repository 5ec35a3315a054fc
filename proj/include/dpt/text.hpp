#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpt {

/// Text positions, suffix-array entries and string depths. All public
/// contracts are 1-based: T[1..n+1] with T[n+1] the sentinel. Containers
/// are 0-based, so sa[k] holds SA[k+1]; Text::at() is the only place that
/// translates a 1-based position into a storage offset.
using Position = std::uint64_t;

inline constexpr std::uint8_t kSentinel = 0;

class Text {
 public:
  Text() : bytes_(1, kSentinel) {}

  /// Appends the sentinel. Throws SentinelInInput if raw contains it.
  static Text from_raw(std::string_view raw);

  /// Number of characters excluding the sentinel.
  Position size() const { return bytes_.size() - 1; }
  /// n + 1.
  Position size_with_sentinel() const { return bytes_.size(); }

  /// Character at 1-based position pos (1 <= pos <= n+1).
  std::uint8_t at(Position pos) const { return static_cast<std::uint8_t>(bytes_[pos - 1]); }

  /// Characters T[pos..pos+len-1], clipped at the sentinel.
  std::string_view substr(Position pos, Position len) const;

  /// Suffix length including the sentinel.
  Position suffix_length(Position pos) const { return size() + 2 - pos; }

  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

using SuffixArray = std::vector<Position>;
using LcpArray = std::vector<Position>;

SuffixArray build_suffix_array(const Text& t);
LcpArray build_lcp_array(const Text& t, std::span<const Position> sa);

/// Length of the longest common prefix of the suffixes at i and j.
Position lcp_pair(const Text& t, Position i, Position j);

/// Sliding-window scan. Throws EmptyPattern for an empty pattern.
std::vector<Position> naive_occurrences(const Text& t, std::string_view pattern);

}  // namespace dpt
