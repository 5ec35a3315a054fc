#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpt/bsp.hpp"
#include "dpt/text.hpp"

namespace dpt {

struct DsaConfig {
  std::size_t pe_count = 1;
  Position prune_len = 5;
  bool parallel = false;
};

struct FetchStats {
  std::uint64_t remote_chars = 0;  // text characters fetched from other PEs for comparisons
  std::uint64_t text_fetches = 0;  // DRMA text requests, local ones included
  std::uint64_t probes = 0;        // suffix comparisons
  std::uint64_t supersteps = 0;    // until the count was known
  std::uint64_t words = 0;
};

struct DsaResult {
  std::uint64_t count = 0;
  FetchStats stats;
};

/// Distributed suffix array with a two-level binary search and optional
/// pruned suffixes stored next to each SA entry.
class DsaIndex {
 public:
  static DsaIndex build(const Text& text, const DsaConfig& config);
  static DsaIndex build(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                        const DsaConfig& config);

  DsaResult count(std::string_view pattern, PeId arrival);
  /// Binary searches of all queries advance in lockstep. Throws EmptyPattern.
  std::vector<DsaResult> count_batch(std::span<const std::pair<std::string, PeId>> queries);

  Position prune_len() const { return prune_len_; }
  std::size_t build_supersteps() const { return build_supersteps_; }
  Machine& machine() { return machine_; }
  const Machine& machine() const { return machine_; }

  /// SA entries plus the pruned store, in bits.
  std::uint64_t space_bits(unsigned position_bits = 40) const;

 private:
  Machine machine_;
  Position prune_len_ = 0;
  std::size_t build_supersteps_ = 0;
  std::uint64_t next_tag_ = 1;
};

}  // namespace dpt
