#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpt/bsp.hpp"
#include "dpt/global_trie.hpp"
#include "dpt/patricia.hpp"
#include "dpt/text.hpp"

namespace dpt {

enum class QueryKind : std::uint8_t { Exists, Count, Enumerate };

std::string_view to_string(QueryKind k);
std::optional<QueryKind> parse_query_kind(std::string_view name);

struct Query {
  QueryKind kind = QueryKind::Exists;
  std::string pattern;
  PeId arrival = 0;
};

struct QueryResult {
  QueryKind kind = QueryKind::Exists;
  std::optional<std::string> error;  // set when the query was rejected
  bool exists = false;
  std::uint64_t count = 0;
  std::vector<Position> positions;  // Enumerate, sorted
  std::uint64_t supersteps = 0;     // supersteps until the answer was known
  std::uint64_t words = 0;          // charged words attributable to this query
  std::uint64_t remote_chars = 0;   // verification characters fetched from other PEs

  bool ok() const { return !error.has_value(); }
};

struct BuildConfig {
  std::size_t pe_count = 1;
  Position pmax = 30;
  TrieBacking backing = TrieBacking::Pointer;
  std::uint64_t label_batch = 0;  // characters per PE per superstep; 0 = unlimited
  bool parallel = false;
  std::optional<std::vector<Position>> block_lengths;
};

/// Two-level index: a Patricia trie per SA block plus a replicated global
/// trie over the block boundaries, driven on a simulated BSP machine.
class DptIndex {
 public:
  DptIndex() = default;

  static DptIndex build(const Text& text, const BuildConfig& config);
  /// Same, with the suffix and LCP arrays already at hand.
  static DptIndex build(const Text& text, std::span<const Position> sa, std::span<const Position> lcp,
                        const BuildConfig& config);

  QueryResult query_exists(std::string_view p, PeId arrival);
  QueryResult query_count(std::string_view p, PeId arrival);
  QueryResult query_enumerate(std::string_view p, PeId arrival);
  /// All queries advance in lockstep; at most four supersteps in total.
  std::vector<QueryResult> query_batch(std::span<const Query> queries);

  std::size_t pe_count() const { return machine_.size(); }
  Position text_size() const { return machine_.text_size(); }
  Position pmax() const { return pmax_; }
  TrieBacking backing() const { return backing_; }
  std::uint64_t label_batch() const { return label_batch_; }

  Machine& machine() { return machine_; }
  const Machine& machine() const { return machine_; }
  const PatriciaTrie& trie(PeId pe) const { return tries_.at(pe); }
  const GlobalTrie& global_trie(PeId pe) const { return global_.at(pe); }
  /// Supersteps spent by build().
  std::size_t build_supersteps() const { return build_supersteps_; }

  /// Queries that arrived at each PE and query messages each PE received.
  std::vector<std::uint64_t> arrivals() const { return arrivals_; }
  std::vector<std::uint64_t> forwarded() const;

  /// Local tries plus SA, summed over PEs.
  TrieSpace space(unsigned position_bits = 40) const;

  std::string save() const;
  static DptIndex load(std::string_view bytes);

 private:
  Machine machine_;
  std::vector<PatriciaTrie> tries_;
  std::vector<GlobalTrie> global_;
  Position pmax_ = 30;
  TrieBacking backing_ = TrieBacking::Pointer;
  std::uint64_t label_batch_ = 0;
  std::size_t build_supersteps_ = 0;
  std::vector<std::uint64_t> arrivals_;
  std::uint64_t next_tag_ = 1;
};

}  // namespace dpt
