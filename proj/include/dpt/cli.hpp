#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpt/dpt_index.hpp"

namespace dpt::cli {

struct CostModel {
  double word_cost = 1.0;     // G
  double barrier_cost = 0.0;  // L
};

struct BuildOptions {
  std::size_t pe_count = 1;
  Position pmax = 30;
  TrieBacking backing = TrieBacking::Pointer;
  std::uint64_t label_batch = 0;
  unsigned position_bits = 40;
  CostModel cost;
};

struct QueryOptions {
  QueryKind kind = QueryKind::Count;
  std::uint64_t seed = 1;
  CostModel cost;
};

struct BenchOptions {
  std::vector<std::size_t> pe_counts{1, 2, 4, 8};
  std::uint64_t queries_per_pe = 100;
  QueryKind kind = QueryKind::Count;
  Position pmax = 30;
  std::vector<TrieBacking> backings{TrieBacking::Pointer};
  std::vector<Position> prune_lens{5};
  std::uint64_t seed = 1;
  unsigned position_bits = 40;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

/// Splits on '\n'. A trailing newline does not start another line.
std::vector<std::string> split_lines(const std::string& bytes);

/// Builds the index, writes it to out_path and reports the build ledger.
void cmd_build(const std::string& corpus_path, const std::string& out_path, const BuildOptions& opt, std::ostream& out);

/// One result line per query, then the query ledger and the per-PE histogram.
void cmd_query(const std::string& index_path, const std::string& queries_path, const QueryOptions& opt,
               std::ostream& out);

/// CSV with one row per (c, index, backing or prune length).
void cmd_bench(const std::string& corpus_path, const BenchOptions& opt, std::ostream& out);

/// "EXISTS true", "COUNT 3", "ENUM 1,5" or "ERROR reason".
std::string format_result(const QueryResult& r);

}  // namespace dpt::cli
