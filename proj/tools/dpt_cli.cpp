#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dpt/cli.hpp"
#include "dpt/errors.hpp"

using namespace dpt;

namespace {

TrieBacking backing_or_throw(const std::string& name) {
  auto b = parse_backing(name);
  if (!b) throw CLI::ValidationError("--backing", "expected pointer, louds, dfuds or bp");
  return *b;
}

QueryKind kind_or_throw(const std::string& name) {
  auto k = parse_query_kind(name);
  if (!k) throw CLI::ValidationError("--kind", "expected exists, count or enumerate");
  return *k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Patricia trie index on a simulated BSP machine"};
  app.require_subcommand(1);

  std::string backing = "pointer";
  std::string kind = "count";
  double word_cost = 1.0, barrier_cost = 0.0;

  cli::BuildOptions bo;
  std::string corpus, out_path;
  auto* build = app.add_subcommand("build", "Build an index file from a corpus");
  build->add_option("corpus", corpus, "Corpus file")->required();
  build->add_option("-o,--out", out_path, "Index file to write")->required();
  build->add_option("--pe-count", bo.pe_count, "Number of PEs")->check(CLI::PositiveNumber);
  build->add_option("--pmax", bo.pmax, "Longest supported pattern")->check(CLI::PositiveNumber);
  build->add_option("--backing", backing, "pointer, louds, dfuds or bp");
  build->add_option("--label-batch", bo.label_batch, "Label characters fetched per PE per superstep, 0 = all");
  build->add_option("--position-bits", bo.position_bits, "Bits per text position in the space report");
  build->add_option("--word-cost", word_cost, "G");
  build->add_option("--barrier-cost", barrier_cost, "L");

  cli::QueryOptions qo;
  std::string index_path, queries_path;
  auto* query = app.add_subcommand("query", "Run a query file against an index file");
  query->add_option("index", index_path, "Index file")->required();
  query->add_option("queries", queries_path, "One pattern per line")->required();
  query->add_option("--kind", kind, "exists, count or enumerate");
  query->add_option("--seed", qo.seed, "Seed for arrival PEs");
  query->add_option("--word-cost", word_cost, "G");
  query->add_option("--barrier-cost", barrier_cost, "L");

  cli::BenchOptions be;
  std::string bench_corpus;
  std::vector<std::string> backings{"pointer"};
  auto* bench = app.add_subcommand("bench", "Compare the DPT with the DSA baseline as CSV");
  bench->add_option("corpus", bench_corpus, "Corpus file")->required();
  bench->add_option("--pe-count", be.pe_counts, "PE counts, comma separated")->delimiter(',');
  bench->add_option("--queries-per-pe", be.queries_per_pe, "Queries per PE, 0 = build only");
  bench->add_option("--kind", kind, "exists, count or enumerate (DPT only)");
  bench->add_option("--pmax", be.pmax, "Longest supported pattern")->check(CLI::PositiveNumber);
  bench->add_option("--backing", backings, "Backings, comma separated")->delimiter(',');
  bench->add_option("--prune-len", be.prune_lens, "DSA prune lengths, comma separated")->delimiter(',');
  bench->add_option("--seed", be.seed, "Seed for patterns and arrival PEs");
  bench->add_option("--position-bits", be.position_bits, "Bits per text position");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      bo.backing = backing_or_throw(backing);
      bo.cost = {word_cost, barrier_cost};
      cli::cmd_build(corpus, out_path, bo, std::cout);
    } else if (*query) {
      qo.kind = kind_or_throw(kind);
      qo.cost = {word_cost, barrier_cost};
      cli::cmd_query(index_path, queries_path, qo, std::cout);
    } else if (*bench) {
      be.kind = kind_or_throw(kind);
      be.backings.clear();
      for (const auto& b : backings) be.backings.push_back(backing_or_throw(b));
      cli::cmd_bench(bench_corpus, be, std::cout);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
