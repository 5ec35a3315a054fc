#include "dpt/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "dpt/dsa.hpp"
#include "dpt/errors.hpp"

namespace dpt::cli {

namespace {

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void print_ledger(const CostLedger& ledger, std::size_t from, const CostModel& cost, std::ostream& out) {
  out << "# ledger\n" << ledger.to_tsv(from);
  std::uint64_t words = 0;
  double total = 0;
  for (std::size_t k = from; k < ledger.entries().size(); ++k) {
    const auto& e = ledger.entries()[k];
    words += e.total_words();
    total += static_cast<double>(e.w) + static_cast<double>(e.h) * cost.word_cost + cost.barrier_cost;
  }
  out << "# cost\tsupersteps=" << ledger.supersteps() - from << "\twords=" << words << "\ttotal=" << fixed(total)
      << '\n';
}

PeId draw_pe(std::mt19937_64& rng, std::size_t c) { return static_cast<PeId>(rng() % c); }

// Substrings of the body; every second one has its last byte replaced so that
// absent patterns are part of the mix.
std::vector<std::string> sample_patterns(std::mt19937_64& rng, const std::string& body, std::size_t count,
                                         Position max_len) {
  std::vector<std::string> out;
  if (body.empty()) return out;
  Position longest = std::min<Position>({max_len, 16, body.size()});
  for (std::size_t k = 0; k < count; ++k) {
    Position len = 1 + rng() % longest;
    Position start = rng() % (body.size() - len + 1);
    std::string p = body.substr(start, len);
    if (k % 2 == 1) p.back() = body[rng() % body.size()];
    out.push_back(std::move(p));
  }
  return out;
}

struct PhaseStats {
  std::uint64_t supersteps = 0;
  std::uint64_t words = 0;
  std::uint64_t max_pe_words = 0;
};

struct Snapshot {
  std::size_t supersteps;
  std::vector<std::uint64_t> pe_words;
};

Snapshot snapshot(const Machine& m) {
  Snapshot s{m.ledger().supersteps(), {}};
  for (PeId p = 0; p < m.size(); ++p) s.pe_words.push_back(m.pe_words(p));
  return s;
}

PhaseStats since(const Machine& m, const Snapshot& before) {
  PhaseStats out;
  const auto& entries = m.ledger().entries();
  out.supersteps = entries.size() - before.supersteps;
  for (std::size_t k = before.supersteps; k < entries.size(); ++k) out.words += entries[k].total_words();
  for (PeId p = 0; p < m.size(); ++p) out.max_pe_words = std::max(out.max_pe_words, m.pe_words(p) - before.pe_words[p]);
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return s.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split_lines(const std::string& bytes) {
  std::vector<std::string> lines;
  std::size_t from = 0;
  while (from < bytes.size()) {
    auto nl = bytes.find('\n', from);
    if (nl == std::string::npos) nl = bytes.size();
    lines.push_back(bytes.substr(from, nl - from));
    from = nl + 1;
  }
  return lines;
}

std::string format_result(const QueryResult& r) {
  if (r.error) return "ERROR " + *r.error;
  switch (r.kind) {
    case QueryKind::Exists: return std::string("EXISTS ") + (r.exists ? "true" : "false");
    case QueryKind::Count: return "COUNT " + std::to_string(r.count);
    case QueryKind::Enumerate: {
      std::string s = "ENUM";
      for (std::size_t k = 0; k < r.positions.size(); ++k) s += (k == 0 ? " " : ",") + std::to_string(r.positions[k]);
      return s;
    }
  }
  return "ERROR unknown kind";
}

void cmd_build(const std::string& corpus_path, const std::string& out_path, const BuildOptions& opt, std::ostream& out) {
  auto text = Text::from_raw(read_file(corpus_path));
  BuildConfig cfg;
  cfg.pe_count = opt.pe_count;
  cfg.pmax = opt.pmax;
  cfg.backing = opt.backing;
  cfg.label_batch = opt.label_batch;
  auto idx = DptIndex::build(text, cfg);
  write_file(out_path, idx.save());

  out << "# build\tn=" << text.size() << "\tc=" << idx.pe_count() << "\tpmax=" << idx.pmax()
      << "\tbacking=" << to_string(idx.backing()) << "\tlabel_batch=" << idx.label_batch() << '\n';
  print_ledger(idx.machine().ledger(), 0, opt.cost, out);
  auto sp = idx.space(opt.position_bits);
  double n = static_cast<double>(std::max<Position>(text.size(), 1));
  out << "# space\tposition_bits=" << opt.position_bits << "\ttree=" << sp.tree_bits << "\tdepth=" << sp.depth_bits
      << "\tlabel=" << sp.label_bits << "\tsa=" << sp.sa_bits << "\tbits_per_char=" << fixed(sp.total() / n) << '\n';
}

void cmd_query(const std::string& index_path, const std::string& queries_path, const QueryOptions& opt,
               std::ostream& out) {
  auto idx = DptIndex::load(read_file(index_path));
  auto lines = split_lines(read_file(queries_path));
  std::mt19937_64 rng(opt.seed);
  std::vector<Query> batch;
  for (auto& line : lines) batch.push_back({opt.kind, std::move(line), draw_pe(rng, idx.pe_count())});
  const auto before = idx.machine().ledger().supersteps();
  auto results = idx.query_batch(batch);
  for (const auto& r : results) out << format_result(r) << '\n';
  print_ledger(idx.machine().ledger(), before, opt.cost, out);
  out << "# histogram\npe\tarrived\tforwarded\n";
  auto arrived = idx.arrivals();
  auto forwarded = idx.forwarded();
  for (PeId p = 0; p < idx.pe_count(); ++p) out << p << '\t' << arrived[p] << '\t' << forwarded[p] << '\n';
}

void cmd_bench(const std::string& corpus_path, const BenchOptions& opt, std::ostream& out) {
  const std::string body = read_file(corpus_path);
  auto text = Text::from_raw(body);
  auto sa = build_suffix_array(text);
  auto lcp = build_lcp_array(text, sa);
  const double n = static_cast<double>(std::max<Position>(text.size(), 1));

  out << "c,index,backing,supersteps,total_words,max_pe_words,remote_fetches,bits_per_char\n";
  for (auto c : opt.pe_counts) {
    std::mt19937_64 rng(opt.seed + c);
    auto patterns = sample_patterns(rng, body, c * opt.queries_per_pe, opt.pmax);
    std::vector<PeId> arrivals;
    for (std::size_t k = 0; k < patterns.size(); ++k) arrivals.push_back(draw_pe(rng, c));

    for (auto backing : opt.backings) {
      BuildConfig cfg;
      cfg.pe_count = c;
      cfg.pmax = opt.pmax;
      cfg.backing = backing;
      auto idx = DptIndex::build(text, sa, lcp, cfg);
      std::vector<Query> batch;
      for (std::size_t k = 0; k < patterns.size(); ++k) batch.push_back({opt.kind, patterns[k], arrivals[k]});
      auto before = snapshot(idx.machine());
      std::uint64_t remote = 0;
      if (!batch.empty()) {
        for (const auto& r : idx.query_batch(batch)) remote += r.remote_chars;
      }
      auto st = since(idx.machine(), before);
      out << c << ",dpt," << to_string(backing) << ',' << st.supersteps << ',' << st.words << ',' << st.max_pe_words
          << ',' << remote << ',' << fixed(idx.space(opt.position_bits).total() / n) << '\n';
    }

    for (auto ell : opt.prune_lens) {
      auto idx = DsaIndex::build(text, sa, lcp, DsaConfig{c, ell, false});
      std::vector<std::pair<std::string, PeId>> batch;
      for (std::size_t k = 0; k < patterns.size(); ++k) batch.emplace_back(patterns[k], arrivals[k]);
      auto before = snapshot(idx.machine());
      std::uint64_t remote = 0;
      if (!batch.empty()) {
        for (const auto& r : idx.count_batch(batch)) remote += r.stats.remote_chars;
      }
      auto st = since(idx.machine(), before);
      out << c << ",dsa,prune" << ell << ',' << st.supersteps << ',' << st.words << ',' << st.max_pe_words << ','
          << remote << ',' << fixed(static_cast<double>(idx.space_bits(opt.position_bits)) / n) << '\n';
    }
  }
}

}  // namespace dpt::cli
