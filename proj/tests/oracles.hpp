#pragma once

// Test-only reference implementations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dpt/succinct_tree.hpp"
#include "dpt/text.hpp"

namespace dpt::oracle {

/// Comparison sort of all suffixes, 1-based positions.
inline std::vector<Position> naive_suffix_sort(const Text& t) {
  std::vector<Position> sa(t.size_with_sentinel());
  for (Position i = 0; i < sa.size(); ++i) sa[i] = i + 1;
  std::string_view s(t.bytes());
  std::sort(sa.begin(), sa.end(), [&](Position a, Position b) { return s.substr(a - 1) < s.substr(b - 1); });
  return sa;
}

/// Character-by-character lcp of the suffixes at 1-based i and j.
inline Position naive_lcp(const Text& t, Position i, Position j) {
  std::string_view s(t.bytes());
  auto a = s.substr(i - 1), b = s.substr(j - 1);
  Position k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  return k;
}

/// Sliding window over the body (sentinel excluded).
inline std::vector<Position> scan_occurrences(const Text& t, std::string_view p) {
  std::vector<Position> out;
  std::string_view body(t.bytes().data(), t.size());
  if (p.empty() || p.size() > body.size()) return out;
  for (std::size_t i = 0; i + p.size() <= body.size(); ++i) {
    if (body.substr(i, p.size()) == p) out.push_back(i + 1);
  }
  return out;
}

/// Random body over the first sigma non-sentinel byte values.
inline std::string random_body(std::mt19937_64& rng, std::size_t n, unsigned sigma, char base = 'a') {
  std::string s(n, ' ');
  if (sigma >= 255) {
    std::uniform_int_distribution<int> d(1, 255);
    for (auto& c : s) c = static_cast<char>(d(rng));
  } else {
    std::uniform_int_distribution<int> d(0, static_cast<int>(sigma) - 1);
    for (auto& c : s) c = static_cast<char>(base + d(rng));
  }
  return s;
}

/// Mix of substrings of the body (present) and random strings (mostly absent).
inline std::vector<std::string> random_patterns(std::mt19937_64& rng, const std::string& body, std::size_t count,
                                                std::size_t max_len, unsigned sigma) {
  std::vector<std::string> out;
  std::uniform_int_distribution<std::size_t> len_d(1, max_len);
  for (std::size_t i = 0; i < count; ++i) {
    auto len = len_d(rng);
    if (i % 2 == 0 && !body.empty()) {
      len = std::min(len, body.size());
      std::uniform_int_distribution<std::size_t> at(0, body.size() - len);
      out.push_back(body.substr(at(rng), len));
    } else {
      out.push_back(random_body(rng, len, sigma));
    }
  }
  return out;
}

/// Random ordered tree: node k > 0 hangs below a uniformly chosen earlier node.
inline PointerTree random_tree(std::mt19937_64& rng, std::size_t nodes) {
  std::vector<std::vector<NodeId>> children(nodes);
  for (std::size_t k = 1; k < nodes; ++k) {
    std::uniform_int_distribution<std::size_t> d(0, k - 1);
    children[d(rng)].push_back(k);
  }
  return PointerTree(children);
}

/// Parenthesis matching by explicit stack; 1-based positions, 0 when unmatched.
inline std::vector<std::uint64_t> match_parens(const std::vector<bool>& bits) {
  std::vector<std::uint64_t> match(bits.size() + 1, 0), stack;
  for (std::uint64_t p = 1; p <= bits.size(); ++p) {
    if (bits[p - 1]) {
      stack.push_back(p);
    } else if (!stack.empty()) {
      match[stack.back()] = p;
      match[p] = stack.back();
      stack.pop_back();
    }
  }
  return match;
}

inline std::string bit_string(const std::vector<bool>& bits) {
  std::string s;
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline std::vector<bool> parse_bits(std::string_view s) {
  std::vector<bool> out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

}  // namespace dpt::oracle
