#include "dpt/text.hpp"

#include <algorithm>
#include <numeric>

#include "dpt/errors.hpp"

namespace dpt {

Text Text::from_raw(std::string_view raw) {
  if (auto at = raw.find(static_cast<char>(kSentinel)); at != std::string_view::npos) {
    throw SentinelInInput("reserved byte 0 at offset " + std::to_string(at));
  }
  Text t;
  t.bytes_.assign(raw.begin(), raw.end());
  t.bytes_.push_back(static_cast<char>(kSentinel));
  return t;
}

std::string_view Text::substr(Position pos, Position len) const {
  if (pos < 1 || pos > size_with_sentinel()) return {};
  len = std::min(len, size_with_sentinel() - pos + 1);
  return std::string_view(bytes_).substr(pos - 1, len);
}

namespace {

// One stable counting-sort pass of `in` by key(x) in [0, buckets).
template <typename Key>
void counting_sort(const std::vector<Position>& in, std::vector<Position>& out,
                   std::size_t buckets, Key key) {
  std::vector<Position> count(buckets + 1, 0);
  for (auto x : in) ++count[key(x) + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  for (auto x : in) out[count[key(x)]++] = x;
}

}  // namespace

// Prefix doubling with radix sort, O(n log n). Works on 0-based offsets and
// converts to 1-based positions at the end.
SuffixArray build_suffix_array(const Text& t) {
  const std::size_t m = t.size_with_sentinel();
  std::vector<Position> sa(m), tmp(m), rank(m), next_rank(m);
  for (std::size_t i = 0; i < m; ++i) {
    sa[i] = i;
    rank[i] = static_cast<std::uint8_t>(t.bytes()[i]);
  }
  std::size_t buckets = std::max<std::size_t>(257, m + 1);
  counting_sort(std::vector<Position>(sa), sa, buckets, [&](Position x) { return rank[x]; });

  for (std::size_t k = 1;; k <<= 1) {
    // Secondary key rank[i+k] (0 past the end, everything else shifted by 1).
    auto second = [&](Position x) { return x + k < m ? rank[x + k] + 1 : 0; };
    counting_sort(sa, tmp, buckets + 1, second);
    counting_sort(tmp, sa, buckets, [&](Position x) { return rank[x]; });

    next_rank[sa[0]] = 0;
    for (std::size_t i = 1; i < m; ++i) {
      auto a = sa[i - 1], b = sa[i];
      bool same = rank[a] == rank[b] && second(a) == second(b);
      next_rank[b] = next_rank[a] + (same ? 0 : 1);
    }
    rank.swap(next_rank);
    if (rank[sa[m - 1]] == m - 1) break;
  }
  for (auto& x : sa) ++x;
  return sa;
}

// Kasai et al.
LcpArray build_lcp_array(const Text& t, std::span<const Position> sa) {
  const std::size_t m = sa.size();
  LcpArray lcp(m, 0);
  std::vector<Position> inverse(m);
  for (std::size_t i = 0; i < m; ++i) inverse[sa[i] - 1] = i;
  const auto& s = t.bytes();
  Position h = 0;
  for (std::size_t pos = 0; pos < m; ++pos) {
    auto r = inverse[pos];
    if (r == 0) {
      h = 0;
      continue;
    }
    auto prev = sa[r - 1] - 1;
    while (pos + h < m && prev + h < m && s[pos + h] == s[prev + h]) ++h;
    lcp[r] = h;
    if (h > 0) --h;
  }
  return lcp;
}

Position lcp_pair(const Text& t, Position i, Position j) {
  const auto& s = t.bytes();
  const Position m = t.size_with_sentinel();
  Position k = 0;
  while (i + k <= m && j + k <= m && s[i + k - 1] == s[j + k - 1]) ++k;
  return k;
}

std::vector<Position> naive_occurrences(const Text& t, std::string_view pattern) {
  if (pattern.empty()) throw EmptyPattern("naive_occurrences");
  std::vector<Position> out;
  const std::string_view body(t.bytes().data(), t.size());
  for (std::size_t i = 0; i + pattern.size() <= body.size(); ++i) {
    if (body.compare(i, pattern.size(), pattern) == 0) out.push_back(i + 1);
  }
  return out;
}

}  // namespace dpt
