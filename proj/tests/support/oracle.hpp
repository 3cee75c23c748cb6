#pragma once

// Brute-force reference implementations kept independent of the library
// code paths they check: set-based Jaccard and BFS connected components
// instead of sorted-vector merging and union-find.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "corpusforge/doc_id.hpp"
#include "corpusforge/minhash.hpp"

namespace testsupport {

inline double oracle_jaccard(const corpusforge::ShingleSet& a, const corpusforge::ShingleSet& b) {
  std::set<std::uint64_t> sa(a.hashes.begin(), a.hashes.end());
  std::set<std::uint64_t> sb(b.hashes.begin(), b.hashes.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (std::uint64_t v : sa) inter += sb.count(v);
  std::size_t uni = sa.size() + sb.size() - inter;
  return double(inter) / double(uni);
}

/// O(n^2) threshold clustering: connect every pair with Jaccard >= threshold
/// (optionally restricted to a candidate list), then take BFS components.
/// Returns clusters sorted internally and by their minimum doc id.
inline std::vector<std::vector<corpusforge::DocId>> oracle_clusters(
    const std::vector<corpusforge::DocId>& docs, const std::vector<corpusforge::ShingleSet>& shingles,
    double threshold) {
  const std::size_t n = docs.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (oracle_jaccard(shingles[i], shingles[j]) >= threshold) {
        adj[i].push_back(static_cast<std::uint32_t>(j));
        adj[j].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  std::vector<bool> visited(n, false);
  std::vector<std::vector<corpusforge::DocId>> out;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::vector<corpusforge::DocId> cluster;
    std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
    visited[start] = true;
    while (!queue.empty()) {
      std::uint32_t cur = queue.front();
      queue.pop_front();
      cluster.push_back(docs[cur]);
      for (std::uint32_t next : adj[cur]) {
        if (!visited[next]) {
          visited[next] = true;
          queue.push_back(next);
        }
      }
    }
    std::sort(cluster.begin(), cluster.end());
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

/// All (i, j) pairs, i < j — exhaustive candidates for oracle-equivalence runs.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  out.reserve(n * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

}  // namespace testsupport
