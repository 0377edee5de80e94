#pragma once
// Random-graph sampling and edge-list I/O. Vertices are 1-indexed. Samples
// are reproducible across platforms: the generator is mt19937_64 with
// hand-rolled uniform doubles, never std::uniform_real_distribution (whose
// output is implementation-defined).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "treematch/rational.hpp"

namespace treematch {

struct GraphSample {
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> edges;  // (i, j) with i < j, lex sorted
  std::vector<std::vector<int>> adj;       // adj[v] sorted ascending

  long long edge_count() const { return static_cast<long long>(edges.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj[v]; }

  // True iff {i, j} is an edge. Self-pairs are never edges. Out-of-range
  // vertices are a caller bug and throw.
  bool edge_test(int i, int j) const {
    if (i < 1 || i > n || j < 1 || j > n)
      throw std::out_of_range("edge_test: vertex out of range 1.." + std::to_string(n) +
                              ": (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i == j) return false;
    const std::vector<int>& a = adj[degree(i) <= degree(j) ? i : j];
    int other = degree(i) <= degree(j) ? j : i;
    return std::binary_search(a.begin(), a.end(), other);
  }
};

// Uniform double in [0, 1) with 53 random bits; portable across libstdc++,
// libc++ and MSVC unlike the std distributions.
inline double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

inline GraphSample finish_graph(int n, double p, std::uint64_t seed,
                                std::vector<std::pair<int, int>> edges) {
  GraphSample g;
  g.n = n;
  g.p = p;
  g.seed = seed;
  std::sort(edges.begin(), edges.end());
  g.edges = std::move(edges);
  g.adj.assign(static_cast<std::size_t>(n) + 1, {});
  for (auto [i, j] : g.edges) {
    g.adj[i].push_back(j);
    g.adj[j].push_back(i);
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  return g;
}

}  // namespace detail

// Samples each of the C(n,2) vertex pairs independently with probability p,
// visiting only the successes via geometric jumps: O(n + |E|) time. Pairs are
// ranked row-major ((1,2),(1,3),...,(2,3),...) and the cursor arithmetic is
// all-integer, so results are bit-stable.
inline GraphSample sample_er(int n, double p, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_er: n must be >= 1, got " + std::to_string(n));
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("sample_er: p must lie strictly in (0,1), got " + std::to_string(p));
  std::mt19937_64 rng(seed);
  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  const double log_skip_base = std::log1p(-p);  // < 0
  std::vector<std::pair<int, int>> edges;
  long long t = -1;
  int row = 1, col = 2;        // pair at rank 0
  long long cursor_rank = 0;   // rank of (row, col)
  while (true) {
    double u = canonical_double(rng);
    double jump = std::floor(std::log1p(-u) / log_skip_base);
    if (!(jump >= 0) || jump >= static_cast<double>(total)) break;  // beyond the last pair
    t += 1 + static_cast<long long>(jump);
    if (t >= total) break;
    // Advance the (row, col) cursor by t - cursor_rank positions, row-major.
    long long delta = t - cursor_rank;
    cursor_rank = t;
    while (delta > 0) {
      long long room = n - col;  // positions left in this row beyond col
      if (delta <= room) {
        col += static_cast<int>(delta);
        delta = 0;
      } else {
        delta -= room + 1;
        ++row;
        col = row + 1;
      }
    }
    edges.emplace_back(row, col);
  }
  return detail::finish_graph(n, p, seed, std::move(edges));
}

// Builds a GraphSample from an explicit edge list (validated).
inline GraphSample graph_from_edges(int n, std::vector<std::pair<int, int>> edges,
                                    double p = 0.0, std::uint64_t seed = 0) {
  if (n < 0) throw ConfigError("graph_from_edges: negative n");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (auto [i, j] : edges) {
    if (i < 1 || j < 1 || i > n || j > n || i >= j)
      throw ConfigError("graph_from_edges: bad edge (" + std::to_string(i) + "," +
                        std::to_string(j) + ") for n=" + std::to_string(n));
    std::uint64_t key = static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint32_t>(j);
    if (!seen.insert(key).second)
      throw ConfigError("graph_from_edges: duplicate edge (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
  }
  return detail::finish_graph(n, p, seed, std::move(edges));
}

// Text format: one header line "n m", then m lines "i j" with 1 <= i < j <= n,
// LF-terminated. write_edge_list emits edges lexicographically sorted.
inline void write_edge_list(const GraphSample& g, std::ostream& out) {
  out << g.n << ' ' << g.edge_count() << '\n';
  for (auto [i, j] : g.edges) out << i << ' ' << j << '\n';
  if (!out) throw std::runtime_error("write_edge_list: stream write failed");
}

inline void write_edge_list(const GraphSample& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_edge_list: cannot open '" + path + "'");
  write_edge_list(g, out);
}

inline GraphSample read_edge_list(std::istream& in, const std::string& origin = "<stream>") {
  auto fail = [&](long long line, const std::string& what) -> void {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  long long lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ConfigError(origin + ": empty edge-list input");
  long long n = 0, m = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> n >> m) || (hdr >> extra))
      fail(lineno, "expected header 'n m', got '" + line + "'");
    if (n < 0 || m < 0) fail(lineno, "negative counts in header");
    if (n > 100000000) fail(lineno, "vertex count too large");
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  for (long long e = 0; e < m; ++e) {
    if (!next_line()) fail(lineno, "expected " + std::to_string(m) + " edges, got " +
                                       std::to_string(e));
    std::istringstream row(line);
    long long i = 0, j = 0;
    std::string extra;
    if (!(row >> i >> j) || (row >> extra))
      fail(lineno, "expected 'i j', got '" + line + "'");
    if (i < 1 || i > n || j < 1 || j > n)
      fail(lineno, "vertex out of range 1.." + std::to_string(n) + " in '" + line + "'");
    if (i >= j) fail(lineno, "edges must satisfy i < j, got '" + line + "'");
    std::uint64_t key = static_cast<std::uint64_t>(i) << 32 | static_cast<std::uint64_t>(j);
    if (!seen.insert(key).second) fail(lineno, "duplicate edge '" + line + "'");
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  if (next_line()) fail(lineno, "trailing content after " + std::to_string(m) + " edges");
  return detail::finish_graph(static_cast<int>(n), 0.0, 0, std::move(edges));
}

inline GraphSample read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_edge_list: cannot open '" + path + "'");
  return read_edge_list(in, path);
}

}  // namespace treematch
