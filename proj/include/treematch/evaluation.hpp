#pragma once
// Overlap scoring, exact small-instance maxima, and analytic baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "treematch/graph.hpp"
#include "treematch/rational.hpp"

namespace treematch {

// Number of vertex pairs {i, j} that are edges in g and whose images
// {pi(i), pi(j)} are edges in h. pi must be a bijection on 1..n.
inline long long overlap(const GraphSample& g, const GraphSample& h, const std::vector<int>& pi) {
  if (g.n != h.n)
    throw ConfigError("overlap: graphs must share a vertex count");
  if (static_cast<int>(pi.size()) != g.n + 1)
    throw ConfigError("overlap: pi must have size n+1 (1-indexed), got " +
                      std::to_string(pi.size()));
  std::vector<char> seen(static_cast<std::size_t>(g.n) + 1, 0);
  for (int v = 1; v <= g.n; ++v) {
    int w = pi[v];
    if (w < 1 || w > g.n || seen[w])
      throw ConfigError("overlap: pi is not a bijection on 1.." + std::to_string(g.n));
    seen[w] = 1;
  }
  // Iterate the sparser graph's edges; invert pi when that graph is h.
  long long count = 0;
  if (g.edge_count() <= h.edge_count()) {
    for (auto [i, j] : g.edges)
      if (h.edge_test(pi[i], pi[j])) ++count;
  } else {
    std::vector<int> inv(static_cast<std::size_t>(g.n) + 1, 0);
    for (int v = 1; v <= g.n; ++v) inv[pi[v]] = v;
    for (auto [i, j] : h.edges)
      if (g.edge_test(inv[i], inv[j])) ++count;
  }
  return count;
}

struct BruteResult {
  long long value = 0;
  std::vector<int> pi;  // lexicographically smallest maximizer, size n+1
};

// Exact maximum overlap over all n! bijections; n <= 9 only. Adjacency is
// held as per-vertex bitmasks so each permutation costs O(|E(g)|).
inline BruteResult brute_force_max(const GraphSample& g, const GraphSample& h) {
  if (g.n != h.n) throw ConfigError("brute_force_max: graphs must share a vertex count");
  if (g.n > 9)
    throw ConfigError("brute_force_max: n=" + std::to_string(g.n) +
                      " too large for exact search (max 9)");
  std::vector<std::uint32_t> hbits(static_cast<std::size_t>(g.n) + 1, 0);
  for (auto [i, j] : h.edges) {
    hbits[i] |= 1u << j;
    hbits[j] |= 1u << i;
  }
  std::vector<int> perm(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v) perm[v] = v + 1;
  BruteResult best;
  best.value = -1;
  do {
    long long val = 0;
    for (auto [i, j] : g.edges)
      if (hbits[perm[i - 1]] >> perm[j - 1] & 1) ++val;
    if (val > best.value) {
      best.value = val;
      best.pi.assign(static_cast<std::size_t>(g.n) + 1, 0);
      for (int v = 1; v <= g.n; ++v) best.pi[v] = perm[v - 1];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// log of ( n! * P[Bin(C(n,2), p^2) >= ceil(rho*n)] ): the first-moment upper
// bound on the number of bijections achieving overlap rho*n between two
// independent samples. Natural log; -inf when the target exceeds C(n,2).
// The tail sum runs in log space off the pmf at the threshold, with the
// ratio recurrence term_{k+1}/term_k = ((N-k)/(k+1)) * q/(1-q).
inline double first_moment_bound(int n, double p, double rho) {
  if (n < 1) throw ConfigError("first_moment_bound: n must be >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("first_moment_bound: p must lie strictly in (0,1)");
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw ConfigError("first_moment_bound: rho must be finite and >= 0");
  const long long N = static_cast<long long>(n) * (n - 1) / 2;
  const long long m = static_cast<long long>(std::ceil(rho * n));
  double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
  if (m <= 0) return log_nfact;  // tail probability is 1
  if (m > N) return -std::numeric_limits<double>::infinity();
  const double q = p * p;
  const double log_q = 2.0 * std::log(p);
  const double log_1mq = std::log1p(-q);
  double log_pmf_m = std::lgamma(static_cast<double>(N) + 1.0) -
                     std::lgamma(static_cast<double>(m) + 1.0) -
                     std::lgamma(static_cast<double>(N - m) + 1.0) +
                     static_cast<double>(m) * log_q + static_cast<double>(N - m) * log_1mq;
  // S = sum_{k=m}^{N} pmf(k)/pmf(m), accumulated until terms stop mattering.
  const double ratio_base = q / (1.0 - q);
  double term = 1.0, sum = 1.0;
  for (long long k = m; k < N; ++k) {
    term *= (static_cast<double>(N - k) / static_cast<double>(k + 1)) * ratio_base;
    sum += term;
    if (term < sum * 1e-30) break;
  }
  return log_nfact + log_pmf_m + std::log(sum);
}

// E[Overlap(pi)] for a uniformly random bijection between two independent
// samples: C(n,2) * p^2 (each pair maps to a uniform pair).
inline double expected_random_overlap(int n, double p) {
  if (n < 0) throw ConfigError("expected_random_overlap: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("expected_random_overlap: p must lie in [0,1]");
  return static_cast<double>(n) * (n - 1) / 2.0 * p * p;
}

struct ThresholdResult {
  std::vector<int> pi;  // size n+1
  long long hits = 0;   // sources matched by the common-neighbor rule
  long long overlap_value = 0;
};

// Degree-threshold baseline: identity on the seed block {1..floor(eta*n)},
// then each next unmatched source u goes to the smallest unused target
// sharing at least `threshold` matched neighbors with u (a target w counts
// a matched neighbor j of u when pi(j) is adjacent to w in h); if none
// qualifies, u takes the smallest unused target.
inline ThresholdResult threshold_matcher(const GraphSample& g, const GraphSample& h,
                                         int threshold, const Rational& eta) {
  if (g.n != h.n) throw ConfigError("threshold_matcher: graphs must share a vertex count");
  if (threshold < 1) throw ConfigError("threshold_matcher: threshold must be >= 1");
  const int n = g.n;
  long long m0 = rat_floor_ll(eta * n);
  if (m0 < 0 || m0 > n) throw ConfigError("threshold_matcher: eta*n out of range");
  ThresholdResult out;
  out.pi.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<char> src_matched(static_cast<std::size_t>(n) + 1, 0);
  std::vector<char> dst_used(static_cast<std::size_t>(n) + 1, 0);
  for (long long v = 1; v <= m0; ++v) {
    out.pi[v] = static_cast<int>(v);
    src_matched[v] = 1;
    dst_used[v] = 1;
  }
  std::vector<int> count(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> touched;
  int dst_cursor = 1;
  for (int u = static_cast<int>(m0) + 1; u <= n; ++u) {
    touched.clear();
    for (int j : g.neighbors(u)) {
      if (!src_matched[j]) continue;
      for (int w : h.neighbors(out.pi[j])) {
        if (dst_used[w]) continue;
        if (count[w]++ == 0) touched.push_back(w);
      }
    }
    int target = 0;
    std::sort(touched.begin(), touched.end());
    for (int w : touched)
      if (count[w] >= threshold) {
        target = w;
        break;
      }
    if (target) {
      ++out.hits;
    } else {
      while (dst_used[dst_cursor]) ++dst_cursor;
      target = dst_cursor;
    }
    out.pi[u] = target;
    src_matched[u] = 1;
    dst_used[target] = 1;
    for (int w : touched) count[w] = 0;
  }
  out.overlap_value = overlap(g, h, out.pi);
  return out;
}

}  // namespace treematch
