#pragma once
// Greedy tree matching between two graphs on the same vertex set [n].
//
// State: a partial injection pi from matched sources M to used targets.
// Each step takes the smallest unmatched source u and searches for a copy of
// the template tree in the first graph whose root is u, whose other internal
// positions use unmatched sources, and whose leaves use matched sources that
// have not been reused kappa0 times. Candidate leaf tuples are ranked by a
// seeded pseudorandom priority; for each, the second graph is searched for a
// copy anchored at the pi-images of those leaves with internal positions on
// unused targets, taking the priority-minimal internal tuple. The first leaf
// tuple that admits one wins: pi maps the source copy onto the target copy
// coordinate by coordinate, contributing zeta overlapping edges. If no tuple
// works, u is matched to the smallest unused target. The loop stops once
// fewer than eta*n sources remain; the tail is matched ascending-to-ascending.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treematch/graph.hpp"
#include "treematch/priority.hpp"
#include "treematch/tree.hpp"

namespace treematch {

struct StepRecord {
  long long s = 0;  // 1-based step index
  int u = 0;        // pivot: smallest unmatched source this step
  bool success = false;
  std::vector<int> mt_leaves;  // leaf tuple (source vertices), leaf-position order
  std::vector<int> mt_src;     // internal tuple in the first graph, mt_src[0] == u
  std::vector<int> mt_dst;     // internal tuple in the second graph
  long long cand_size = 0;     // distinct candidate leaf tuples
  long long explored = 0;      // candidates whose target-side search ran
  long long failed = 0;        // candidates whose target-side search failed
  long long embeddings = 0;    // embeddings enumerated this step, both sides
  bool cap_hit = false;        // some enumeration this step was truncated
};

struct MatchState {
  int n = 0;
  std::vector<int> pi;            // pi[v] in 1..n, 0 = unassigned; pi[0] unused
  std::vector<char> src_matched;  // v in M
  std::vector<char> dst_used;     // w in pi(M)
  std::vector<long long> usage;   // times v appeared in a matched triple
  long long matched = 0;          // |M|
  long long step = 0;
  long long m0 = 0;  // identity-seeded prefix size
  int src_cursor = 1, dst_cursor = 1;
  Rational eta;
  long long kappa0 = 0;
  std::uint64_t order_seed = 0;
};

// Seeds pi with the identity on {1..floor(eta*n)} and validates sizes: the
// seed block must cover the tree's leaves and leave room for its internals.
inline MatchState init_state(const TreeTemplate& tree, const ParamSet& params, int n,
                             std::uint64_t order_seed) {
  if (n < 1) throw ConfigError("init_state: n must be >= 1");
  long long m0 = rat_floor_ll(params.eta * n);
  if (m0 < tree.xi)
    throw ConfigError("init_state: seed block floor(eta*n)=" + std::to_string(m0) +
                      " is smaller than the tree's leaf count xi=" + std::to_string(tree.xi) +
                      "; increase n (or eta)");
  if (n < m0 + tree.chi)
    throw ConfigError("init_state: n=" + std::to_string(n) + " leaves fewer than chi=" +
                      std::to_string(tree.chi) + " sources outside the seed block; increase n");
  MatchState st;
  st.n = n;
  st.pi.assign(static_cast<std::size_t>(n) + 1, 0);
  st.src_matched.assign(static_cast<std::size_t>(n) + 1, 0);
  st.dst_used.assign(static_cast<std::size_t>(n) + 1, 0);
  st.usage.assign(static_cast<std::size_t>(n) + 1, 0);
  for (long long v = 1; v <= m0; ++v) {
    st.pi[v] = static_cast<int>(v);
    st.src_matched[v] = 1;
    st.dst_used[v] = 1;
  }
  st.matched = m0;
  st.m0 = m0;
  st.src_cursor = static_cast<int>(m0 + 1);
  st.dst_cursor = static_cast<int>(m0 + 1);
  st.eta = params.eta;
  st.kappa0 = params.kappa0;
  st.order_seed = order_seed;
  return st;
}

// ---------------------------------------------------------------------------
// Embedding enumeration

// Visit order for the free tree positions: always a position adjacent to an
// already-known one (smallest label first), so every candidate set is a
// neighborhood in the graph rather than all of [n].
struct EmbedPlan {
  std::vector<int> order;                // free positions in visit order
  std::vector<int> anchor;               // known tree-neighbor to expand from
  std::vector<std::vector<int>> checks;  // other known tree-neighbors to test
};

inline EmbedPlan plan_embedding(const TreeTemplate& t, const std::vector<int>& fixed) {
  const int V = t.vertex_count();
  std::vector<char> known(static_cast<std::size_t>(V) + 1, 0);
  int n_known = 0;
  for (int v = 1; v <= V; ++v)
    if (fixed[v]) {
      known[v] = 1;
      ++n_known;
    }
  if (n_known == 0) throw std::logic_error("plan_embedding: no fixed positions");
  EmbedPlan plan;
  auto neighbors = [&](int v, auto&& fn) {
    if (v != 1) fn(t.parent[v]);
    for (int c : t.children[v]) fn(c);
  };
  while (n_known < V) {
    int pick = 0;
    for (int v = 1; v <= V && !pick; ++v) {
      if (known[v]) continue;
      neighbors(v, [&](int w) {
        if (known[w]) pick = v;
      });
    }
    if (!pick) throw std::logic_error("plan_embedding: fixed set does not reach the tree");
    int anchor = 0;
    std::vector<int> checks;
    neighbors(pick, [&](int w) {
      if (!known[w]) return;
      if (!anchor)
        anchor = w;
      else
        checks.push_back(w);
    });
    plan.order.push_back(pick);
    plan.anchor.push_back(anchor);
    plan.checks.push_back(std::move(checks));
    known[pick] = 1;
    ++n_known;
  }
  return plan;
}

struct EmbedStats {
  long long embeddings = 0;
  bool cap_hit = false;
};

// Depth-first enumeration of all embeddings extending `fixed`. Free internal
// positions draw from vertices with internal_ok, free leaf positions from
// leaf_ok; all embedding vertices are pairwise distinct. The callback sees
// the full assignment (indexed by tree position). Enumeration order is
// deterministic: plan order, neighbor lists ascending. Stops after `cap`
// embeddings and reports the truncation.
template <class Callback>
inline EmbedStats enumerate_embeddings(const TreeTemplate& t, const GraphSample& g,
                                       const EmbedPlan& plan, std::vector<int>& assign,
                                       const std::vector<char>& internal_ok,
                                       const std::vector<char>& leaf_ok, long long cap,
                                       Callback&& cb) {
  EmbedStats stats;
  const int depth_max = static_cast<int>(plan.order.size());
  std::vector<int> placed;
  placed.reserve(static_cast<std::size_t>(t.vertex_count()));
  for (int v = 1; v <= t.vertex_count(); ++v)
    if (assign[v]) placed.push_back(assign[v]);
  for (std::size_t i = 0; i < placed.size(); ++i)
    for (std::size_t j = i + 1; j < placed.size(); ++j)
      if (placed[i] == placed[j])
        throw std::logic_error("enumerate_embeddings: fixed vertices collide");

  auto rec = [&](auto&& self, int d) -> bool {  // false = stop (cap reached)
    if (d == depth_max) {
      ++stats.embeddings;
      cb(assign);
      if (stats.embeddings >= cap) {
        stats.cap_hit = true;
        return false;
      }
      return true;
    }
    const int pos = plan.order[d];
    const int anchor_v = assign[plan.anchor[d]];
    const std::vector<char>& ok = t.is_internal(pos) ? internal_ok : leaf_ok;
    for (int v : g.neighbors(anchor_v)) {
      if (!ok[v]) continue;
      bool clash = false;
      for (int p : placed)
        if (p == v) {
          clash = true;
          break;
        }
      if (clash) continue;
      bool edges_ok = true;
      for (int w : plan.checks[d])
        if (!g.edge_test(assign[w], v)) {
          edges_ok = false;
          break;
        }
      if (!edges_ok) continue;
      assign[pos] = v;
      placed.push_back(v);
      bool keep_going = self(self, d + 1);
      placed.pop_back();
      assign[pos] = 0;
      if (!keep_going) return false;
    }
    return true;
  };
  rec(rec, 0);
  return stats;
}

// ---------------------------------------------------------------------------
// Per-step searches

struct SrcCandidate {
  std::vector<int> leaves;     // leaf tuple, leaf-position order
  std::vector<int> internals;  // first witness internal tuple, internals[0] = u
  PriorityKey key;
};

struct SrcEnumeration {
  std::vector<SrcCandidate> items;  // priority-ascending
  EmbedStats stats;
};

// All distinct leaf tuples L such that the template embeds in g with root u,
// other internals on in_r vertices and leaves on in_pool vertices; each L is
// paired with the first witness internal tuple found. Sorted by the seeded
// priority of L (lexicographic tiebreak).
inline SrcEnumeration enumerate_src_candidates(const GraphSample& g, const TreeTemplate& tree,
                                               int u, const std::vector<char>& in_r,
                                               const std::vector<char>& in_pool,
                                               std::uint64_t order_seed, long long cap) {
  std::vector<int> fixed(static_cast<std::size_t>(tree.vertex_count()) + 1, 0);
  fixed[1] = u;
  EmbedPlan plan = plan_embedding(tree, fixed);
  std::map<std::vector<int>, std::vector<int>> witness;
  SrcEnumeration out;
  out.stats = enumerate_embeddings(
      tree, g, plan, fixed, in_r, in_pool, cap, [&](const std::vector<int>& assign) {
        std::vector<int> leaves(assign.begin() + tree.chi + 1, assign.end());
        auto it = witness.lower_bound(leaves);
        if (it != witness.end() && it->first == leaves) return;
        witness.emplace_hint(it, std::move(leaves),
                             std::vector<int>(assign.begin() + 1, assign.begin() + 1 + tree.chi));
      });
  out.items.reserve(witness.size());
  for (auto& [leaves, internals] : witness) {
    SrcCandidate c;
    c.key = tuple_priority(order_seed, tree.xi, leaves);
    c.leaves = leaves;
    c.internals = std::move(internals);
    out.items.push_back(std::move(c));
  }
  std::sort(out.items.begin(), out.items.end(), [](const SrcCandidate& a, const SrcCandidate& b) {
    if (!(a.key == b.key)) return a.key < b.key;
    return a.leaves < b.leaves;
  });
  return out;
}

struct DstResult {
  bool found = false;
  std::vector<int> internals;  // priority-minimal internal tuple
  EmbedStats stats;
};

// Searches h for an embedding whose leaves are pinned to leaf_images and
// whose internal positions use in_free vertices; returns the internal tuple
// minimal in the seeded priority order (lexicographic tiebreak).
inline DstResult find_dst_match(const GraphSample& h, const TreeTemplate& tree,
                                const std::vector<int>& leaf_images,
                                const std::vector<char>& in_free, std::uint64_t order_seed,
                                long long cap) {
  if (static_cast<int>(leaf_images.size()) != tree.xi)
    throw ConfigError("find_dst_match: expected " + std::to_string(tree.xi) + " leaf images");
  std::vector<int> fixed(static_cast<std::size_t>(tree.vertex_count()) + 1, 0);
  for (int i = 0; i < tree.xi; ++i) fixed[tree.chi + 1 + i] = leaf_images[i];
  EmbedPlan plan = plan_embedding(tree, fixed);
  DstResult out;
  PriorityKey best_key;
  out.stats = enumerate_embeddings(
      tree, h, plan, fixed, in_free, in_free, cap, [&](const std::vector<int>& assign) {
        std::vector<int> internals(assign.begin() + 1, assign.begin() + 1 + tree.chi);
        PriorityKey key = tuple_priority(order_seed, tree.chi, internals);
        bool better = !out.found || key < best_key ||
                      (key == best_key && internals < out.internals);
        if (better) {
          best_key = key;
          out.internals = std::move(internals);
          out.found = true;
        }
      });
  return out;
}

// One greedy step; mutates state and returns its record.
inline StepRecord match_step(const GraphSample& g, const GraphSample& h,
                             const TreeTemplate& tree, MatchState& st, long long embed_cap) {
  if (g.n != st.n || h.n != st.n)
    throw ConfigError("match_step: graph sizes disagree with the state");
  if (st.matched >= st.n) throw ConfigError("match_step: no unmatched sources remain");
  std::vector<char> in_r(static_cast<std::size_t>(st.n) + 1, 0);
  std::vector<char> in_pool(static_cast<std::size_t>(st.n) + 1, 0);
  std::vector<char> in_free(static_cast<std::size_t>(st.n) + 1, 0);
  for (int v = 1; v <= st.n; ++v) {
    in_r[v] = !st.src_matched[v];
    in_pool[v] = st.src_matched[v] && st.usage[v] < st.kappa0;
    in_free[v] = !st.dst_used[v];
  }
  while (st.src_matched[st.src_cursor]) ++st.src_cursor;
  const int u = st.src_cursor;

  StepRecord rec;
  SrcEnumeration src = enumerate_src_candidates(g, tree, u, in_r, in_pool, st.order_seed,
                                                embed_cap);
  rec.cand_size = static_cast<long long>(src.items.size());
  rec.embeddings += src.stats.embeddings;
  rec.cap_hit = rec.cap_hit || src.stats.cap_hit;

  std::vector<int> leaf_images(static_cast<std::size_t>(tree.xi));
  for (std::size_t idx = 0; idx < src.items.size(); ++idx) {
    const SrcCandidate& cand = src.items[idx];
    for (int i = 0; i < tree.xi; ++i) {
      leaf_images[i] = st.pi[cand.leaves[i]];
      if (leaf_images[i] == 0)
        throw std::logic_error("match_step: candidate leaf is not matched");
    }
    DstResult dst = find_dst_match(h, tree, leaf_images, in_free, st.order_seed, embed_cap);
    rec.embeddings += dst.stats.embeddings;
    rec.cap_hit = rec.cap_hit || dst.stats.cap_hit;
    if (!dst.found) continue;

    rec.success = true;
    rec.explored = static_cast<long long>(idx) + 1;
    rec.failed = static_cast<long long>(idx);
    rec.mt_leaves = cand.leaves;
    rec.mt_src = cand.internals;
    rec.mt_dst = dst.internals;
    if (cand.internals[0] != u)
      throw std::logic_error("match_step: witness root is not the pivot");
    for (int t = 0; t < tree.chi; ++t) {
      int sv = cand.internals[t], dv = dst.internals[t];
      st.pi[sv] = dv;
      st.src_matched[sv] = 1;
      st.dst_used[dv] = 1;
      ++st.matched;
    }
    std::vector<int> touched = cand.leaves;
    touched.insert(touched.end(), cand.internals.begin(), cand.internals.end());
    touched.insert(touched.end(), dst.internals.begin(), dst.internals.end());
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int v : touched) ++st.usage[v];
    break;
  }

  if (!rec.success) {
    rec.explored = rec.failed = static_cast<long long>(src.items.size());
    while (st.dst_used[st.dst_cursor]) ++st.dst_cursor;
    const int tgt = st.dst_cursor;
    st.pi[u] = tgt;
    st.src_matched[u] = 1;
    st.dst_used[tgt] = 1;
    ++st.matched;
  }
  ++st.step;
  rec.s = st.step;
  rec.u = u;
  return rec;
}

struct GreedyResult {
  std::vector<int> pi;  // pi[1..n], a permutation of 1..n
  std::vector<StepRecord> trace;
  long long m0 = 0;
};

// Runs steps while at least eta*n sources remain unmatched (exact rational
// comparison), then completes pi by pairing leftover sources and targets in
// ascending order.
inline GreedyResult run_greedy(const GraphSample& g, const GraphSample& h,
                               const TreeTemplate& tree, const ParamSet& params,
                               std::uint64_t order_seed, long long embed_cap) {
  if (g.n != h.n)
    throw ConfigError("run_greedy: graphs must share a vertex count, got " +
                      std::to_string(g.n) + " and " + std::to_string(h.n));
  MatchState st = init_state(tree, params, g.n, order_seed);
  GreedyResult out;
  out.m0 = st.m0;
  const Rational eta_n = params.eta * g.n;
  while (Rational(g.n - st.matched) >= eta_n)
    out.trace.push_back(match_step(g, h, tree, st, embed_cap));

  std::vector<int> rest_src, rest_dst;
  for (int v = 1; v <= st.n; ++v) {
    if (!st.src_matched[v]) rest_src.push_back(v);
    if (!st.dst_used[v]) rest_dst.push_back(v);
  }
  if (rest_src.size() != rest_dst.size())
    throw std::logic_error("run_greedy: leftover source/target counts disagree");
  for (std::size_t i = 0; i < rest_src.size(); ++i) st.pi[rest_src[i]] = rest_dst[i];

  std::vector<char> seen(static_cast<std::size_t>(st.n) + 1, 0);
  for (int v = 1; v <= st.n; ++v) {
    int w = st.pi[v];
    if (w < 1 || w > st.n || seen[w]) throw std::logic_error("run_greedy: pi is not a bijection");
    seen[w] = 1;
  }
  out.pi = std::move(st.pi);
  return out;
}

struct TraceAudit {
  long long successes = 0;
  long long violations = 0;
};

// Re-verifies every successful step of a trace against the graphs and the
// final permutation: both embeddings edge-complete, coordinates consistent
// with pi, vertices distinct. Any discrepancy counts as a violation.
inline TraceAudit audit_trace(const GraphSample& g, const GraphSample& h,
                              const TreeTemplate& tree, const std::vector<StepRecord>& trace,
                              const std::vector<int>& pi) {
  TraceAudit audit;
  for (const StepRecord& rec : trace) {
    if (!rec.success) continue;
    ++audit.successes;
    bool ok = static_cast<int>(rec.mt_leaves.size()) == tree.xi &&
              static_cast<int>(rec.mt_src.size()) == tree.chi &&
              static_cast<int>(rec.mt_dst.size()) == tree.chi;
    if (ok) {
      std::vector<int> src_v(static_cast<std::size_t>(tree.vertex_count()) + 1, 0);
      std::vector<int> dst_v(static_cast<std::size_t>(tree.vertex_count()) + 1, 0);
      for (int t = 0; t < tree.chi; ++t) {
        src_v[1 + t] = rec.mt_src[t];
        dst_v[1 + t] = rec.mt_dst[t];
        if (pi[rec.mt_src[t]] != rec.mt_dst[t]) ok = false;
      }
      for (int i = 0; i < tree.xi; ++i) {
        src_v[tree.chi + 1 + i] = rec.mt_leaves[i];
        dst_v[tree.chi + 1 + i] = pi[rec.mt_leaves[i]];
      }
      for (int side = 0; side < 2 && ok; ++side) {
        const std::vector<int>& emb = side == 0 ? src_v : dst_v;
        const GraphSample& graph = side == 0 ? g : h;
        for (int v = 1; v <= tree.vertex_count() && ok; ++v) {
          if (emb[v] < 1 || emb[v] > graph.n) ok = false;
          for (int w = v + 1; w <= tree.vertex_count() && ok; ++w)
            if (emb[v] == emb[w]) ok = false;
        }
        for (int e = 0; e < tree.zeta && ok; ++e) {
          auto [a, b] = tree.edge(e);
          if (!graph.edge_test(emb[a], emb[b])) ok = false;
        }
      }
    }
    if (!ok) ++audit.violations;
  }
  return audit;
}

}  // namespace treematch
