#pragma once
// Template-tree design and balance verification.
//
// A template tree is a rooted tree built from a non-decreasing branching
// sequence (n_1 <= ... <= n_l) plus a leaf multiplicity k: the root (depth 0)
// has n_l children, every depth-i internal vertex has n_{l-i} children, and
// every depth-l vertex carries exactly k leaves. Internal vertices are
// labeled 1..chi in BFS order, leaves chi+1..chi+xi. With ell = n_1*...*n_l:
//   xi = k*ell,   zeta = #edges = chi + xi - 1 = k*ell + chi - 1.
//
// "Balance" is the property making the greedy matcher's per-step success
// probability uniformly high: sparse random graphs must not be able to host
// partial copies of the tree more cheaply than full copies. The exhaustive
// verifier checks this by enumeration; the structural verifier checks two
// stronger-but-cheap certificates that imply it for the designed window.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treematch/rational.hpp"

namespace treematch {

struct TreeTemplate {
  int chi = 0;   // internal vertices, labels 1..chi
  int xi = 0;    // leaves, labels chi+1..chi+xi
  int zeta = 0;  // edges
  int k = 0;     // leaves per deepest internal vertex
  std::vector<int> branching;              // n_1 <= ... <= n_l
  std::vector<int> parent;                 // parent[v], parent[1] = 0
  std::vector<std::vector<int>> children;  // children[v] ascending

  int vertex_count() const { return chi + xi; }
  int edge_count() const { return zeta; }
  bool is_internal(int v) const { return v >= 1 && v <= chi; }
  bool is_leaf(int v) const { return v > chi && v <= chi + xi; }
  // Edge e (0-based) joins child e+2 to its parent; parent label < child label.
  std::pair<int, int> edge(int e) const { return {parent[e + 2], e + 2}; }
  int degree(int v) const {
    return static_cast<int>(children[v].size()) + (v == 1 ? 0 : 1);
  }
};

// Builds the template for a branching sequence and leaf multiplicity.
inline TreeTemplate build_tree(const std::vector<int>& branching, int k) {
  if (k < 1) throw ConfigError("build_tree: leaf multiplicity k must be >= 1");
  if (branching.empty()) throw ConfigError("build_tree: branching sequence must be non-empty");
  for (std::size_t i = 0; i < branching.size(); ++i) {
    if (branching[i] < 1) throw ConfigError("build_tree: branching values must be >= 1");
    if (i > 0 && branching[i] < branching[i - 1])
      throw ConfigError("build_tree: branching sequence must be non-decreasing");
  }
  const int l = static_cast<int>(branching.size());
  long long total = 1;  // vertices counted generation by generation
  long long gen = 1;
  for (int depth = 1; depth <= l; ++depth) {
    gen *= branching[l - depth];
    total += gen;
    if (total > (1 << 20)) throw ConfigError("build_tree: tree too large");
  }
  long long leaves = gen * k;
  if (total + leaves > (1 << 20)) throw ConfigError("build_tree: tree too large");

  TreeTemplate t;
  t.k = k;
  t.branching = branching;
  t.chi = static_cast<int>(total);
  t.xi = static_cast<int>(leaves);
  t.zeta = t.chi + t.xi - 1;
  t.parent.assign(static_cast<std::size_t>(t.chi + t.xi) + 1, 0);
  t.children.assign(static_cast<std::size_t>(t.chi + t.xi) + 1, {});

  // BFS labeling: depth order puts all internals before all leaves.
  int next = 2;
  std::vector<int> frontier{1};
  for (int depth = 1; depth <= l; ++depth) {
    std::vector<int> nxt;
    nxt.reserve(frontier.size() * static_cast<std::size_t>(branching[l - depth]));
    for (int v : frontier)
      for (int c = 0; c < branching[l - depth]; ++c) {
        t.parent[next] = v;
        t.children[v].push_back(next);
        nxt.push_back(next++);
      }
    frontier = std::move(nxt);
  }
  for (int v : frontier)
    for (int c = 0; c < k; ++c) {
      t.parent[next] = v;
      t.children[v].push_back(next);
      ++next;
    }
  if (next != t.chi + t.xi + 1)
    throw std::logic_error("build_tree: label count mismatch");
  return t;
}

// ---------------------------------------------------------------------------
// Subgraph masks and capacity

// Bit v-1 marks vertex v; bit e marks edge e (tree.edge(e) order).
struct SubgraphMask {
  std::uint64_t vertex_bits = 0;
  std::uint64_t edge_bits = 0;
};

inline std::uint64_t vertex_bit(int v) { return 1ull << (v - 1); }

inline std::uint64_t all_vertex_bits(const TreeTemplate& t) {
  return t.vertex_count() >= 64 ? ~0ull : (1ull << t.vertex_count()) - 1;
}

inline std::uint64_t internal_vertex_bits(const TreeTemplate& t) {
  return (1ull << t.chi) - 1;
}

// Edges of the template with both endpoints inside `vertices`.
inline std::uint64_t induced_edge_bits(const TreeTemplate& t, std::uint64_t vertices) {
  std::uint64_t out = 0;
  for (int e = 0; e < t.zeta; ++e) {
    auto [u, v] = t.edge(e);
    if ((vertices >> (u - 1) & 1) && (vertices >> (v - 1) & 1)) out |= 1ull << e;
  }
  return out;
}

inline void validate_mask(const TreeTemplate& t, const SubgraphMask& m) {
  if (t.vertex_count() > 64 || t.zeta > 64)
    throw ConfigError("subgraph masks require trees with at most 64 vertices/edges");
  std::uint64_t vb = all_vertex_bits(t);
  if (m.vertex_bits & ~vb) throw ConfigError("mask has vertex bits beyond the tree");
  if (t.zeta < 64 && (m.edge_bits & ~((1ull << t.zeta) - 1)))
    throw ConfigError("mask has edge bits beyond the tree");
  for (int e = 0; e < t.zeta; ++e)
    if (m.edge_bits >> e & 1) {
      auto [u, v] = t.edge(e);
      if (!(m.vertex_bits >> (u - 1) & 1) || !(m.vertex_bits >> (v - 1) & 1))
        throw ConfigError("mask edge " + std::to_string(e) + " misses an endpoint vertex");
    }
}

// Cap(F) = (#internal vertices of F) - alpha_eta * (#edges of F).
// The sampling exponent of a subgraph copy count: negative capacity means
// copies of F are scarce, positive means plentiful.
inline Rational capacity(const TreeTemplate& t, const SubgraphMask& m, const Rational& alpha_eta) {
  validate_mask(t, m);
  int q = std::popcount(m.vertex_bits & internal_vertex_bits(t));
  int e = std::popcount(m.edge_bits);
  return Rational(q) - alpha_eta * e;
}

// True iff `vertices` spans a connected subtree (singletons count).
inline bool mask_connected(const TreeTemplate& t, std::uint64_t vertices) {
  if (vertices == 0) return false;
  int start = std::countr_zero(vertices) + 1;
  std::uint64_t seen = vertex_bit(start);
  std::vector<int> stack{start};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    auto try_visit = [&](int w) {
      if ((vertices >> (w - 1) & 1) && !(seen >> (w - 1) & 1)) {
        seen |= vertex_bit(w);
        stack.push_back(w);
      }
    };
    if (v != 1) try_visit(t.parent[v]);
    for (int c : t.children[v]) try_visit(c);
  }
  return seen == vertices;
}

// ---------------------------------------------------------------------------
// Balance verification

struct BalanceWitness {
  SubgraphMask mask;
  std::string condition;  // "deletion-bound", "subtree-density", ...
  bool tie = false;       // the strict inequality failed with exact equality
};

struct BalanceCheck {
  bool ok = true;
  std::optional<BalanceWitness> witness;
};

// The admissible window for the per-edge exponent alpha_eta given a tree:
//   chi - (2*alpha_eta - 1)*zeta must lie strictly in (0, 1 - alpha_eta).
// Lower end comes from the right inequality, upper end (chi+zeta)/(2*zeta)
// from the left one; the designer also needs alpha_eta > alpha.
inline std::pair<Rational, Rational> slack_window(const TreeTemplate& t) {
  Rational lo(t.chi + t.zeta - 1, 2 * t.zeta - 1);
  Rational hi(t.chi + t.zeta, 2 * t.zeta);
  return {lo, hi};
}

inline bool slack_ok(const TreeTemplate& t, const Rational& alpha_eta) {
  Rational slack = Rational(t.chi) - (2 * alpha_eta - 1) * t.zeta;
  return slack > 0 && slack < 1 - alpha_eta;
}

// Exhaustive balance check by full enumeration. Two families:
//
//  * deletion bound: for every proper subgraph F of the tree that contains
//    all leaves (vertex set = leaves + a subset S of internals, edge set =
//    any subset of the edges F spans), the part of the tree outside F must
//    be edge-heavy:  chi - |S|  <  alpha_eta * (zeta - |E(F)|)  strictly.
//  * subtree density: every connected proper subtree T0 (excluding bare
//    leaf singletons, which carry neither edges nor internal vertices) must
//    satisfy  q0 - (2a-1)e0  >  chi - (2a-1)zeta  strictly, where q0/e0
//    count T0's internal vertices/edges and a = alpha_eta. Equivalently no
//    proper subtree is as "slack-tight" as the whole tree.
//
// Any exact equality is reported as a tie so the designer can nudge
// alpha_eta instead of rejecting the tree shape.
inline BalanceCheck verify_balanced_exhaustive(const TreeTemplate& t, const Rational& alpha_eta) {
  if (t.zeta > 16)
    throw ConfigError("verify_balanced_exhaustive: tree too large (zeta > 16)");
  const BigInt a = rat_num(alpha_eta), b = rat_den(alpha_eta);
  const int V = t.vertex_count();
  const std::uint64_t leaf_bits = all_vertex_bits(t) & ~internal_vertex_bits(t);
  const std::uint64_t all_edges = t.zeta >= 64 ? ~0ull : (1ull << t.zeta) - 1;

  // Deletion bound over S = internals kept, esub = edges kept.
  for (std::uint64_t S = 0; S < (1ull << t.chi); ++S) {
    std::uint64_t within = 0;
    for (int e = 0; e < t.zeta; ++e) {
      auto [u, v] = t.edge(e);
      bool u_in = (S >> (u - 1)) & 1;  // u is always internal
      bool v_in = t.is_leaf(v) || ((S >> (v - 1)) & 1);
      if (u_in && v_in) within |= 1ull << e;
    }
    std::uint64_t esub = within;
    while (true) {
      bool whole_tree = (S == (1ull << t.chi) - 1) && (esub == all_edges);
      if (!whole_tree) {
        BigInt lhs = b * (t.chi - std::popcount(S));
        BigInt rhs = a * (t.zeta - std::popcount(esub));
        if (lhs >= rhs) {
          BalanceWitness w;
          w.mask.vertex_bits = leaf_bits | S;
          w.mask.edge_bits = esub;
          w.condition = "deletion-bound";
          w.tie = (lhs == rhs);
          return {false, w};
        }
      }
      if (esub == 0) break;
      esub = (esub - 1) & within;
    }
  }

  // Subtree density over connected vertex sets with their induced edges.
  const BigInt edge_weight = 2 * a - b;  // b * (2*alpha_eta - 1)
  const BigInt full_slack = BigInt(t.chi) * b - edge_weight * t.zeta;
  for (std::uint64_t vm = 1; vm + 1 < (1ull << V); ++vm) {
    if (!mask_connected(t, vm)) continue;
    int q0 = std::popcount(vm & internal_vertex_bits(t));
    std::uint64_t em = induced_edge_bits(t, vm);
    int e0 = std::popcount(em);
    if (q0 == 0 && e0 == 0) continue;  // bare leaf: no edge to descend through
    BigInt lhs = BigInt(q0) * b - edge_weight * e0;
    if (lhs <= full_slack) {
      BalanceWitness w;
      w.mask.vertex_bits = vm;
      w.mask.edge_bits = em;
      w.condition = "subtree-density";
      w.tie = (lhs == full_slack);
      return {false, w};
    }
  }
  return {};
}

// Structural balance check: two certificates that are independent of
// alpha_eta (they take the base exponent alpha) and together imply the
// exhaustive conditions for alpha_eta chosen in the designer's window.
//
//  * Core weight: over connected sets C of vertices with tree-degree >= 2,
//    max sum of (1 + alpha - alpha*deg(v)) must stay strictly below alpha.
//    Summing the weights telescopes to |C| - alpha*(#edges incident to C),
//    which is the capacity of the subtree C plus its fringe of neighbors;
//    keeping every such capacity below alpha forces the deletion bound for
//    any per-edge exponent above alpha (missing pieces decompose into such
//    fringed subtrees whose real vertices all have degree >= 2).
//  * Descendant density: every non-root internal vertex v must have
//    (#internals in its descendant subtree) / (#edges) > chi/zeta strictly.
//    The whole tree has internal density chi/zeta; as alpha_eta approaches
//    the window's upper end the subtree-density condition degenerates to
//    exactly this ratio comparison on descendant subtrees, so a strict
//    margin here leaves room for exact alpha_eta slightly below it.
inline BalanceCheck verify_balanced_structural(const TreeTemplate& t, const Rational& alpha) {
  const int V = t.vertex_count();

  // Core weight DP, children before parents (labels are BFS order).
  std::vector<Rational> down(static_cast<std::size_t>(V) + 1, Rational(0));
  Rational best(-1);
  int best_vertex = 0;
  for (int v = V; v >= 1; --v) {
    if (t.degree(v) < 2) continue;
    Rational w = Rational(1) + alpha - alpha * t.degree(v);
    for (int c : t.children[v])
      if (t.degree(c) >= 2 && down[c] > 0) w += down[c];
    down[v] = w;
    if (w > best) {
      best = w;
      best_vertex = v;
    }
  }
  if (best_vertex != 0 && best >= alpha) {
    // Reconstruct the heaviest core C and report its fringed subtree.
    std::uint64_t core = 0;
    std::vector<int> stack{best_vertex};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      core |= vertex_bit(v);
      for (int c : t.children[v])
        if (t.degree(c) >= 2 && down[c] > 0) stack.push_back(c);
    }
    std::uint64_t verts = core;
    std::uint64_t edges = 0;
    for (int e = 0; e < t.zeta; ++e) {
      auto [u, v] = t.edge(e);
      if ((core >> (u - 1) & 1) || (core >> (v - 1) & 1)) {
        edges |= 1ull << e;
        verts |= vertex_bit(u) | vertex_bit(v);
      }
    }
    BalanceWitness w;
    w.mask = {verts, edges};
    w.condition = "core-weight";
    w.tie = (best == alpha);
    return {false, w};
  }

  // Descendant density chain.
  std::vector<int> sub_size(static_cast<std::size_t>(V) + 1, 0);
  std::vector<int> sub_internals(static_cast<std::size_t>(V) + 1, 0);
  for (int v = V; v >= 1; --v) {
    sub_size[v] = 1;
    sub_internals[v] = t.is_internal(v) ? 1 : 0;
    for (int c : t.children[v]) {
      sub_size[v] += sub_size[c];
      sub_internals[v] += sub_internals[c];
    }
  }
  for (int v = 2; v <= t.chi; ++v) {
    long long q = sub_internals[v];
    long long e = sub_size[v] - 1;
    // q/e > chi/zeta strictly
    if (q * t.zeta <= static_cast<long long>(t.chi) * e) {
      std::uint64_t verts = 0;
      std::vector<int> stack{v};
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        verts |= vertex_bit(x);
        for (int c : t.children[x]) stack.push_back(c);
      }
      BalanceWitness w;
      w.mask = {verts, induced_edge_bits(t, verts)};
      w.condition = "descendant-density";
      w.tie = (q * t.zeta == static_cast<long long>(t.chi) * e);
      return {false, w};
    }
  }
  return {};
}

// How much cheaper the cheapest leaf-containing subgraph of T0 is than T0
// itself: Cap(T0) - min over F0 (subgraphs of T0 containing T0's leaves,
// empty allowed when T0 has no leaves) of Cap(F0). Nonnegative; zero means
// T0 itself is the cheapest way to contain its leaves.
inline Rational d_quantity(const TreeTemplate& t, const SubgraphMask& m, const Rational& alpha_eta) {
  validate_mask(t, m);
  if (m.vertex_bits == 0) throw ConfigError("d_quantity: empty subtree mask");
  if (!mask_connected(t, m.vertex_bits))
    throw ConfigError("d_quantity: mask is not a connected subtree");
  if (m.edge_bits != induced_edge_bits(t, m.vertex_bits))
    throw ConfigError("d_quantity: subtree mask must carry all induced edges");
  const std::uint64_t leaf_bits = m.vertex_bits & ~internal_vertex_bits(t);
  const std::uint64_t free_bits = m.vertex_bits & ~leaf_bits;
  Rational cap_t0 = capacity(t, m, alpha_eta);
  // Minimizing capacity always keeps every available edge (each subtracts
  // alpha_eta > 0), so only the vertex set varies.
  std::optional<Rational> min_cap;
  std::uint64_t fs = free_bits;
  while (true) {
    std::uint64_t verts = leaf_bits | fs;
    SubgraphMask f0{verts, m.edge_bits & induced_edge_bits(t, verts)};
    Rational c = capacity(t, f0, alpha_eta);
    if (!min_cap || c < *min_cap) min_cap = c;
    if (fs == 0) break;
    fs = (fs - 1) & free_bits;
  }
  return cap_t0 - *min_cap;
}

// ---------------------------------------------------------------------------
// Parameter design

struct ParamSet {
  Rational alpha;    // edge exponent of the sampled graphs, in (1/2, 1)
  Rational epsilon;  // relative slack off the asymptotic overlap target
  Rational eta;      // seed fraction / success margin
  int k = 0;
  std::vector<int> beta_terms;  // branching sequence n_1..n_l
  long long ell = 0;            // product of beta_terms
  Rational alpha_eta;           // per-edge exponent used by the matcher analysis
  Rational alpha_tilde;         // upper end of the admissible exponent window
  int zeta_max = 10;
  long long kappa0 = 0;  // reuse bound before a matched vertex leaves the pool
};

// Largest k with 1/(2*alpha - 1) in (k, k+1].
inline int choose_k(const Rational& alpha) {
  if (!(alpha > Rational(1, 2) && alpha < 1))
    throw ConfigError("alpha must lie strictly in (1/2, 1), got " + rat_to_pq(alpha));
  Rational t = Rational(1) / (2 * alpha - 1);
  BigInt k = rat_ceil(t) - 1;
  if (k < 1) throw std::logic_error("choose_k: internal error, k < 1");
  if (k > 1000000)
    throw ConfigError("alpha is too close to 1/2 (k would exceed 10^6)");
  return k.convert_to<int>();
}

// Largest eta = epsilon / 2^j (j >= 1, eta >= 2^-30) such that
//   alpha + eta < 1,
//   (1 - 2*eta) / (2*(alpha+eta) - 1) > (1 - epsilon) / (2*alpha - 1),
//   1 / (2*(alpha+eta) - 1) > k,
//   floor(((k+1)*(2*(alpha+eta)-1) - 1) / (2 - 2*(alpha+eta)))
//     == floor(((k+1)*(2*alpha-1) - 1) / (2 - 2*alpha)).
// The first keeps sampling subcritical, the second makes the achieved
// overlap ratio beat the requested one, the last two pin the integer
// geometry of the tree so the design is stable under the eta shift.
inline Rational choose_eta(const Rational& alpha, const Rational& epsilon, int k) {
  if (!(epsilon > 0 && epsilon < 1))
    throw ConfigError("epsilon must lie strictly in (0, 1), got " + rat_to_pq(epsilon));
  const Rational floor_eta(1, 1 << 30);
  const Rational target = (1 - epsilon) / (2 * alpha - 1);
  const BigInt base_floor = rat_floor(((k + 1) * (2 * alpha - 1) - 1) / (2 - 2 * alpha));
  std::string why = "eta grid exhausted";
  for (Rational eta = epsilon / 2; eta >= floor_eta; eta /= 2) {
    Rational ae = alpha + eta;
    if (!(ae < 1)) {
      why = "alpha + eta < 1";
      continue;
    }
    if (!((1 - 2 * eta) / (2 * ae - 1) > target)) {
      why = "achieved ratio must exceed requested ratio";
      continue;
    }
    if (!(Rational(1) / (2 * ae - 1) > k)) {
      why = "exponent shift must preserve k";
      continue;
    }
    if (rat_floor(((k + 1) * (2 * ae - 1) - 1) / (2 - 2 * ae)) != base_floor) {
      why = "exponent shift must preserve the expansion floor";
      continue;
    }
    return eta;
  }
  throw DesignError("no feasible eta on the halving grid down to 2^-30 (last failure: " +
                    why + "); try a larger epsilon");
}

// The open interval the branching sequence's reciprocal sum must land in.
inline std::pair<Rational, Rational> beta_interval(const Rational& alpha, const Rational& eta,
                                                   int k) {
  Rational lo = ((k + 1) * (2 * alpha - 1) - 1) / (2 - 2 * alpha);
  Rational ae = alpha + eta;
  Rational hi = ((k + 1) * (2 * ae - 1) - 1) / (2 - 2 * ae);
  return {lo, hi};
}

// Edge count of the tree for a branching prefix: zeta_1 = n_1*(k+1),
// zeta_j = n_j*(zeta_{j-1} + 1).
inline BigInt zeta_of_prefix(const std::vector<int>& terms, int k) {
  BigInt z = 0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    z = (i == 0) ? BigInt(terms[0]) * (k + 1) : BigInt(terms[i]) * (z + 1);
  return z;
}

// Expands a branching sequence n_1 <= n_2 <= ... by the greedy unit-fraction
// rule (n_j is the unique integer with 1/n_j < r_j < 1/(n_j - 1), taking
// n_j = 1/r_j exactly when r_j is a unit fraction), starting from a seed in
// the admissible interval, and stops as soon as the partial reciprocal sum
// lands strictly inside (beta_lo, beta_hi). The seed is the midpoint of the
// interval clipped from below at (k+1)/zeta_max: partial sums approach the
// seed from below, and any seed below that clip forces n_1*(k+1) > zeta_max
// before the first term even lands.
inline std::vector<int> expand_beta(const Rational& alpha, const Rational& eta, int k,
                                    int zeta_max) {
  if (zeta_max < 2) throw ConfigError("zeta_max must be >= 2");
  auto [lo, hi] = beta_interval(alpha, eta, k);
  if (!(lo < hi)) throw std::logic_error("expand_beta: empty target interval");
  Rational seed_lo = std::max(lo, Rational(k + 1, zeta_max));
  if (!(seed_lo < hi))
    throw DesignError("edge budget too small: every admissible branching sequence needs more "
                      "than zeta_max=" + std::to_string(zeta_max) +
                      " edges already at depth 1; raise zeta_max or epsilon");
  Rational r = (seed_lo + hi) / 2;
  std::vector<int> terms;
  Rational beta_sum = 0;
  BigInt prefix_product = 1;
  for (int round = 0; round < 64; ++round) {
    Rational inv = Rational(1) / r;
    BigInt n_big = rat_is_integer(inv) ? rat_num(inv) : rat_floor(inv) + 1;
    if (n_big > 10000000)
      throw DesignError("expansion term exceeds 10^7; admissible interval too tight for "
                        "zeta_max=" + std::to_string(zeta_max));
    int n = n_big.convert_to<int>();
    if (!terms.empty() && n < terms.back())
      throw std::logic_error("expand_beta: expansion terms decreased");
    terms.push_back(n);
    prefix_product *= n;
    BigInt z = zeta_of_prefix(terms, k);
    if (z > zeta_max)
      throw DesignError("edge budget exceeded: prefix [" + [&] {
                          std::string s;
                          for (std::size_t i = 0; i < terms.size(); ++i)
                            s += (i ? "," : "") + std::to_string(terms[i]);
                          return s;
                        }() + "] needs " + z.str() + " edges > zeta_max=" +
                        std::to_string(zeta_max) + "; raise zeta_max or epsilon");
    beta_sum += Rational(BigInt(1), prefix_product);
    if (beta_sum > lo && beta_sum < hi) return terms;
    r = n * r - 1;
    if (r == 0) throw std::logic_error("expand_beta: exact termination outside the interval");
  }
  throw DesignError("expansion did not land in the admissible interval within 64 terms");
}

// All non-decreasing branching sequences whose tree fits the edge budget,
// ordered by (edge count, length, lexicographic) — the designer's fallback
// search space when the greedy expansion overshoots the budget.
inline std::vector<std::vector<int>> branching_sequences_within(int k, int zeta_max) {
  std::vector<std::pair<long long, std::vector<int>>> found;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int min_v, long long zeta_prev) -> void {
    for (int v = min_v;; ++v) {
      long long z = cur.empty() ? static_cast<long long>(v) * (k + 1)
                                : static_cast<long long>(v) * (zeta_prev + 1);
      if (z > zeta_max) break;
      cur.push_back(v);
      found.emplace_back(z, cur);
      self(self, v, z);
      cur.pop_back();
    }
  };
  rec(rec, 1, 0);
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
    return a.second < b.second;
  });
  std::vector<std::vector<int>> out;
  out.reserve(found.size());
  for (auto& [z, seq] : found) out.push_back(std::move(seq));
  return out;
}

struct Design {
  ParamSet params;
  TreeTemplate tree;
  // nullopt = skipped because the tree exceeds the exhaustive budget.
  std::optional<bool> verified_exhaustive;
  bool verified_structural = false;
};

namespace detail {

// Trees this small are cheap to verify by full enumeration; larger accepted
// trees rely on the structural certificates alone.
constexpr int kExhaustiveDesignBudget = 12;

// Tries to finish a design with the given branching sequence: verify the
// shape structurally, then pick alpha_eta in the admissible window (midpoint
// first, halving toward the upper end whenever an exact tie trips the strict
// exhaustive check).
inline std::optional<Design> try_sequence(const Rational& alpha, const Rational& epsilon,
                                          const Rational& eta, int k, int zeta_max,
                                          const std::vector<int>& seq) {
  TreeTemplate tree = build_tree(seq, k);
  if (tree.zeta > zeta_max) return std::nullopt;
  if (!verify_balanced_structural(tree, alpha).ok) return std::nullopt;
  auto [win_lo, win_hi] = slack_window(tree);
  Rational lo = std::max(alpha, win_lo);
  const Rational hi = win_hi;  // = alpha_tilde
  if (!(lo < hi)) return std::nullopt;
  Rational gap = hi - lo;
  for (int j = 1; j <= 48; ++j) {
    Rational alpha_eta = hi - gap / (BigInt(1) << j);
    if (!slack_ok(tree, alpha_eta))
      throw std::logic_error("design: window candidate violates the slack bounds");
    std::optional<bool> exhaustive;
    if (tree.zeta <= kExhaustiveDesignBudget) {
      BalanceCheck res = verify_balanced_exhaustive(tree, alpha_eta);
      if (!res.ok) {
        if (res.witness && res.witness->tie) continue;  // nudge alpha_eta, retry
        return std::nullopt;                            // genuine shape defect
      }
      exhaustive = true;
    }
    Design d;
    d.params.alpha = alpha;
    d.params.epsilon = epsilon;
    d.params.eta = eta;
    d.params.k = k;
    d.params.beta_terms = seq;
    d.params.ell = 1;
    for (int v : seq) d.params.ell *= v;
    d.params.alpha_eta = alpha_eta;
    d.params.alpha_tilde = hi;
    d.params.zeta_max = zeta_max;
    d.params.kappa0 = (rat_ceil(Rational(4 * tree.zeta) / eta) + 1).convert_to<long long>();
    d.tree = std::move(tree);
    d.verified_exhaustive = exhaustive;
    d.verified_structural = true;
    return d;
  }
  return std::nullopt;  // ties all the way down; effectively impossible
}

}  // namespace detail

// Full design pipeline: k and eta from (alpha, epsilon), branching sequence
// from the greedy expansion (falling back to ordered enumeration of all
// budget-fitting sequences), then the exponent window and verification.
// Deterministic; throws DesignError when nothing admissible fits the budget.
inline Design design_tree(const Rational& alpha, const Rational& epsilon, int zeta_max = 10) {
  if (zeta_max < 2) throw ConfigError("zeta_max must be >= 2");
  const int k = choose_k(alpha);
  const Rational eta = choose_eta(alpha, epsilon, k);
  auto [lo, hi] = beta_interval(alpha, eta, k);

  std::vector<std::vector<int>> candidates;
  std::string primary_failure;
  try {
    candidates.push_back(expand_beta(alpha, eta, k, zeta_max));
  } catch (const DesignError& e) {
    primary_failure = e.what();
  }
  for (auto& seq : branching_sequences_within(k, zeta_max)) {
    if (!candidates.empty() && seq == candidates.front()) continue;
    Rational beta_sum = 0;
    BigInt prod = 1;
    for (int v : seq) {
      prod *= v;
      beta_sum += Rational(BigInt(1), prod);
    }
    if (beta_sum > lo && beta_sum < hi) candidates.push_back(std::move(seq));
  }

  for (const auto& seq : candidates)
    if (auto d = detail::try_sequence(alpha, epsilon, eta, k, zeta_max, seq)) return *d;

  std::string msg = "no balanced tree within zeta_max=" + std::to_string(zeta_max) +
                    " for alpha=" + rat_to_pq(alpha) + ", epsilon=" + rat_to_pq(epsilon) +
                    " (k=" + std::to_string(k) + ", eta=" + rat_to_pq(eta) +
                    ", admissible interval (" + rat_to_pq(lo) + ", " + rat_to_pq(hi) + "))";
  if (!primary_failure.empty()) {
    const std::string hint = "; raise zeta_max or epsilon";
    if (primary_failure.size() > hint.size() &&
        primary_failure.compare(primary_failure.size() - hint.size(), hint.size(), hint) == 0)
      primary_failure.erase(primary_failure.size() - hint.size());
    msg += "; greedy expansion: " + primary_failure;
  }
  msg += "; raise zeta_max or epsilon";
  throw DesignError(msg);
}

}  // namespace treematch
