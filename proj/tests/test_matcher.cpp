#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "support/oracles.hpp"
#include "treematch/matcher.hpp"

using namespace treematch;

namespace {

ParamSet params_for(const Rational& eta, long long kappa0) {
  ParamSet p;
  p.eta = eta;
  p.kappa0 = kappa0;
  return p;
}

std::vector<char> flag_set(int n, std::initializer_list<int> members) {
  std::vector<char> f(static_cast<std::size_t>(n) + 1, 0);
  for (int v : members) f[v] = 1;
  return f;
}

std::vector<char> flag_range(int n, int lo, int hi) {
  std::vector<char> f(static_cast<std::size_t>(n) + 1, 0);
  for (int v = lo; v <= hi; ++v) f[v] = 1;
  return f;
}

// the hand example: root u = 5 with internal children 6, 7 carrying leaves
// from the matched block {1..4}
GraphSample hand_src_graph() {
  return graph_from_edges(12, {{5, 6}, {5, 7}, {2, 6}, {3, 7}});
}

}  // namespace

TEST_CASE("init_state: identity seed block of size floor(eta*n)") {
  TreeTemplate tree = build_tree({4}, 1);  // xi = 4, chi = 5
  MatchState st = init_state(tree, params_for(Rational(3, 80), 100), 1000, 7);
  CHECK(st.m0 == 37);
  CHECK(st.matched == 37);
  for (int v = 1; v <= 37; ++v) {
    CHECK(st.pi[v] == v);
    CHECK(st.src_matched[v] == 1);
    CHECK(st.dst_used[v] == 1);
  }
  CHECK(st.pi[38] == 0);
  CHECK(st.src_cursor == 38);
  CHECK(st.dst_cursor == 38);
  CHECK(st.usage[1] == 0);

  MatchState small = init_state(tree, params_for(Rational(1, 10), 100), 100, 7);
  CHECK(small.m0 == 10);
}

TEST_CASE("init_state rejects instances too small for the tree") {
  TreeTemplate tree = build_tree({4}, 1);
  // floor(eta*n) = 0 leaves no pool for the 4 leaf positions
  CHECK_THROWS_AS(init_state(tree, params_for(Rational(3, 80), 100), 10, 7), ConfigError);
  // seed block of 18 leaves only 2 sources for 5 internal positions
  CHECK_THROWS_AS(init_state(tree, params_for(Rational(9, 10), 100), 20, 7), ConfigError);
  CHECK_THROWS_AS(init_state(tree, params_for(Rational(1, 10), 100), 0, 7), ConfigError);
}

TEST_CASE("tuple_priority: deterministic, order- and seed-sensitive") {
  std::vector<int> a{1, 2}, b{2, 1};
  CHECK(tuple_priority(42, 2, a) == tuple_priority(42, 2, a));
  CHECK_FALSE(tuple_priority(42, 2, a) == tuple_priority(42, 2, b));
  CHECK_FALSE(tuple_priority(42, 2, a) == tuple_priority(43, 2, a));
  CHECK_FALSE(tuple_priority(42, 2, a) == tuple_priority(42, 3, a));
  // strict weak order sanity on the lex fallback
  PriorityKey k = tuple_priority(42, 2, a);
  CHECK_FALSE(k < k);
}

TEST_CASE("tuple_priority: top hi-bits spread uniformly over 16 buckets") {
  // chi-squared with 15 degrees of freedom; 37.697 is the 0.1% tail
  long long counts[16] = {0};
  for (int i = 0; i < 10000; ++i) {
    std::vector<int> t{i + 1};
    ++counts[tuple_priority(42, 1, t).hi >> 60];
  }
  double chi2 = 0.0;
  for (long long c : counts) {
    double d = static_cast<double>(c) - 625.0;
    chi2 += d * d / 625.0;
  }
  CHECK(chi2 < 37.697);
}

TEST_CASE("plan_embedding: smallest free position adjacent to the known set") {
  TreeTemplate tree = build_tree({2}, 1);
  std::vector<int> fixed(6, 0);
  fixed[1] = 99;
  EmbedPlan plan = plan_embedding(tree, fixed);
  CHECK(plan.order == std::vector<int>{2, 3, 4, 5});
  CHECK(plan.anchor == std::vector<int>{1, 1, 2, 3});
  for (const auto& c : plan.checks) CHECK(c.empty());  // trees have no extra edges
  CHECK_THROWS_AS(plan_embedding(tree, std::vector<int>(6, 0)), std::logic_error);
}

TEST_CASE("enumerate_embeddings honors the cap and reports truncation") {
  // complete graph on 8 vertices: plenty of embeddings of the 5-vertex tree
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= 8; ++i)
    for (int j = i + 1; j <= 8; ++j) edges.push_back({i, j});
  GraphSample g = graph_from_edges(8, edges);
  TreeTemplate tree = build_tree({2}, 1);
  std::vector<int> fixed(6, 0);
  fixed[1] = 1;
  EmbedPlan plan = plan_embedding(tree, fixed);
  std::vector<char> all = flag_range(8, 1, 8);
  long long seen = 0;
  EmbedStats stats =
      enumerate_embeddings(tree, g, plan, fixed, all, all, 3, [&](const std::vector<int>&) {
        ++seen;
      });
  CHECK(stats.embeddings == 3);
  CHECK(seen == 3);
  CHECK(stats.cap_hit);
}

TEST_CASE("enumerate_src_candidates: two-candidate hand example") {
  GraphSample g = hand_src_graph();
  TreeTemplate tree = build_tree({2}, 1);
  std::vector<char> in_r = flag_range(12, 5, 12);
  std::vector<char> in_pool = flag_range(12, 1, 4);
  SrcEnumeration src = enumerate_src_candidates(g, tree, 5, in_r, in_pool, 42, 1000);
  REQUIRE(src.items.size() == 2);
  std::set<std::vector<int>> leaves{src.items[0].leaves, src.items[1].leaves};
  CHECK(leaves == std::set<std::vector<int>>{{2, 3}, {3, 2}});
  for (const SrcCandidate& c : src.items) {
    CHECK(c.internals[0] == 5);
    if (c.leaves == std::vector<int>{2, 3}) CHECK(c.internals == std::vector<int>{5, 6, 7});
    if (c.leaves == std::vector<int>{3, 2}) CHECK(c.internals == std::vector<int>{5, 7, 6});
    CHECK(oracle::embeds(tree, g, c.internals, c.leaves));
  }
  CHECK_FALSE(src.items[1].key < src.items[0].key);  // priority-ascending
}

TEST_CASE("enumerate_src_candidates: isolated pivot yields nothing") {
  GraphSample g = graph_from_edges(12, {{2, 6}, {3, 7}});
  TreeTemplate tree = build_tree({2}, 1);
  SrcEnumeration src =
      enumerate_src_candidates(g, tree, 5, flag_range(12, 5, 12), flag_range(12, 1, 4), 42, 1000);
  CHECK(src.items.empty());
  CHECK(src.stats.embeddings == 0);
}

TEST_CASE("enumerate_src_candidates agrees with brute tuple enumeration") {
  TreeTemplate tree = build_tree({2}, 1);
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    GraphSample g = sample_er(30, 0.3, seed);
    std::vector<char> in_r = flag_range(30, 13, 30);
    std::vector<char> in_pool = flag_range(30, 1, 12);
    SrcEnumeration src = enumerate_src_candidates(g, tree, 13, in_r, in_pool, 42, 2000000);
    REQUIRE_FALSE(src.stats.cap_hit);
    std::set<std::vector<int>> got;
    for (const SrcCandidate& c : src.items) {
      got.insert(c.leaves);
      CHECK(c.internals[0] == 13);
      CHECK(oracle::embeds(tree, g, c.internals, c.leaves));
    }
    CHECK(got.size() == src.items.size());  // leaves are distinct
    CHECK(got == oracle::naive_src_leaf_tuples(g, tree, 13, in_r, in_pool));
    for (std::size_t i = 1; i < src.items.size(); ++i)
      CHECK(priority_less(42, tree.xi, src.items[i - 1].leaves, src.items[i].leaves));
  }
}

TEST_CASE("find_dst_match: unique mirrored completion") {
  GraphSample h = graph_from_edges(12, {{5, 6}, {5, 7}, {2, 6}, {3, 7}});
  TreeTemplate tree = build_tree({2}, 1);
  DstResult dst = find_dst_match(h, tree, {2, 3}, flag_range(12, 5, 12), 42, 1000);
  REQUIRE(dst.found);
  CHECK(dst.internals == std::vector<int>{5, 6, 7});

  GraphSample empty = graph_from_edges(12, {});
  DstResult none = find_dst_match(empty, tree, {2, 3}, flag_range(12, 5, 12), 42, 1000);
  CHECK_FALSE(none.found);
  CHECK_THROWS_AS(find_dst_match(h, tree, {2}, flag_range(12, 5, 12), 42, 1000), ConfigError);
}

TEST_CASE("find_dst_match agrees with the brute priority-minimal tuple") {
  TreeTemplate tree = build_tree({2}, 1);
  for (std::uint64_t seed : {201u, 202u, 203u, 204u}) {
    GraphSample h = sample_er(20, 0.35, seed);
    for (bool free_everywhere : {false, true}) {
      std::vector<char> in_free =
          free_everywhere ? flag_range(20, 1, 20) : flag_range(20, 11, 20);
      std::vector<int> leaf_images{1, 2};
      DstResult got = find_dst_match(h, tree, leaf_images, in_free, 42, 2000000);
      REQUIRE_FALSE(got.stats.cap_hit);
      auto want = oracle::naive_dst_best(h, tree, leaf_images, in_free, 42);
      CHECK(got.found == want.has_value());
      if (want) CHECK(got.internals == *want);
    }
  }
}

TEST_CASE("match_step: failure matches the pivot to the smallest unused target") {
  GraphSample g = graph_from_edges(12, {});
  GraphSample h = graph_from_edges(12, {});
  TreeTemplate tree = build_tree({2}, 1);
  MatchState st = init_state(tree, params_for(Rational(1, 3), 5), 12, 42);
  REQUIRE(st.m0 == 4);
  StepRecord rec = match_step(g, h, tree, st, 1000);
  CHECK_FALSE(rec.success);
  CHECK(rec.u == 5);
  CHECK(rec.cand_size == 0);
  CHECK(rec.explored == 0);
  CHECK(rec.failed == 0);
  CHECK(st.pi[5] == 5);
  CHECK(st.matched == 5);
  CHECK(st.step == 1);
  CHECK(rec.s == 1);
  for (int v = 1; v <= 12; ++v) CHECK(st.usage[v] == 0);
}

TEST_CASE("match_step: success maps the whole source copy onto the target copy") {
  GraphSample g = hand_src_graph();
  // target side completes either leaf order
  GraphSample h = graph_from_edges(12, {{2, 9}, {2, 10}, {3, 9}, {3, 10}, {8, 9}, {8, 10}});
  TreeTemplate tree = build_tree({2}, 1);
  MatchState st = init_state(tree, params_for(Rational(1, 3), 5), 12, 42);
  StepRecord rec = match_step(g, h, tree, st, 100000);
  REQUIRE(rec.success);
  CHECK(rec.u == 5);
  CHECK(rec.cand_size == 2);
  CHECK(rec.mt_src[0] == 5);
  CHECK(std::set<int>(rec.mt_src.begin(), rec.mt_src.end()) == std::set<int>{5, 6, 7});
  CHECK(std::set<int>(rec.mt_dst.begin(), rec.mt_dst.end()) == std::set<int>{8, 9, 10});
  for (int t = 0; t < tree.chi; ++t) CHECK(st.pi[rec.mt_src[t]] == rec.mt_dst[t]);
  CHECK(st.matched == 4 + 3);
  // each vertex of the matched copies got exactly one usage tick
  std::set<int> touched(rec.mt_leaves.begin(), rec.mt_leaves.end());
  touched.insert(rec.mt_src.begin(), rec.mt_src.end());
  touched.insert(rec.mt_dst.begin(), rec.mt_dst.end());
  for (int v = 1; v <= 12; ++v) CHECK(st.usage[v] == (touched.count(v) ? 1 : 0));
  // all zeta tree edges materialize in both graphs
  TraceAudit audit = audit_trace(g, h, tree, {rec}, st.pi);
  CHECK(audit.successes == 1);
  CHECK(audit.violations == 0);
}

TEST_CASE("match_step: exhausted leaves drop out of the pool") {
  GraphSample g = hand_src_graph();
  GraphSample h = graph_from_edges(12, {{2, 9}, {2, 10}, {3, 9}, {3, 10}, {8, 9}, {8, 10}});
  TreeTemplate tree = build_tree({2}, 1);
  MatchState st = init_state(tree, params_for(Rational(1, 3), 5), 12, 42);
  st.usage[2] = 5;  // at kappa0: vertex 2 may no longer serve as a leaf
  StepRecord rec = match_step(g, h, tree, st, 100000);
  CHECK_FALSE(rec.success);  // both candidate tuples needed vertex 2
  CHECK(rec.cand_size == 0);
  CHECK(st.pi[5] == 5);
}

TEST_CASE("run_greedy on edgeless graphs degenerates to the identity") {
  GraphSample g = graph_from_edges(50, {});
  GraphSample h = graph_from_edges(50, {});
  TreeTemplate tree = build_tree({2}, 1);
  ParamSet params = params_for(Rational(1, 5), 10);
  GreedyResult res = run_greedy(g, h, tree, params, 42, 1000);
  CHECK(res.m0 == 10);
  CHECK(res.trace.size() == 31);  // matched walks 10 -> 41, one failure per step
  for (int v = 1; v <= 50; ++v) CHECK(res.pi[v] == v);
  for (const StepRecord& rec : res.trace) CHECK_FALSE(rec.success);
}

TEST_CASE("run_greedy: permutation, audit, and certified bound on random inputs") {
  TreeTemplate tree = build_tree({1, 2}, 1);
  ParamSet params = params_for(Rational(1, 16), 1537);
  GraphSample g = sample_er(200, 0.3, 123);
  GraphSample h = sample_er(200, 0.3, 456);
  GreedyResult res = run_greedy(g, h, tree, params, 99, 1000000);

  std::vector<char> seen(201, 0);
  for (int v = 1; v <= 200; ++v) {
    REQUIRE(res.pi[v] >= 1);
    REQUIRE(res.pi[v] <= 200);
    CHECK_FALSE(seen[res.pi[v]]);
    seen[res.pi[v]] = 1;
  }

  long long successes = 0;
  int last_u = 0;
  for (const StepRecord& rec : res.trace) {
    successes += rec.success ? 1 : 0;
    CHECK(rec.u > last_u);  // pivots climb strictly
    last_u = rec.u;
    CHECK(rec.explored <= rec.cand_size);
    CHECK(rec.failed <= rec.explored);
  }
  REQUIRE(successes > 0);  // p = .3 is dense enough that the search lands copies

  TraceAudit audit = audit_trace(g, h, tree, res.trace, res.pi);
  CHECK(audit.successes == successes);
  CHECK(audit.violations == 0);
  CHECK(tree.zeta * successes <= oracle::dense_overlap(g, h, res.pi));
}

TEST_CASE("run_greedy is deterministic") {
  TreeTemplate tree = build_tree({2}, 1);
  ParamSet params = params_for(Rational(1, 10), 500);
  GraphSample g = sample_er(120, 0.25, 7);
  GraphSample h = sample_er(120, 0.25, 8);
  GreedyResult a = run_greedy(g, h, tree, params, 5, 100000);
  GreedyResult b = run_greedy(g, h, tree, params, 5, 100000);
  CHECK(a.pi == b.pi);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].u == b.trace[i].u);
    CHECK(a.trace[i].success == b.trace[i].success);
    CHECK(a.trace[i].mt_leaves == b.trace[i].mt_leaves);
    CHECK(a.trace[i].mt_dst == b.trace[i].mt_dst);
    CHECK(a.trace[i].embeddings == b.trace[i].embeddings);
  }
  // a different priority seed reorders the search
  GreedyResult c = run_greedy(g, h, tree, params, 6, 100000);
  CHECK(c.pi != a.pi);
}

TEST_CASE("match_step agrees with a literal transcription of the step") {
  TreeTemplate tree = build_tree({2}, 1);
  ParamSet params = params_for(Rational(1, 6), 50);
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    GraphSample g = sample_er(18, 0.35, seed);
    GraphSample h = sample_er(18, 0.35, seed + 100);
    MatchState st = init_state(tree, params, 18, 9);
    for (int s = 0; s < 3; ++s) {
      oracle::LiteralStep want = oracle::literal_match_step(g, h, tree, st);
      StepRecord got = match_step(g, h, tree, st, 2000000);
      REQUIRE_FALSE(got.cap_hit);
      CHECK(got.u == want.u);
      CHECK(got.success == want.success);
      CHECK(got.cand_size == want.cand_size);
      CHECK(got.failed == want.failed);
      if (want.success) {
        CHECK(got.mt_leaves == want.leaves);
        CHECK(got.mt_dst == want.dst);
      }
    }
  }
}
