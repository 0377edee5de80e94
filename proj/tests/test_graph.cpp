#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "support/oracles.hpp"
#include "treematch/graph.hpp"

using namespace treematch;

TEST_CASE("resampling with one seed reproduces the edge set exactly") {
  GraphSample a = sample_er(1000, 0.01, 42);
  GraphSample b = sample_er(1000, 0.01, 42);
  CHECK(a.edges == b.edges);
  CHECK(a.edge_count() > 0);
}

TEST_CASE("different seeds give different samples") {
  GraphSample a = sample_er(1000, 0.01, 1);
  GraphSample b = sample_er(1000, 0.01, 2);
  CHECK(a.edges != b.edges);
}

TEST_CASE("p near one yields the complete triangle for every seed") {
  const double p = 1.0 - std::ldexp(1.0, -53);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GraphSample g = sample_er(3, p, seed);
    REQUIRE(g.edge_count() == 3);
    CHECK(g.edge_test(1, 2));
    CHECK(g.edge_test(1, 3));
    CHECK(g.edge_test(2, 3));
  }
}

TEST_CASE("edge count of a large sample sits within five sigmas") {
  const int n = 10000;
  const double p = 0.01;
  GraphSample g = sample_er(n, p, 7);
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  const double mean = pairs * p;
  const double sigma = std::sqrt(pairs * p * (1 - p));
  CHECK(std::abs(g.edge_count() - mean) <= 5.0 * sigma);
}

TEST_CASE("empirical density over repeated samples stays within three sigmas") {
  const int n = 200;
  const double p = 0.05;
  const int reps = 200;
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  long long total = 0;
  for (int r = 0; r < reps; ++r) total += sample_er(n, p, 1000 + r).edge_count();
  double mean_edges = static_cast<double>(total) / reps;
  double sigma_mean = std::sqrt(pairs * p * (1 - p) / reps);
  CHECK(std::abs(mean_edges - pairs * p) <= 3.0 * sigma_mean);
}

TEST_CASE("degree sums equal twice the edge count") {
  for (std::uint64_t seed : {1, 2, 3}) {
    GraphSample g = sample_er(500, 0.02, seed);
    long long deg_sum = 0;
    for (int v = 1; v <= g.n; ++v) deg_sum += g.degree(v);
    CHECK(deg_sum == 2 * g.edge_count());
  }
}

TEST_CASE("edge_test is symmetric, rejects loops, throws out of range") {
  GraphSample g = sample_er(100, 0.1, 5);
  for (auto [i, j] : g.edges) {
    CHECK(g.edge_test(i, j));
    CHECK(g.edge_test(j, i));
  }
  for (int v = 1; v <= g.n; ++v) CHECK_FALSE(g.edge_test(v, v));
  CHECK_THROWS_AS(g.edge_test(0, 1), std::out_of_range);
  CHECK_THROWS_AS(g.edge_test(1, 101), std::out_of_range);
  CHECK_THROWS_AS(g.edge_test(-3, 2), std::out_of_range);
}

TEST_CASE("edge_test agrees with a dense adjacency matrix") {
  GraphSample g = sample_er(100, 0.1, 7);
  std::vector<std::vector<char>> dense(101, std::vector<char>(101, 0));
  for (auto [i, j] : g.edges) dense[i][j] = dense[j][i] = 1;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) REQUIRE(g.edge_test(i, j) == static_cast<bool>(dense[i][j]));
}

TEST_CASE("edges come out sorted with i < j and no duplicates") {
  GraphSample g = sample_er(300, 0.05, 9);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    CHECK(g.edges[e].first < g.edges[e].second);
    if (e > 0) CHECK(g.edges[e - 1] < g.edges[e]);
  }
}

TEST_CASE("write then read round-trips the sample") {
  GraphSample g = sample_er(100, 0.1, 11);
  std::ostringstream out;
  write_edge_list(g, out);
  std::istringstream in(out.str());
  GraphSample back = read_edge_list(in);
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
}

TEST_CASE("edge list text format is exact: header then sorted pairs, LF") {
  GraphSample g = graph_from_edges(4, {{1, 2}, {2, 4}, {1, 3}});
  std::ostringstream out;
  write_edge_list(g, out);
  CHECK(out.str() == "4 3\n1 2\n1 3\n2 4\n");
}

TEST_CASE("read errors carry line numbers and reasons") {
  auto read_str = [](const std::string& text) {
    std::istringstream in(text);
    return read_edge_list(in, "input");
  };
  // malformed token on line 3
  CHECK_THROWS_WITH_AS(read_str("3 2\n1 2\n1 x\n"),
                       doctest::Contains("input:3"), ConfigError);
  // j <= i
  CHECK_THROWS_WITH_AS(read_str("3 1\n2 2\n"), doctest::Contains("i < j"), ConfigError);
  // vertex out of range
  CHECK_THROWS_WITH_AS(read_str("3 1\n1 4\n"), doctest::Contains("out of range"), ConfigError);
  // duplicate edge, reported on its line
  CHECK_THROWS_WITH_AS(read_str("3 3\n1 2\n1 3\n1 2\n"),
                       doctest::Contains("input:4"), ConfigError);
  // fewer edges than the header claims
  CHECK_THROWS_WITH_AS(read_str("3 2\n1 2\n"), doctest::Contains("expected 2 edges"),
                       ConfigError);
  // trailing content
  CHECK_THROWS_WITH_AS(read_str("3 1\n1 2\n2 3\n"), doctest::Contains("trailing"), ConfigError);
  // garbage header
  CHECK_THROWS_AS(read_str("nope\n"), ConfigError);
  // empty input
  CHECK_THROWS_AS(read_str(""), ConfigError);
}

TEST_CASE("sampler rejects out-of-range parameters") {
  CHECK_THROWS_AS(sample_er(0, 0.5, 1), ConfigError);
  CHECK_THROWS_AS(sample_er(10, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_er(10, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(sample_er(10, -0.1, 1), ConfigError);
  CHECK_THROWS_AS(sample_er(10, 1.5, 1), ConfigError);
}

TEST_CASE("graph_from_edges validates its input") {
  CHECK_THROWS_AS(graph_from_edges(3, {{1, 1}}), ConfigError);
  CHECK_THROWS_AS(graph_from_edges(3, {{2, 1}}), ConfigError);
  CHECK_THROWS_AS(graph_from_edges(3, {{1, 4}}), ConfigError);
  CHECK_THROWS_AS(graph_from_edges(3, {{1, 2}, {1, 2}}), ConfigError);
  GraphSample g = graph_from_edges(3, {{2, 3}, {1, 2}});
  CHECK(g.edge_count() == 2);
  CHECK(g.edges.front() == std::pair<int, int>{1, 2});
}

TEST_CASE("single-vertex graph samples to the empty graph") {
  GraphSample g = sample_er(1, 0.5, 3);
  CHECK(g.edge_count() == 0);
}
