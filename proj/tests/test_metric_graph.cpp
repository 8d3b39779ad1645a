#include <gtest/gtest.h>

#include <random>

#include "coarse/metric_graph.hpp"
#include "support.hpp"

using namespace coarse;
namespace ts = testing_support;

TEST(MetricGraph, RejectsBadInput) {
  std::vector<std::pair<Vertex, Vertex>> loop{{0, 0}};
  EXPECT_THROW(MetricGraph::from_edges(2, loop), InputError);
  std::vector<std::pair<Vertex, Vertex>> multi{{0, 1}, {1, 0}};
  EXPECT_THROW(MetricGraph::from_edges(2, multi), InputError);
  std::vector<std::pair<Vertex, Vertex>> none;
  EXPECT_THROW(MetricGraph::from_edges(2, none), InputError);
  std::vector<std::pair<Vertex, Vertex>> out_of_range{{0, 5}};
  EXPECT_THROW(MetricGraph::from_edges(2, out_of_range), InputError);
  auto g = ts::path_graph(3).build();
  EXPECT_THROW(distance_map(*g, 7), InputError);
}

TEST(MetricGraph, PathDistances) {
  auto g = ts::path_graph(3).build();
  auto row = distance_map(*g, 0);
  EXPECT_EQ(row, (DistanceRow{0, 1, 2}));
  for (Vertex v = 0; v < 3; ++v) EXPECT_EQ(distance_map(*g, v)[v], 0);
}

TEST(MetricGraph, DistancesMatchFloydOnCorpus) {
  auto corpus = ts::small_corpus();
  corpus.push_back(ts::grid_graph(5, 5));
  for (const auto& raw : corpus) {
    auto g = raw.build();
    auto d = ts::floyd(raw);
    for (Vertex u = 0; u < raw.n; ++u) {
      for (Vertex v = 0; v < raw.n; ++v) {
        ASSERT_EQ(g->distance(u, v), d[u][v]) << raw.name;
        ASSERT_EQ(g->distance(u, v), g->distance(v, u));
        if (u != v) ASSERT_GT(g->distance(u, v), 0);
        for (Vertex w = 0; w < raw.n; ++w) {
          ASSERT_LE(g->distance(u, w), g->distance(u, v) + g->distance(v, w));
        }
      }
    }
  }
  auto grid = ts::grid_graph(5, 5).build();
  EXPECT_EQ(grid->distance(0, 24), 8);
}

TEST(MetricGraph, PuncturedExamples) {
  auto p = ts::path_graph(3).build();
  auto row = punctured_distance_map(*p, 0, Ball{1, 0});
  EXPECT_EQ(row[2], kUnreachable);

  auto c8 = ts::cycle_graph(8).build();
  EXPECT_EQ(punctured_distance_map(*c8, 0, Ball{2, 0})[4], 4);

  auto grid = ts::grid_graph(9, 9).build();
  auto at = [](int x, int y) { return y * 9 + x; };
  EXPECT_EQ(punctured_distance_map(*grid, at(0, 4), Ball{at(4, 4), Rational(7, 2)})[at(8, 4)], 16);

  EXPECT_THROW(punctured_distance_map(*grid, at(4, 5), Ball{at(4, 4), 1}), PreconditionError);
}

TEST(MetricGraph, PuncturedMatchesFloydAndDominatesPlain) {
  for (const auto& raw : ts::small_corpus()) {
    auto g = raw.build();
    auto plain = ts::floyd(raw);
    for (Vertex c = 0; c < raw.n; ++c) {
      for (int r2 = -2; r2 <= 4; ++r2) {
        Ball ball{c, Rational(r2, 2)};
        std::vector<bool> keep(raw.n);
        for (Vertex v = 0; v < raw.n; ++v) keep[v] = !ball.contains_distance(plain[c][v]);
        auto oracle = ts::floyd(raw, keep);
        for (Vertex s = 0; s < raw.n; ++s) {
          if (!keep[s]) continue;
          auto row = punctured_distance_map(*g, s, ball);
          for (Vertex v = 0; v < raw.n; ++v) {
            int expect = oracle[s][v] >= ts::kInf ? kUnreachable : oracle[s][v];
            ASSERT_EQ(row[v], expect) << raw.name;
            if (row[v] != kUnreachable) ASSERT_GE(row[v], plain[s][v]);
            if (ball.empty()) ASSERT_EQ(row[v], plain[s][v]);
          }
        }
      }
    }
  }
}

namespace {

Rational brute_delta(const ts::RawGraph& raw) {
  auto d = ts::floyd(raw);
  int best = 0;
  for (int w = 0; w < raw.n; ++w)
    for (int x = 0; x < raw.n; ++x)
      for (int y = 0; y < raw.n; ++y)
        for (int z = 0; z < raw.n; ++z) {
          std::array<int, 3> s{d[w][x] + d[y][z], d[w][y] + d[x][z], d[w][z] + d[x][y]};
          std::sort(s.begin(), s.end());
          best = std::max(best, s[2] - s[1]);
        }
  return Rational(best, 2);
}

}  // namespace

TEST(MetricGraph, FourPointDelta) {
  for (const auto& raw : ts::small_corpus()) {
    auto g = raw.build();
    auto est = four_point_delta(*g, SamplingSpec::exhaustive());
    EXPECT_TRUE(est.exact);
    EXPECT_EQ(est.delta, brute_delta(raw)) << raw.name;
    auto sampled = four_point_delta(*g, SamplingSpec::sampled(500, 3));
    EXPECT_FALSE(sampled.exact);
    EXPECT_LE(sampled.delta, est.delta);
  }
  EXPECT_EQ(four_point_delta(*ts::spider().build()).delta, 0);
  EXPECT_EQ(four_point_delta(*ts::path_graph(1).build()).delta, 0);
  auto grid = ts::grid_graph(5, 5);
  auto est = four_point_delta(*grid.build());
  EXPECT_GE(est.delta, 2);
  EXPECT_EQ(est.delta, brute_delta(grid));
  EXPECT_THROW(four_point_delta(*grid.build(), SamplingSpec::sampled(0, 1)), InputError);
}

TEST(MetricGraph, Medians) {
  auto grid = ts::grid_graph(5, 5).build();
  auto at = [](int x, int y) { return y * 5 + x; };
  EXPECT_EQ(median(*grid, at(0, 0), at(4, 0), at(0, 4)), at(0, 0));
  EXPECT_EQ(median(*grid, at(1, 2), at(1, 2), at(3, 3)), at(1, 2));
  auto sp = ts::spider().build();
  EXPECT_EQ(median(*sp, 3, 6, 9), 0);

  std::mt19937 rng(5);
  std::uniform_int_distribution<Vertex> pick(0, 24);
  for (int i = 0; i < 200; ++i) {
    Vertex x = pick(rng), y = pick(rng), z = pick(rng);
    Vertex m = median(*grid, x, y, z);
    EXPECT_EQ(median(*grid, x, z, y), m);
    EXPECT_EQ(median(*grid, y, x, z), m);
    EXPECT_EQ(median(*grid, y, z, x), m);
    EXPECT_EQ(median(*grid, z, x, y), m);
    EXPECT_EQ(median(*grid, z, y, x), m);
  }
  auto c5 = ts::cycle_graph(5).build();
  EXPECT_THROW(median(*c5, 0, 2, 4), StructuralError);
}

TEST(MetricGraph, MedianGraphRecognition) {
  EXPECT_TRUE(is_median_graph(*ts::spider().build()).is_median);
  EXPECT_TRUE(is_median_graph(*ts::grid_graph(4, 6).build()).is_median);
  EXPECT_TRUE(is_median_graph(*ts::cycle_graph(4).build()).is_median);
  EXPECT_TRUE(is_median_graph(*ts::domino_tail().build()).is_median);
  auto c5 = is_median_graph(*ts::cycle_graph(5).build());
  EXPECT_FALSE(c5.is_median);
  ASSERT_TRUE(c5.counterexample.has_value());
  EXPECT_NE(c5.intersection_size, 1);
  EXPECT_FALSE(is_median_graph(*ts::petersen().build()).is_median);
  EXPECT_FALSE(is_median_graph(*ts::complete_graph(4).build()).is_median);

  auto big = is_median_graph(*ts::grid_graph(20, 20).build(), 300, 2000, 4);
  EXPECT_FALSE(big.exhaustive);
  EXPECT_TRUE(big.is_median);
  EXPECT_EQ(big.triples_checked, 2000);
}

TEST(MetricGraph, GrowthAndDiameter) {
  auto line = ts::path_graph(41).build();
  for (int k = 0; k <= 10; ++k) EXPECT_EQ(growth(*line, 20, k).count, 2 * k + 1);
  auto grid = ts::grid_graph(21, 21).build();
  for (int k = 0; k <= 10; ++k) EXPECT_EQ(growth(*grid, 10 * 21 + 10, k).count, 2 * k * k + 2 * k + 1);
  EXPECT_TRUE(growth(*line, 0, 50).truncated);
  EXPECT_FALSE(growth(*line, 20, 5).truncated);
  EXPECT_EQ(growth_min(*line, 3).count, 4);

  for (const auto& raw : ts::small_corpus()) {
    auto d = ts::floyd(raw);
    int best = 0;
    for (auto& row : d) best = std::max(best, *std::max_element(row.begin(), row.end()));
    EXPECT_EQ(diameter(*raw.build()), best) << raw.name;
  }
  EXPECT_EQ(diameter(*ts::grid_graph(30, 7).build()), 35);
  EXPECT_TRUE(is_tree(*ts::spider().build()));
  EXPECT_FALSE(is_tree(*ts::cycle_graph(5).build()));
}

TEST(MetricGraph, CacheRelease) {
  auto g = ts::grid_graph(6, 6).build();
  Dist before = g->distance(0, 35);
  g->release_cache();
  EXPECT_EQ(g->distance(0, 35), before);
  MetricGraph copy = *g;
  EXPECT_EQ(copy.distance(0, 35), before);
}
