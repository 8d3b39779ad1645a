#include <gtest/gtest.h>

#include <random>

#include "coarse/morse.hpp"
#include "support.hpp"

using namespace coarse;
namespace ts = testing_support;

namespace {

Vertex at(int w, int x, int y) { return y * w + x; }

std::vector<Vertex> row_path(int w, int y, int x0, int x1) {
  std::vector<Vertex> out;
  for (int x = x0; x <= x1; ++x) out.push_back(at(w, x, y));
  return out;
}

// Thinness of gamma for the all-geodesics system using Floyd on punctured
// graphs: a leg u -> v avoiding the ball exists iff the punctured distance
// equals the plain one.
bool brute_thin(const ts::RawGraph& raw, const std::vector<Vertex>& gamma, const Rational& eps,
                const Rational& A, int n) {
  auto d = ts::floyd(raw);
  const Vertex lo = gamma.front(), hi = gamma.back();
  const int dist = d[lo][hi];
  for (Vertex z : gamma) {
    std::vector<bool> keep(raw.n);
    for (Vertex v = 0; v < raw.n; ++v) keep[v] = Rational(d[z][v]) > eps * dist;
    if (!keep[lo] || !keep[hi]) continue;
    auto pd = ts::floyd(raw, keep);
    std::vector<int> best(raw.n, ts::kInf);
    best[hi] = 0;
    for (int k = 0; k < n; ++k) {
      auto next = best;
      for (Vertex u = 0; u < raw.n; ++u) {
        if (best[u] >= ts::kInf) continue;
        for (Vertex v = 0; v < raw.n; ++v) {
          if (keep[u] && keep[v] && pd[u][v] == d[u][v]) next[v] = std::min(next[v], best[u] + d[u][v]);
        }
      }
      best = std::move(next);
    }
    if (best[lo] < ts::kInf && Rational(best[lo]) <= A * dist) return false;
  }
  return true;
}

ThinnessParams params(Rational eps, Rational A, int n, Rational R = 0) {
  ThinnessParams p;
  p.epsilon = eps;
  p.A = A;
  p.n = n;
  p.R = R;
  return p;
}

// Longest walk excursion, by enumerating every walk of length <= budget.
int brute_gauge(const ts::RawGraph& raw, const std::vector<Vertex>& gamma, const Rational& Q,
                const Rational& q) {
  auto d = ts::floyd(raw);
  auto adj = raw.adjacency();
  int best = 0;
  for (std::size_t s = 0; s < gamma.size(); ++s) {
    for (std::size_t t = s + 1; t < gamma.size(); ++t) {
      auto dist_to_sub = [&](Vertex v) {
        int m = ts::kInf;
        for (std::size_t k = s; k <= t; ++k) m = std::min(m, d[v][gamma[k]]);
        return m;
      };
      const auto budget = floor_of(Q * d[gamma[s]][gamma[t]] + q);
      std::vector<Vertex> walk{gamma[s]};
      std::function<void()> rec = [&] {
        if (walk.back() == gamma[t]) {
          int far = 0;
          for (Vertex v : walk) far = std::max(far, dist_to_sub(v));
          best = std::max(best, far);
        }
        if (static_cast<std::int64_t>(walk.size()) - 1 >= budget) return;
        for (Vertex w = 0; w < raw.n; ++w) {
          if (!adj[walk.back()][w]) continue;
          walk.push_back(w);
          rec();
          walk.pop_back();
        }
      };
      rec();
    }
  }
  return best;
}

}  // namespace

TEST(Morse, ParamsValidated) {
  auto g = ts::path_graph(3).build();
  auto ps = PathSystem::all_geodesics(g);
  EdgePath p(*g, {0, 1, 2});
  EXPECT_THROW(proportionally_thin(p, params(0, 1, 3), ps), InputError);
  EXPECT_THROW(proportionally_thin(p, params(1, 1, 3), ps), InputError);
  EXPECT_THROW(proportionally_thin(p, params(Rational(1, 4), Rational(1, 2), 3), ps), InputError);
  EXPECT_THROW(proportionally_thin(p, params(Rational(1, 4), 1, 0), ps), InputError);
}

TEST(Morse, GeodesicsAreHalfThin) {
  for (auto raw : {ts::grid_graph(5, 5), ts::petersen(), ts::cycle_graph(8)}) {
    auto g = raw.build();
    auto ps = PathSystem::all_geodesics(g);
    for (Vertex y = 0; y < raw.n; ++y) {
      auto h = lex_min_geodesic(*g, 0, y);
      for (int n : {1, 3, 5}) EXPECT_TRUE(proportionally_thin(h, params(Rational(1, 2), 5, n), ps).verdict);
    }
  }
}

TEST(Morse, StaircaseAxisExample) {
  const int half = 8;
  auto raw = ts::grid_graph(2 * half + 1, 2 * half + 1);
  auto ps = PathSystem::staircase_z2(raw.build(), half);
  std::vector<Vertex> axis;
  for (int x = 0; x <= 8; ++x) axis.push_back(ps.at(x, 0));
  EdgePath gamma(ps.graph(), axis);
  for (int A : {1, 3, 10}) {
    EXPECT_TRUE(proportionally_thin(gamma, params(Rational(1, 4), A, 2), ps).verdict);
  }
  auto p = params(Rational(1, 4), 3, 3);
  auto rep = proportionally_thin(gamma, p, ps);
  ASSERT_FALSE(rep.verdict);
  ASSERT_TRUE(rep.witness && rep.witness->line);
  EXPECT_EQ(rep.witness->line->leg_count(), 3);
  EXPECT_TRUE(verify_thinness_witness(gamma, p, ps, *rep.witness));

  PolygonalLine rect{{ps.combing_line(ps.at(8, 0), ps.at(8, 8)), ps.combing_line(ps.at(8, 8), ps.at(0, 8)),
                      ps.combing_line(ps.at(0, 8), ps.at(0, 0))}};
  MorseWitness w{0, 8, rect, ps.at(4, 0), std::nullopt};
  EXPECT_TRUE(verify_thinness_witness(gamma, p, ps, w));
}

TEST(Morse, ThinnessMatchesPuncturedFloyd) {
  auto raw = ts::grid_graph(6, 5);
  auto g = raw.build();
  auto ps = PathSystem::all_geodesics(g);
  std::mt19937 rng(4);
  std::uniform_int_distribution<Vertex> pick(0, raw.n - 1);
  int failures = 0;
  for (int trial = 0; trial < 30; ++trial) {
    auto h = lex_min_geodesic(*g, pick(rng), pick(rng));
    for (auto eps : {Rational(1, 8), Rational(1, 4)}) {
      for (int n : {1, 2, 3}) {
        for (int A : {1, 2, 4}) {
          bool expect = brute_thin(raw, h.vertices(), eps, A, n);
          auto p = params(eps, A, n);
          auto rep = proportionally_thin(h, p, ps);
          ASSERT_EQ(rep.verdict, expect);
          if (!rep.verdict) {
            ++failures;
            EXPECT_TRUE(verify_thinness_witness(h, p, ps, *rep.witness));
          }
        }
      }
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(Morse, TreeThinnessMatchesPuncturedFloyd) {
  for (auto raw : {ts::spider(), ts::regular_tree_ball(3, 3)}) {
    auto g = raw.build();
    auto ps = PathSystem::all_geodesics(g);
    for (Vertex a = 0; a < raw.n; a += 3) {
      for (Vertex b = 1; b < raw.n; b += 4) {
        auto h = lex_min_geodesic(*g, a, b);
        for (int n : {2, 3}) {
          ASSERT_TRUE(brute_thin(raw, h.vertices(), Rational(1, 4), 4, n));
          EXPECT_TRUE(proportionally_thin(h, params(Rational(1, 4), 4, n), ps).verdict);
        }
      }
    }
  }
}

TEST(Morse, ThinnessMonotone) {
  auto raw = ts::grid_graph(7, 7);
  auto g = raw.build();
  auto ps = PathSystem::all_geodesics(g);
  std::mt19937 rng(9);
  std::uniform_int_distribution<Vertex> pick(0, raw.n - 1);
  for (int trial = 0; trial < 15; ++trial) {
    auto h = lex_min_geodesic(*g, pick(rng), pick(rng));
    if (!proportionally_thin(h, params(Rational(1, 8), 3, 3), ps).verdict) continue;
    EXPECT_TRUE(proportionally_thin(h, params(Rational(1, 4), 3, 3), ps).verdict);
    EXPECT_TRUE(proportionally_thin(h, params(Rational(1, 8), 2, 3), ps).verdict);
    EXPECT_TRUE(proportionally_thin(h, params(Rational(1, 8), 3, 2), ps).verdict);
  }
}

TEST(Morse, WeaklyPolygonallyMorse) {
  auto grid = ts::grid_graph(13, 13);
  auto ps = PathSystem::all_geodesics(grid.build());
  EdgePath axis(ps.graph(), row_path(13, 6, 0, 12));
  EXPECT_TRUE(weakly_polygonally_morse(axis, params(Rational(1, 8), 4, 3, 13), ps).verdict);
  auto p = params(Rational(1, 8), 4, 3, 4);
  auto rep = weakly_polygonally_morse(axis, p, ps);
  ASSERT_FALSE(rep.verdict);
  ASSERT_TRUE(rep.witness);
  EXPECT_GE(rep.witness->j - rep.witness->i, 4);
  EXPECT_TRUE(verify_thinness_witness(axis, p, ps, *rep.witness));
  auto window = row_path(13, 6, rep.witness->i, rep.witness->j);
  EXPECT_FALSE(brute_thin(grid, window, p.epsilon, p.A, p.n));

  auto tree = PathSystem::tree_geodesics(ts::regular_tree_ball(4, 3).build());
  auto h = lex_min_geodesic(tree.graph(), 20, 40);
  EXPECT_TRUE(weakly_polygonally_morse(h, params(Rational(1, 10), 10, 7, 1), tree).verdict);

  auto scaled = params(Rational(1, 8), 4, 3, 4);
  scaled.L = 3;
  EXPECT_TRUE(weakly_polygonally_morse(axis, scaled, ps).verdict);
}

TEST(Morse, PContracting) {
  auto tree = PathSystem::tree_geodesics(ts::spider().build());
  EdgePath th(tree.graph(), {3, 2, 1, 0, 4, 5, 6});
  EXPECT_TRUE(p_contracting_check(th, 1, tree).verdict);

  auto grid = PathSystem::all_geodesics(ts::grid_graph(11, 11).build());
  EdgePath axis(grid.graph(), row_path(11, 0, 0, 10));
  auto rep = p_contracting_check(axis, 2, grid);
  ASSERT_FALSE(rep.verdict);
  ASSERT_TRUE(rep.witness && rep.witness->pair && rep.witness->line);
  auto [x, y] = *rep.witness->pair;
  EXPECT_GT(x / 11 + y / 11, 0);
  EXPECT_GT(rep.witness->line->flatten().length(), 0);
  EXPECT_GT(rep.witness->line->clearance(grid.graph(), *rep.witness->point), 2);

  auto line = PathSystem::all_geodesics(ts::path_graph(9).build());
  EdgePath whole(line.graph(), {0, 1, 2, 3, 4, 5, 6, 7, 8});
  for (int C = 0; C <= 3; ++C) EXPECT_TRUE(p_contracting_check(whole, C, line).verdict);
  EXPECT_EQ(p_contracting_constant(whole, line), 0);
}

TEST(Morse, StrongContraction) {
  auto sp = PathSystem::tree_geodesics(ts::spider().build());
  EXPECT_EQ(strong_contraction_constant(EdgePath(sp.graph(), {3, 2, 1, 0, 4, 5, 6}), sp.graph()), 0);
  auto grid = ts::grid_graph(9, 9).build();
  EXPECT_GE(strong_contraction_constant(EdgePath(*grid, row_path(9, 0, 0, 8)), *grid), 6);
  EXPECT_EQ(strong_contraction_constant(EdgePath::trivial(*grid, 40), *grid), 0);
}

TEST(Morse, StrongBoundedByPContraction) {
  std::vector<std::pair<PathSystem, EdgePath>> cases;
  auto tree = PathSystem::tree_geodesics(ts::regular_tree_ball(4, 3).build());
  cases.emplace_back(tree, lex_min_geodesic(tree.graph(), 30, 50));
  auto grid = PathSystem::all_geodesics(ts::grid_graph(7, 7).build());
  cases.emplace_back(grid, EdgePath(grid.graph(), row_path(7, 3, 0, 6)));
  cases.emplace_back(grid, lex_min_geodesic(grid.graph(), 0, 48));
  auto sp = PathSystem::tree_geodesics(ts::spider().build());
  cases.emplace_back(sp, EdgePath(sp.graph(), {3, 2, 1, 0, 4, 5, 6}));
  for (const auto& [ps, h] : cases) {
    Dist C = p_contracting_constant(h, ps);
    EXPECT_TRUE(p_contracting_check(h, C, ps).verdict);
    if (C > 0) EXPECT_FALSE(p_contracting_check(h, C - 1, ps).verdict);
    EXPECT_LE(strong_contraction_constant(h, ps.graph()), 14 * C + 2);
  }
}

TEST(Morse, ProjectionPoints) {
  const int w = 9;
  auto g = ts::grid_graph(w, 7).build();
  EdgePath gamma(*g, row_path(w, 0, 0, 8));
  std::vector<Vertex> drop;
  for (int y = 5; y >= 0; --y) drop.push_back(at(w, 3, y));
  EdgePath h(*g, drop);
  auto pts = projection_points(h, gamma, 2);
  EXPECT_EQ(pts.upper, at(w, 3, 2));
  EXPECT_EQ(pts.lowers, std::vector<int>{3});
  EXPECT_EQ(projection_points(h, gamma, 0).upper, at(w, 3, 0));
  EXPECT_EQ(projection_points(h, gamma, 100).upper, h.front());
  auto wide = projection_points(h, gamma, 3);
  EXPECT_EQ(wide.upper, at(w, 3, 3));
  EXPECT_EQ(wide.lowers, std::vector<int>{3});
}

TEST(Morse, AlmostOrthogonal) {
  const int w = 9;
  auto grid = PathSystem::all_geodesics(ts::grid_graph(w, 7).build());
  EdgePath gamma(grid.graph(), row_path(w, 0, 0, 8));
  auto found = find_almost_orthogonal(at(w, 3, 5), gamma, 1, 2, grid);
  std::vector<Vertex> drop;
  for (int y = 5; y >= 0; --y) drop.push_back(at(w, 3, y));
  EXPECT_EQ(found.path.vertices(), drop);
  EXPECT_EQ(find_almost_orthogonal(at(w, 4, 0), gamma, 1, 2, grid).path.length(), 0);

  auto raw = ts::regular_tree_ball(4, 4);
  auto tree = PathSystem::tree_geodesics(raw.build());
  const MetricGraph& g = tree.graph();
  // a diameter geodesic between two leaves in different branches
  Vertex a = raw.n - 1, b = 0;
  for (Vertex v = raw.n - 1; v >= 0; --v) {
    if (g.distance(a, v) == 8) {
      b = v;
      break;
    }
  }
  ASSERT_EQ(g.distance(a, b), 8);
  auto diam = lex_min_geodesic(g, a, b);
  for (Vertex x = 0; x < raw.n; x += 7) {
    auto res = find_almost_orthogonal(x, diam, 1, 2, tree);
    Dist to_gamma = distance_to_path(g, x, diam);
    EXPECT_EQ(res.path.length(), to_gamma);
    EXPECT_TRUE(is_almost_orthogonal(res.path, diam, 1, 2, tree));
  }
}

TEST(Morse, GaugeOracle) {
  auto sp = ts::spider();
  auto g = sp.build();
  EdgePath th(*g, {3, 2, 1, 0, 4, 5, 6});
  EXPECT_EQ(morse_gauge_oracle(th, 1, 0, *g).value, 0);
  EXPECT_EQ(morse_gauge_oracle(EdgePath::trivial(*g, 2), 3, 5, *g).value, 0);
  // budget Q d + q - d spent on an excursion of half that depth
  EXPECT_EQ(morse_gauge_oracle(th, 2, 0, *g).value, 3);

  auto grid = ts::grid_graph(9, 9).build();
  EdgePath axis(*grid, row_path(9, 0, 0, 8));
  auto v = morse_gauge_oracle(axis, 3, 0, *grid);
  EXPECT_GE(v.value, 4);

  for (auto raw : {ts::cycle_graph(6), ts::grid_graph(3, 3), ts::theta_graph()}) {
    auto rg = raw.build();
    auto h = lex_min_geodesic(*rg, 0, raw.n - 1);
    for (auto [Q, q] : {std::pair{Rational(1), Rational(0)}, {Rational(2), Rational(1)}, {Rational(3, 2), Rational(2)}}) {
      EXPECT_EQ(morse_gauge_oracle(h, Q, q, *rg).value, brute_gauge(raw, h.vertices(), Q, q)) << raw.name;
    }
  }
}
