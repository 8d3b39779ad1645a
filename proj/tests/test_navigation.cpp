#include <gtest/gtest.h>

#include <queue>
#include <random>

#include "coarse/navigation.hpp"
#include "support.hpp"

using namespace coarse;
namespace ts = testing_support;

namespace {

Vertex at(int w, int x, int y) { return y * w + x; }

EdgePath straight(const MetricGraph& g, int w, std::pair<int, int> a, std::pair<int, int> b) {
  std::vector<Vertex> vs{at(w, a.first, a.second)};
  int x = a.first, y = a.second;
  while (x != b.first) {
    x += b.first > x ? 1 : -1;
    vs.push_back(at(w, x, y));
  }
  while (y != b.second) {
    y += b.second > y ? 1 : -1;
    vs.push_back(at(w, x, y));
  }
  return EdgePath(g, vs);
}

// Plain BFS over a raw adjacency list, skipping vertices with d(v, c) < t.
std::optional<int> brute_divergence(const ts::RawGraph& raw, int a, int b, int c, const Rational& t) {
  auto d = ts::floyd(raw);
  std::vector<std::vector<int>> adj(raw.n);
  for (auto [u, v] : raw.edges) adj[u].push_back(v), adj[v].push_back(u);
  auto ok = [&](int v) { return Rational(d[v][c]) >= t; };
  std::vector<int> dist(raw.n, -1);
  std::queue<int> q;
  dist[a] = 0;
  q.push(a);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (dist[v] < 0 && ok(v)) dist[v] = dist[u] + 1, q.push(v);
    }
  }
  if (dist[b] < 0) return std::nullopt;
  return dist[b];
}

// Reduced-word distance written out independently of the library.
int word_distance(const std::string& u, const std::string& v) {
  std::size_t i = 0;
  while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
  return static_cast<int>(u.size() + v.size() - 2 * i);
}

std::string random_word(std::mt19937_64& rng, int len) {
  const std::string letters = "aAbB";
  std::string w;
  while (static_cast<int>(w.size()) < len) {
    char c = letters[rng() % 4];
    if (!w.empty() && reduce_word(std::string{w.back(), c}).empty()) continue;
    w.push_back(c);
  }
  return w;
}

}  // namespace

TEST(Divergence, Examples) {
  auto c8 = ts::cycle_graph(8).build();
  auto v = divergence_point(0, 4, 2, Rational(1, 2), 0, *c8);
  ASSERT_TRUE(v.length);
  EXPECT_EQ(*v.length, 4);
  EXPECT_EQ(v.threshold, Rational(1));
  EXPECT_EQ(*divergence_point(0, 4, 2, Rational(1, 2), 5, *c8).length, 4);
  EXPECT_EQ(*divergence_point(0, 3, 2, Rational(1, 2), 5, *c8).length, 3);

  auto tree = ts::regular_tree_ball(3, 3).build();
  // 1 -- 0 -- 2: the centre separates.
  EXPECT_FALSE(divergence_point(1, 2, 0, Rational(1, 2), 0, *tree).length);
  EXPECT_EQ(*divergence_point(1, 2, 0, Rational(1, 2), 1, *tree).length, 2);
  EXPECT_THROW(divergence_point(1, 1, 0, Rational(1, 2), 0, *tree), InputError);
}

TEST(Divergence, MatchesBruteForce) {
  std::vector<ts::RawGraph> graphs{ts::grid_graph(5, 5), ts::cycle_graph(9), ts::petersen(),
                                   ts::regular_tree_ball(3, 2)};
  for (const auto& raw : graphs) {
    auto g = raw.build();
    auto d = ts::floyd(raw);
    for (Rational delta : {Rational(1, 3), Rational(1, 2), Rational(2, 3)}) {
      for (Rational eps : {Rational(0), Rational(1, 2), Rational(2)}) {
        for (int a = 0; a < raw.n; ++a) {
          for (int b = a + 1; b < raw.n; ++b) {
            for (int c = 0; c < raw.n; c += 2) {
              Rational t = delta * std::min(d[c][a], d[c][b]) - eps;
              auto got = divergence_point(a, b, c, delta, eps, *g).length;
              auto want = brute_divergence(raw, a, b, c, t);
              ASSERT_EQ(got.has_value(), want.has_value()) << raw.name;
              if (got) ASSERT_EQ(*got, *want) << raw.name;
            }
          }
        }
      }
    }
  }
}

TEST(Divergence, Monotone) {
  auto raw = ts::grid_graph(7, 7);
  auto g = raw.build();
  std::mt19937_64 rng(5);
  auto value = [](const DivergenceValue& v) { return v.length ? *v.length : 1 << 20; };
  for (int trial = 0; trial < 300; ++trial) {
    Vertex a = rng() % 49, b = rng() % 49, c = rng() % 49;
    if (a == b) continue;
    const std::vector<Rational> eps{0, Rational(1, 2), 1, 3};
    const std::vector<Rational> deltas{Rational(1, 4), Rational(1, 2), Rational(3, 4)};
    for (const auto& dl : deltas) {
      for (std::size_t i = 1; i < eps.size(); ++i) {
        EXPECT_GE(value(divergence_point(a, b, c, dl, eps[i - 1], *g)),
                  value(divergence_point(a, b, c, dl, eps[i], *g)));
      }
    }
    for (const auto& e : eps) {
      for (std::size_t i = 1; i < deltas.size(); ++i) {
        EXPECT_LE(value(divergence_point(a, b, c, deltas[i - 1], e, *g)),
                  value(divergence_point(a, b, c, deltas[i], e, *g)));
      }
    }
  }
}

TEST(Divergence, ProfileGridIsLinear) {
  auto g = ts::grid_graph(13, 13).build();
  std::vector<int> ns{1, 2, 4, 6, 8, 12, 16, 24};
  auto prof = divergence_profile(*g, ns, Rational(1, 2), 0);
  EXPECT_TRUE(prof.exhaustive);
  ASSERT_TRUE(prof.linear_coefficient);
  EXPECT_LE(*prof.linear_coefficient, 8);
  EXPECT_TRUE(prof.linear);
  for (std::size_t i = 1; i < prof.entries.size(); ++i) {
    ASSERT_TRUE(prof.entries[i].value);
    EXPECT_GE(*prof.entries[i].value, *prof.entries[i - 1].value);
  }
  auto sampled = divergence_profile(*g, ns, Rational(1, 2), 0,
                                    {SamplingSpec::sampled(3000, 3), Rational(8), {}});
  EXPECT_FALSE(sampled.exhaustive);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ASSERT_TRUE(sampled.entries[i].value);
    EXPECT_LE(*sampled.entries[i].value, *prof.entries[i].value);
  }
  auto csv = divergence_csv("grid_zd", 13, sampled);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "family,instance_size,n,delta,epsilon,value,is_lower_bound");
  EXPECT_NE(csv.find("grid_zd,13,1,1/2,0,"), std::string::npos);
  EXPECT_NE(csv.find(",true\n"), std::string::npos);
}

TEST(Divergence, ProfileMatchesTripleLoop) {
  auto raw = ts::grid_graph(5, 4);
  auto g = raw.build();
  auto d = ts::floyd(raw);
  std::vector<int> ns{1, 2, 3, 5, 7};
  auto prof = divergence_profile(*g, ns, Rational(1, 3), Rational(1, 2));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    int best = 0;
    for (int a = 0; a < raw.n; ++a) {
      for (int b = 0; b < raw.n; ++b) {
        if (a == b || d[a][b] > ns[i]) continue;
        for (int c = 0; c < raw.n; ++c) {
          auto v = brute_divergence(raw, a, b, c, Rational(1, 3) * std::min(d[c][a], d[c][b]) - Rational(1, 2));
          ASSERT_TRUE(v);
          best = std::max(best, *v);
        }
      }
    }
    ASSERT_TRUE(prof.entries[i].value);
    EXPECT_EQ(*prof.entries[i].value, best) << "n=" << ns[i];
  }
}

TEST(Divergence, ProfileTreeIsInfinite) {
  auto g = ts::regular_tree_ball(3, 4).build();
  auto prof = divergence_profile(*g, {1, 2, 3, 4}, Rational(1, 2), 0);
  ASSERT_TRUE(prof.entries[0].value);
  EXPECT_EQ(*prof.entries[0].value, 1);
  for (std::size_t i = 1; i < prof.entries.size(); ++i) EXPECT_FALSE(prof.entries[i].value);
  EXPECT_FALSE(prof.linear_coefficient);
  EXPECT_FALSE(prof.linear);
  EXPECT_NE(divergence_csv("tree", 4, prof, false).find(",inf,false"), std::string::npos);

  auto petersen = ts::petersen().build();
  auto flat = divergence_profile(*petersen, {1}, Rational(1, 2), 10);
  EXPECT_EQ(*flat.entries[0].value, 1);
}

TEST(Navigation, FarCentreGivesOneLeg) {
  const int w = 15;
  auto g = ts::grid_graph(w, w).build();
  auto ps = PathSystem::all_geodesics(g);
  NavigabilityInstance inst{at(w, 7, 7), 5, PolygonalLine{{straight(*g, w, {2, 2}, {2, 7})}}};
  auto res = navigate_search(inst, 10, 1, ps);
  ASSERT_TRUE(res.line);
  EXPECT_EQ(res.line->leg_count(), 1);
  EXPECT_EQ(res.length, 5);
  EXPECT_TRUE(verify_navigation(*res.line, inst, 10, 1, ps).ok);
}

TEST(Navigation, GridSearchSucceeds) {
  const int w = 29;
  auto g = ts::grid_graph(w, w).build();
  auto ps = PathSystem::all_geodesics(g);
  const Vertex m = at(w, 14, 14);
  PolygonalLine alpha{{straight(*g, w, {0, 14}, {0, 0}), straight(*g, w, {0, 0}, {28, 0}),
                       straight(*g, w, {28, 0}, {28, 14})}};
  NavigabilityInstance inst{m, 14, alpha};
  auto res = navigate_search(inst, 28, 3, ps);
  ASSERT_TRUE(res.line) << res.reason;
  EXPECT_TRUE(res.below_scale);
  EXPECT_LE(res.length, 28 * 3 * 14);
  EXPECT_EQ(res.length, 30);
  auto check = verify_navigation(*res.line, inst, 28, 9, ps);
  EXPECT_TRUE(check.ok) << (check.failures.empty() ? "" : check.failures.front());

  // Random valid instances around the centre.
  std::mt19937_64 rng(11);
  const auto& to_m = g->distances_from(m);
  int done = 0;
  for (int trial = 0; trial < 5000 && done < 15; ++trial) {
    std::vector<Vertex> stops;
    Vertex s = rng() % (w * w), t = rng() % (w * w);
    if (to_m[s] < 14 || to_m[s] > 28 || to_m[t] < 14 || to_m[t] > 28) continue;
    Vertex mid = rng() % (w * w);
    if (to_m[mid] < 14) continue;
    auto a = PathSystem::all_geodesics(g).leg_path_avoiding(s, mid, Ball{m, 13});
    auto b = PathSystem::all_geodesics(g).leg_path_avoiding(mid, t, Ball{m, 13});
    if (!a || !b) continue;
    NavigabilityInstance r{m, 14, PolygonalLine{{*a, *b}}};
    auto found = navigate_search(r, 28, 3, ps);
    ASSERT_TRUE(found.line) << found.reason;
    EXPECT_TRUE(verify_navigation(*found.line, r, 28, 6, ps).ok);
    ++done;
  }
  EXPECT_EQ(done, 15);
}

TEST(Navigation, InfeasibleCertificate) {
  // Path 0..8 with a branch 4-9-10-11; m = 11 sits 3 away from the middle.
  ts::RawGraph raw = ts::path_graph(9);
  raw.n = 12;
  raw.edges.insert(raw.edges.end(), {{4, 9}, {9, 10}, {10, 11}});
  auto g = raw.build();
  auto ps = PathSystem::tree_geodesics(g);
  NavigabilityInstance inst{11, 3, PolygonalLine{{lex_min_geodesic(*g, 1, 7)}}};
  auto res = navigate_search(inst, Rational(3, 2), 1, ps);
  EXPECT_FALSE(res.line);
  ASSERT_EQ(res.best_by_legs.size(), 2u);
  EXPECT_EQ(res.best_by_legs[1], 6);
  EXPECT_GT(Rational(res.best_by_legs[1]), res.length_bound);

  // A cut vertex between the endpoints cannot be R away from alpha.
  NavigabilityInstance cut{4, 2, PolygonalLine{{lex_min_geodesic(*g, 2, 6)}}};
  EXPECT_THROW(navigate_search(cut, 2, 1, ps), InputError);
}

TEST(Navigation, VerifierRejectsBadLines) {
  const int w = 9;
  auto g = ts::grid_graph(w, w).build();
  auto ps = PathSystem::all_geodesics(g);
  NavigabilityInstance inst{at(w, 4, 4), 2, PolygonalLine{{straight(*g, w, {2, 4}, {2, 2}),
                                                            straight(*g, w, {2, 2}, {6, 2}),
                                                            straight(*g, w, {6, 2}, {6, 4})}}};
  EXPECT_TRUE(verify_navigation(inst.alpha, inst, 2, 3, ps).ok);
  EXPECT_FALSE(verify_navigation(inst.alpha, inst, 2, 2, ps).ok);
  PolygonalLine through{{straight(*g, w, {2, 4}, {6, 4})}};
  EXPECT_FALSE(verify_navigation(through, inst, 2, 3, ps).ok);
  PolygonalLine bent{{EdgePath(*g, {at(w, 2, 4), at(w, 2, 3), at(w, 2, 4)})}};
  EXPECT_FALSE(verify_navigation(bent, inst, 2, 3, ps).ok);
}

TEST(MedianAvoid, GridInstances) {
  const int w = 141;
  auto g = ts::grid_graph(w, w).build();
  const Rational R = 14;
  std::mt19937_64 rng(2);
  int long_cases = 0, short_cases = 0, done = 0;
  for (int trial = 0; trial < 2000 && done < 40; ++trial) {
    const Vertex m = at(w, 40 + rng() % 61, 40 + rng() % 61);
    const auto& to_m = g->distances_from(m);
    auto near = [&]() {
      for (;;) {
        Vertex z = rng() % (w * w);
        if (to_m[z] >= 14 && to_m[z] <= 56) return z;
      }
    };
    const Vertex z1 = near(), z2 = near(), y = rng() % (w * w);
    PolygonalLine p;
    try {
      p = median_avoid(z1, z2, y, m, R, *g);
    } catch (const PreconditionError&) {
      continue;
    }
    ++done;
    EXPECT_LE(p.leg_count(), 3);
    EXPECT_LE(p.length(), 392);
    EXPECT_GE(p.clearance(*g, m), 14);
    EXPECT_EQ(p.front(), z1);
    EXPECT_EQ(p.back(), z2);
    for (const auto& leg : p.legs) EXPECT_TRUE(is_geodesic(leg));
    if (p.leg_count() == 3) {
      ++long_cases;
    } else {
      ++short_cases;
      const int a = p.legs[0].length(), b = p.legs[1].length();
      EXPECT_LE(std::min(a, b), 70);
      EXPECT_LE(std::max(a, b), 182);
    }
    if (done % 10 == 0) g->release_cache();
  }
  EXPECT_EQ(done, 40);
  EXPECT_GT(long_cases, 0);
  EXPECT_GT(short_cases, 0);
}

TEST(MedianAvoid, DegenerateAndRejected) {
  const int w = 81;
  auto g = ts::grid_graph(w, w).build();
  const Vertex m = at(w, 40, 40);
  const Vertex z = at(w, 40, 10), y = at(w, 40, 0);
  auto p = median_avoid(z, z, y, m, 14, *g);
  EXPECT_LE(p.length(), 28 * 14);
  EXPECT_EQ(p.front(), z);
  EXPECT_EQ(p.back(), z);
  EXPECT_THROW(median_avoid(z, z, y, m, 13, *g), PreconditionError);
  EXPECT_THROW(median_avoid(at(w, 0, 0), z, y, m, 14, *g), PreconditionError);
  // The direct geodesic through m is rejected when supplied.
  auto through = lex_min_geodesic(*g, at(w, 40, 75), y);
  EXPECT_THROW(median_avoid(at(w, 40, 75), z, y, m, 14, *g, through), PreconditionError);
}

TEST(CombingAvoid, FreeGroupWords) {
  auto geo = free_group_geometry();
  EXPECT_EQ(reduce_word("abBA"), "");
  EXPECT_EQ(multiply_words("ab", "Ba"), "aa");
  EXPECT_EQ(geo.dist("ab", "aB"), 2);
  auto line = geo.line("ab", "aBB");
  EXPECT_EQ(line, (std::vector<std::string>{"ab", "a", "aB", "aBB"}));

  std::mt19937_64 rng(9);
  const Rational R = 50;
  int done = 0, long_cases = 0, short_cases = 0;
  for (int trial = 0; trial < 5000 && done < 60; ++trial) {
    const std::string m = random_word(rng, rng() % 30);
    const std::string p0 = multiply_words(m, random_word(rng, 50 + rng() % 60));
    const std::string z1 = multiply_words(p0, random_word(rng, rng() % 90));
    const std::string z2 = multiply_words(p0, random_word(rng, rng() % 90));
    const std::string y = multiply_words(trial % 3 ? p0 : z1, random_word(rng, rng() % 700));
    CombingDetour<std::string> p;
    try {
      p = combing_avoid(z1, z2, y, m, R, 0, geo);
    } catch (const PreconditionError&) {
      continue;
    }
    ++done;
    (p.short_case ? short_cases : long_cases)++;
    EXPECT_LE(p.legs.size(), 5u);
    EXPECT_LE(p.length(), 5000);
    EXPECT_EQ(p.legs.front().front(), z1);
    EXPECT_EQ(p.legs.back().back(), z2);
    for (std::size_t i = 0; i < p.legs.size(); ++i) {
      const auto& leg = p.legs[i];
      if (i > 0) EXPECT_EQ(p.legs[i - 1].back(), leg.front());
      EXPECT_EQ(word_distance(leg.front(), leg.back()) + 1, static_cast<int>(leg.size()));
      for (std::size_t j = 0; j < leg.size(); ++j) {
        if (j > 0) ASSERT_EQ(word_distance(leg[j - 1], leg[j]), 1);
        ASSERT_GE(word_distance(leg[j], m), 50);
      }
    }
  }
  EXPECT_EQ(done, 60);
  EXPECT_GT(long_cases, 0);
  EXPECT_GT(short_cases, 0);
  EXPECT_THROW(combing_avoid<std::string>("", "", "", "", 49, 0, geo), PreconditionError);
}

TEST(CombingAvoid, GraphBackedSpider) {
  // Three arms of length 700 from vertex 0.
  const int arm = 700;
  ts::RawGraph raw{1 + 3 * arm, {}, "spider"};
  for (int a = 0; a < 3; ++a) {
    for (int i = 1; i <= arm; ++i) raw.edges.emplace_back(i == 1 ? 0 : a * arm + i - 1, a * arm + i);
  }
  auto g = raw.build();
  auto ps = PathSystem::tree_geodesics(g);
  auto arm_at = [&](int a, int i) { return i == 0 ? 0 : a * arm + i; };
  const Vertex m = arm_at(0, 100);
  // z1, z2 on arm 0 beyond m; y far out on arm 0: long case.
  auto p = combing_avoid(arm_at(0, 180), arm_at(0, 290), arm_at(0, 690), m, 50, ps, 0);
  EXPECT_LE(p.length(), 5000);
  EXPECT_GE(p.clearance(*g, m), 50);
  // z on both sides of m, y through the centre on arm 1.
  auto q = combing_avoid(arm_at(0, 20), arm_at(2, 100), arm_at(1, 600), m, 50, ps, 0);
  EXPECT_EQ(q.leg_count(), 5);
  EXPECT_GE(q.clearance(*g, m), 50);
  for (const auto& leg : q.legs) EXPECT_TRUE(ps.contains(leg));
  EXPECT_THROW(combing_avoid(arm_at(0, 20), arm_at(0, 180), arm_at(1, 600), m, 50, ps, 0),
               PreconditionError);
}

TEST(Slides, GridCentralSlides) {
  const int w = 41;
  auto g = ts::grid_graph(w, w).build();
  auto ps = PathSystem::all_geodesics(g);
  const Vertex m = at(w, 20, 20);
  PolygonalLine alpha{{straight(*g, w, {4, 20}, {0, 0}), straight(*g, w, {0, 0}, {40, 0}),
                       straight(*g, w, {40, 0}, {36, 20})}};
  NavigabilityInstance inst{m, 16, alpha};
  auto res = slides_navigate(inst, ps);
  EXPECT_GE(res.central_slides, 1);
  EXPECT_FALSE(res.escalated);
  auto check = verify_navigation(res.line, inst, 28, 2 * 3 * 3, ps);
  EXPECT_TRUE(check.ok) << (check.failures.empty() ? "" : check.failures.front());
  EXPECT_GT(res.measured_C, 0);
  EXPECT_FALSE(res.log.empty());
  // Replay against the search oracle: the optimum is no longer than the slide output.
  auto opt = navigate_search(inst, 28, 6, ps);
  ASSERT_TRUE(opt.line);
  EXPECT_LE(opt.length, res.line.length());
}

TEST(Slides, CalibratedInputNeedsNoCentralSlide) {
  const int w = 29;
  auto g = ts::grid_graph(w, w).build();
  auto ps = PathSystem::all_geodesics(g);
  PolygonalLine alpha{{straight(*g, w, {0, 14}, {0, 0}), straight(*g, w, {0, 0}, {28, 0}),
                       straight(*g, w, {28, 0}, {28, 14})}};
  NavigabilityInstance inst{at(w, 14, 14), 14, alpha};
  auto res = slides_navigate(inst, ps);
  EXPECT_EQ(res.central_slides, 0);
  EXPECT_TRUE(verify_navigation(res.line, inst, 28, 18, ps).ok);
}

TEST(Slides, StaircaseMeasuredConstant) {
  std::vector<Rational> measured;
  for (int half : {10, 14, 18}) {
    auto raw = ts::grid_graph(2 * half + 1, 2 * half + 1);
    auto ps = PathSystem::staircase_z2(raw.build(), half);
    const int r = half / 2;
    PolygonalLine alpha{{ps.combing_line(ps.at(-r - 2, 0), ps.at(-r - 2, r + 2)),
                         ps.combing_line(ps.at(-r - 2, r + 2), ps.at(r + 2, r + 2)),
                         ps.combing_line(ps.at(r + 2, r + 2), ps.at(r + 2, 0))}};
    NavigabilityInstance inst{ps.at(0, 0), r, alpha};
    SlideOptions opt;
    opt.C = 2;
    auto res = slides_navigate(inst, ps, opt);
    auto check = verify_navigation(res.line, inst, 2, 2 * opt.k * 3, ps);
    EXPECT_TRUE(check.ok) << (check.failures.empty() ? "" : check.failures.front());
    measured.push_back(res.measured_C);
  }
  for (const auto& c : measured) EXPECT_LE(c, 2);
}

TEST(Slides, NeedsBoundedReplacement) {
  auto g = ts::cycle_graph(12).build();
  auto ps = PathSystem::all_geodesics(g);
  NavigabilityInstance inst{0, 2, PolygonalLine{{lex_min_geodesic(*g, 2, 4)}}};
  EXPECT_THROW(slides_navigate(inst, ps), CapabilityError);
}
