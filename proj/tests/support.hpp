#pragma once

// Small graph builders and brute-force oracles that do not go through the
// library's BFS / search code.

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "coarse/metric_graph.hpp"

namespace testing_support {

using coarse::Vertex;
using Edges = std::vector<std::pair<Vertex, Vertex>>;

struct RawGraph {
  int n = 0;
  Edges edges;
  std::string name;

  coarse::GraphPtr build() const {
    return std::make_shared<const coarse::MetricGraph>(coarse::MetricGraph::from_edges(n, edges));
  }
  std::vector<std::vector<bool>> adjacency() const {
    std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
    for (auto [u, v] : edges) a[u][v] = a[v][u] = true;
    return a;
  }
};

inline RawGraph path_graph(int n) {
  RawGraph g{n, {}, "P" + std::to_string(n)};
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

inline RawGraph cycle_graph(int n) {
  RawGraph g{n, {}, "C" + std::to_string(n)};
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

// Row-major: id = y * w + x.
inline RawGraph grid_graph(int w, int h) {
  RawGraph g{w * h, {}, "grid" + std::to_string(w) + "x" + std::to_string(h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.edges.emplace_back(y * w + x, y * w + x + 1);
      if (y + 1 < h) g.edges.emplace_back(y * w + x, (y + 1) * w + x);
    }
  }
  return g;
}

inline RawGraph star_graph(int leaves) {
  RawGraph g{leaves + 1, {}, "star" + std::to_string(leaves)};
  for (int i = 1; i <= leaves; ++i) g.edges.emplace_back(0, i);
  return g;
}

inline RawGraph complete_graph(int n) {
  RawGraph g{n, {}, "K" + std::to_string(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  }
  return g;
}

inline RawGraph petersen() {
  RawGraph g{10, {}, "petersen"};
  for (int i = 0; i < 5; ++i) {
    g.edges.emplace_back(i, (i + 1) % 5);
    g.edges.emplace_back(i, i + 5);
    g.edges.emplace_back(i + 5, (i + 2) % 5 + 5);
  }
  return g;
}

// Spider: three legs of length 3 from a centre.
inline RawGraph spider() {
  RawGraph g{10, {}, "spider"};
  int next = 1;
  for (int leg = 0; leg < 3; ++leg) {
    int prev = 0;
    for (int k = 0; k < 3; ++k) {
      g.edges.emplace_back(prev, next);
      prev = next++;
    }
  }
  return g;
}

// Two 4-cycles sharing an edge plus a pendant path.
inline RawGraph domino_tail() {
  RawGraph g{8, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}, {5, 6}, {6, 7}}, "domino_tail"};
  return g;
}

// C6 with a chord making a 4-cycle and a 4-cycle.
inline RawGraph theta_graph() {
  RawGraph g{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}}, "theta"};
  return g;
}

// Ball of radius r in the 2k-regular tree, vertices in BFS order.
inline RawGraph regular_tree_ball(int degree, int radius) {
  RawGraph g{1, {}, "tree" + std::to_string(degree) + "_" + std::to_string(radius)};
  std::vector<int> frontier{0};
  for (int level = 0; level < radius; ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      int kids = v == 0 ? degree : degree - 1;
      for (int k = 0; k < kids; ++k) {
        g.edges.emplace_back(v, g.n);
        next.push_back(g.n++);
      }
    }
    frontier = std::move(next);
  }
  return g;
}

inline std::vector<RawGraph> small_corpus() {
  return {path_graph(5), cycle_graph(4), cycle_graph(5), cycle_graph(6), cycle_graph(7),
          cycle_graph(8), grid_graph(3, 3), grid_graph(2, 5), star_graph(4), complete_graph(4),
          petersen(), spider(), domino_tail(), theta_graph()};
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Floyd-Warshall over the vertex subset `keep` (all when empty).
inline std::vector<std::vector<int>> floyd(const RawGraph& g, const std::vector<bool>& keep = {}) {
  const int n = g.n;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  auto ok = [&](int v) { return keep.empty() || keep[v]; };
  for (int v = 0; v < n; ++v) {
    if (ok(v)) d[v][v] = 0;
  }
  for (auto [u, v] : g.edges) {
    if (ok(u) && ok(v)) d[u][v] = d[v][u] = 1;
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

// Every simple path from x to y, by plain DFS over the adjacency matrix.
inline std::vector<std::vector<Vertex>> all_simple_paths(const RawGraph& g, Vertex x, Vertex y) {
  auto adj = g.adjacency();
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> cur{x};
  std::vector<bool> used(g.n, false);
  used[x] = true;
  std::function<void()> rec = [&] {
    Vertex v = cur.back();
    if (v == y) {
      out.push_back(cur);
      return;
    }
    for (Vertex w = 0; w < g.n; ++w) {
      if (!adj[v][w] || used[w]) continue;
      used[w] = true;
      cur.push_back(w);
      rec();
      cur.pop_back();
      used[w] = false;
    }
  };
  rec();
  return out;
}

// Geodesics = simple paths of minimal length.
inline std::vector<std::vector<Vertex>> all_geodesics_brute(const RawGraph& g, Vertex x, Vertex y) {
  auto paths = all_simple_paths(g, x, y);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& p : paths) best = std::min(best, p.size());
  std::vector<std::vector<Vertex>> out;
  for (const auto& p : paths) {
    if (p.size() == best) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing_support
