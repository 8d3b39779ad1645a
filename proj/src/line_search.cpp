#include "coarse/line_search.hpp"

#include <algorithm>

namespace coarse {

namespace {
constexpr int kRowCacheLimit = 4096;
}

LegRelation::LegRelation(const PathSystem& ps, const Ball& ball)
    : ps_(&ps), ball_(ball), cache_rows_(ps.graph().vertex_count() <= kRowCacheLimit) {
  if (!ball.empty()) to_center_ = &ps.graph().distances_from(ball.center);
  if (cache_rows_) cache_.resize(ps.graph().vertex_count());
}

bool LegRelation::blocked(Vertex v) const {
  return to_center_ && (*to_center_)[v] <= ball_.max_dist();
}

const DistanceRow& LegRelation::row(Vertex u) {
  if (cache_rows_) {
    auto& slot = cache_[u];
    if (!slot) {
      slot = ps_->leg_row(u, ball_);
      ++rows_computed_;
    }
    return *slot;
  }
  scratch_ = ps_->leg_row(u, ball_);
  ++rows_computed_;
  return scratch_;
}

bool reachable_within(const PathSystem& ps, const Ball& ball, Vertex s, Vertex t, int n) {
  const MetricGraph& g = ps.graph();
  if (!g.contains(s) || !g.contains(t)) throw InputError("invalid line endpoint");
  LegRelation rel(ps, ball);
  if (rel.blocked(s) || rel.blocked(t)) return false;
  if (s == t) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> frontier{s}, next;
  seen[s] = 1;
  for (int hop = 0; hop < n && !frontier.empty(); ++hop) {
    next.clear();
    for (Vertex u : frontier) {
      const auto& row = rel.row(u);
      if (row[t] != kUnreachable) return true;
      for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (!seen[v] && row[v] != kUnreachable) {
          seen[v] = 1;
          next.push_back(v);
        }
      }
    }
    std::swap(frontier, next);
  }
  return false;
}

LineSearchResult shortest_line(const PathSystem& ps, const Ball& ball, Vertex s, Vertex t, int n) {
  const MetricGraph& g = ps.graph();
  if (!g.contains(s) || !g.contains(t)) throw InputError("invalid line endpoint");
  if (n < 1) throw InputError("a polygonal line needs at least one leg");
  const int V = g.vertex_count();
  LineSearchResult res;
  res.best_by_legs.assign(n + 1, kUnreachable);
  LegRelation rel(ps, ball);
  if (rel.blocked(s) || rel.blocked(t)) return res;

  constexpr Dist kInf = std::numeric_limits<Dist>::max();
  std::vector<DistanceRow> best(n + 1, DistanceRow(V, kInf));
  std::vector<std::vector<Vertex>> pred(n + 1, std::vector<Vertex>(V, -1));
  best[0][s] = 0;
  for (int k = 1; k <= n; ++k) {
    best[k] = best[k - 1];
    for (Vertex u = 0; u < V; ++u) {
      if (best[k - 1][u] == kInf) continue;
      const auto& row = rel.row(u);
      const Dist base = best[k - 1][u];
      for (Vertex v = 0; v < V; ++v) {
        if (row[v] == kUnreachable || v == u) continue;
        if (base + row[v] < best[k][v]) {
          best[k][v] = base + row[v];
          pred[k][v] = u;
        }
      }
    }
  }
  for (int k = 0; k <= n; ++k) {
    if (best[k][t] != kInf) res.best_by_legs[k] = best[k][t];
  }
  if (best[n][t] == kInf) return res;
  res.length = best[n][t];

  std::vector<Vertex> stops{t};
  Vertex cur = t;
  for (int k = n; k > 0 && cur != s; --k) {
    if (pred[k][cur] == -1) continue;  // value carried from fewer legs
    cur = pred[k][cur];
    stops.push_back(cur);
  }
  std::reverse(stops.begin(), stops.end());
  PolygonalLine line;
  if (stops.size() == 1) {
    line.legs.push_back(EdgePath::trivial(g, s));
  }
  for (std::size_t i = 1; i < stops.size(); ++i) {
    auto leg = ps.leg_path_avoiding(stops[i - 1], stops[i], ball);
    if (!leg) throw InternalError("leg relation and leg construction disagree");
    line.legs.push_back(std::move(*leg));
  }
  if (line.length() != res.length) {
    throw InternalError("reconstructed line length " + std::to_string(line.length()) +
                        " differs from the DP value " + std::to_string(res.length));
  }
  res.line = std::move(line);
  return res;
}

}  // namespace coarse
