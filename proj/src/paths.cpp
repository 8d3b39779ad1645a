#include "coarse/paths.hpp"

#include <algorithm>

namespace coarse {

EdgePath::EdgePath(const MetricGraph& host, std::vector<Vertex> vertices)
    : host_(&host), vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw InputError("edge path needs at least one vertex");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!host.contains(vertices_[i])) {
      throw InputError("path vertex " + std::to_string(vertices_[i]) + " not in graph");
    }
    if (i > 0 && !host.adjacent(vertices_[i - 1], vertices_[i])) {
      throw InputError("path step " + std::to_string(vertices_[i - 1]) + " -> " +
                       std::to_string(vertices_[i]) + " is not an edge");
    }
  }
}

EdgePath EdgePath::trivial(const MetricGraph& host, Vertex v) {
  return EdgePath(host, {v});
}

EdgePath EdgePath::unchecked(const MetricGraph& host, std::vector<Vertex> vertices) {
  EdgePath p;
  p.host_ = &host;
  p.vertices_ = std::move(vertices);
  return p;
}

EdgePath EdgePath::inverse() const {
  EdgePath p = *this;
  std::reverse(p.vertices_.begin(), p.vertices_.end());
  return p;
}

EdgePath EdgePath::slice(int i, int j) const {
  if (i < 0 || j >= size() || i > j) {
    throw InputError("slice [" + std::to_string(i) + "," + std::to_string(j) +
                     "] out of range for path of size " + std::to_string(size()));
  }
  EdgePath p;
  p.host_ = host_;
  p.vertices_.assign(vertices_.begin() + i, vertices_.begin() + j + 1);
  return p;
}

bool EdgePath::contains(Vertex v) const {
  return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

namespace {

int first_index(const EdgePath& p, Vertex v) {
  const auto& vs = p.vertices();
  auto it = std::find(vs.begin(), vs.end(), v);
  if (it == vs.end()) throw InputError("vertex " + std::to_string(v) + " does not lie on the path");
  return static_cast<int>(it - vs.begin());
}

int last_index(const EdgePath& p, Vertex v) {
  const auto& vs = p.vertices();
  auto it = std::find(vs.rbegin(), vs.rend(), v);
  if (it == vs.rend()) throw InputError("vertex " + std::to_string(v) + " does not lie on the path");
  return static_cast<int>(vs.rend() - it) - 1;
}

}  // namespace

EdgePath subsegment_between(const EdgePath& p, Vertex u, Vertex v) {
  int i = first_index(p, u);
  int j = last_index(p, v);
  if (i > j) {
    throw InputError("vertex " + std::to_string(u) + " does not precede " + std::to_string(v) +
                     " on the path");
  }
  return p.slice(i, j);
}

EdgePath prefix_to(const EdgePath& p, Vertex v) {
  return p.slice(0, first_index(p, v));
}

EdgePath suffix_from(const EdgePath& p, Vertex u) {
  return p.slice(last_index(p, u), p.length());
}

EdgePath concat(const EdgePath& a, const EdgePath& b) {
  if (a.back() != b.front()) {
    throw InputError("cannot concatenate: path ends at " + std::to_string(a.back()) +
                     " but next starts at " + std::to_string(b.front()));
  }
  std::vector<Vertex> vs = a.vertices();
  vs.insert(vs.end(), b.vertices().begin() + 1, b.vertices().end());
  return EdgePath::unchecked(a.host(), std::move(vs));
}

EdgePath lex_min_geodesic(const MetricGraph& g, Vertex u, Vertex v) {
  if (!g.contains(u) || !g.contains(v)) throw InputError("invalid geodesic endpoint");
  const auto& to_v = g.distances_from(v);
  std::vector<Vertex> vs{u};
  Vertex cur = u;
  while (cur != v) {
    for (Vertex w : g.neighbors(cur)) {
      if (to_v[w] == to_v[cur] - 1) {
        cur = w;
        break;
      }
    }
    vs.push_back(cur);
  }
  return EdgePath::unchecked(g, std::move(vs));
}

EdgePath rectify(const MetricGraph& g, std::span<const Vertex> points) {
  if (points.empty()) throw InputError("rectify needs at least one point");
  EdgePath out = EdgePath::trivial(g, points.front());
  for (std::size_t i = 1; i < points.size(); ++i) {
    out = concat(out, lex_min_geodesic(g, points[i - 1], points[i]));
  }
  return out;
}

bool is_geodesic(const EdgePath& p) {
  return p.host().distance(p.front(), p.back()) == p.length();
}

Dist distance_to_path(const MetricGraph& g, Vertex v, const EdgePath& p) {
  const auto& row = g.distances_from(v);
  Dist best = std::numeric_limits<Dist>::max();
  for (Vertex w : p.vertices()) best = std::min(best, row[w]);
  return best;
}

Dist hausdorff(const MetricGraph& g, const EdgePath& a, const EdgePath& b) {
  auto da = set_distance_map(g, a.vertices());
  auto db = set_distance_map(g, b.vertices());
  Dist h = 0;
  for (Vertex v : a.vertices()) h = std::max(h, db[v]);
  for (Vertex v : b.vertices()) h = std::max(h, da[v]);
  return h;
}

Dist PolygonalLine::length() const {
  Dist total = 0;
  for (const auto& leg : legs) total += leg.length();
  return total;
}

EdgePath PolygonalLine::flatten() const {
  if (legs.empty()) throw InputError("empty polygonal line");
  EdgePath out = legs.front();
  for (std::size_t i = 1; i < legs.size(); ++i) out = concat(out, legs[i]);
  return out;
}

Dist PolygonalLine::clearance(const MetricGraph& g, Vertex m) const {
  const auto& row = g.distances_from(m);
  Dist best = std::numeric_limits<Dist>::max();
  for (const auto& leg : legs) {
    for (Vertex v : leg.vertices()) best = std::min(best, row[v]);
  }
  return best;
}

void PolygonalLine::check_joined() const {
  for (std::size_t i = 1; i < legs.size(); ++i) {
    if (legs[i - 1].back() != legs[i].front()) {
      throw InputError("polygonal line legs " + std::to_string(i - 1) + " and " +
                       std::to_string(i) + " do not meet");
    }
  }
}

}  // namespace coarse
