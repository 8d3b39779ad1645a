#pragma once

#include <span>
#include <vector>

#include "coarse/metric_graph.hpp"

namespace coarse {

// Vertex sequence along edges of a host graph, unit speed: |p| = ||p|| = size - 1.
class EdgePath {
 public:
  EdgePath() = default;
  // Validates that consecutive vertices are adjacent.
  EdgePath(const MetricGraph& host, std::vector<Vertex> vertices);

  static EdgePath trivial(const MetricGraph& host, Vertex v);
  static EdgePath unchecked(const MetricGraph& host, std::vector<Vertex> vertices);

  const MetricGraph& host() const { return *host_; }
  bool has_host() const { return host_ != nullptr; }

  int length() const { return static_cast<int>(vertices_.size()) - 1; }
  int size() const { return static_cast<int>(vertices_.size()); }
  bool empty() const { return vertices_.empty(); }
  Vertex front() const { return vertices_.front(); }
  Vertex back() const { return vertices_.back(); }
  Vertex operator[](int i) const { return vertices_[i]; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  // Vertex at parameter floor(|p| / 2).
  Vertex midpoint() const { return vertices_[length() / 2]; }

  EdgePath inverse() const;
  // Vertices i..j inclusive.
  EdgePath slice(int i, int j) const;
  bool contains(Vertex v) const;

  friend bool operator==(const EdgePath& a, const EdgePath& b) { return a.vertices_ == b.vertices_; }
  friend auto operator<=>(const EdgePath& a, const EdgePath& b) { return a.vertices_ <=> b.vertices_; }

 private:
  const MetricGraph* host_ = nullptr;
  std::vector<Vertex> vertices_;
};

// From the first occurrence of u to the last occurrence of v.
EdgePath subsegment_between(const EdgePath& p, Vertex u, Vertex v);
// p up to the first occurrence of v.
EdgePath prefix_to(const EdgePath& p, Vertex v);
// p from the last occurrence of u.
EdgePath suffix_from(const EdgePath& p, Vertex u);

EdgePath concat(const EdgePath& a, const EdgePath& b);

// Lexicographically smallest shortest path by vertex index.
EdgePath lex_min_geodesic(const MetricGraph& g, Vertex u, Vertex v);

// Concatenation of lex-min geodesics between consecutive points.
EdgePath rectify(const MetricGraph& g, std::span<const Vertex> points);

bool is_geodesic(const EdgePath& p);

Dist distance_to_path(const MetricGraph& g, Vertex v, const EdgePath& p);
Dist hausdorff(const MetricGraph& g, const EdgePath& a, const EdgePath& b);

// Concatenation of up to n special paths.
struct PolygonalLine {
  std::vector<EdgePath> legs;

  int leg_count() const { return static_cast<int>(legs.size()); }
  Dist length() const;
  Vertex front() const { return legs.front().front(); }
  Vertex back() const { return legs.back().back(); }
  EdgePath flatten() const;
  // min over line vertices of d(v, m)
  Dist clearance(const MetricGraph& g, Vertex m) const;
  // Throws InputError unless consecutive legs share endpoints.
  void check_joined() const;
};

}  // namespace coarse
