#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coarse/core.hpp"

namespace coarse {

using DistanceRow = std::vector<Dist>;

// Finite, simple, undirected, connected graph with unit edge lengths.
//
// Immutable after construction. Distance rows are computed by BFS on first
// use and cached; the cache is internally synchronized, so a const
// MetricGraph can be shared between threads.
class MetricGraph {
 public:
  static MetricGraph from_edges(int vertex_count,
                                std::span<const std::pair<Vertex, Vertex>> edges,
                                std::vector<std::string> labels = {});

  MetricGraph(const MetricGraph& other);
  MetricGraph& operator=(const MetricGraph& other);
  MetricGraph(MetricGraph&&) noexcept;
  MetricGraph& operator=(MetricGraph&&) noexcept;
  ~MetricGraph();

  int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(targets_.size()) / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(Vertex u, Vertex v) const;
  bool contains(Vertex v) const { return v >= 0 && v < vertex_count(); }

  // Exact BFS distances from src; cached.
  const DistanceRow& distances_from(Vertex src) const;
  Dist distance(Vertex u, Vertex v) const { return distances_from(u)[v]; }

  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(Vertex v) const;
  std::optional<Vertex> find_label(std::string_view label) const;

  std::vector<std::pair<Vertex, Vertex>> edge_list() const;

  // Drops all cached distance rows.
  void release_cache() const;

 private:
  MetricGraph() = default;

  void check_vertex(Vertex v) const;

  std::vector<int> offsets_{0};
  std::vector<Vertex> targets_;
  std::vector<std::string> labels_;

  mutable std::unique_ptr<std::mutex> cache_mutex_ = std::make_unique<std::mutex>();
  mutable std::vector<std::unique_ptr<const DistanceRow>> rows_;
};

using GraphPtr = std::shared_ptr<const MetricGraph>;

// Plain BFS from src over vertices for which `allowed` is true. Vertices that
// are not allowed or not reachable get kUnreachable. src must be allowed.
template <class Allowed>
DistanceRow bfs_restricted(const MetricGraph& g, Vertex src, Allowed&& allowed);

// Exact graph distances from src.
DistanceRow distance_map(const MetricGraph& g, Vertex src);

// Distances in the subgraph induced on V \ ball. Throws PreconditionError when
// src lies inside the ball.
DistanceRow punctured_distance_map(const MetricGraph& g, Vertex src, const Ball& ball);

// Distance from every vertex to the nearest source (multi-source BFS).
DistanceRow set_distance_map(const MetricGraph& g, std::span<const Vertex> sources);

// Connected-component labels of the subgraph induced on allowed vertices;
// disallowed vertices get -1.
template <class Allowed>
std::vector<int> component_labels(const MetricGraph& g, Allowed&& allowed);

struct SamplingSpec {
  enum class Mode { kAuto, kExhaustive, kSampled };
  Mode mode = Mode::kAuto;
  int exhaustive_limit = 200;   // kAuto switches to sampling above this size
  std::int64_t samples = 200000;
  int pool = 256;               // sampled quadruples draw from this many vertices
  std::uint64_t seed = 1;

  static SamplingSpec exhaustive() { return {Mode::kExhaustive}; }
  static SamplingSpec sampled(std::int64_t samples, std::uint64_t seed) {
    SamplingSpec s;
    s.mode = Mode::kSampled;
    s.samples = samples;
    s.seed = seed;
    return s;
  }
};

struct DeltaEstimate {
  Rational delta{0};
  bool exact = true;            // false: sampled lower bound
  std::int64_t quadruples = 0;
  std::array<Vertex, 4> witness{0, 0, 0, 0};
};

// Four-point hyperbolicity constant: the maximum over quadruples of half the
// gap between the two largest of the three pairwise distance sums.
DeltaEstimate four_point_delta(const MetricGraph& g, const SamplingSpec& spec = {});

// Unique vertex in I(x,y) ∩ I(x,z) ∩ I(y,z). Throws StructuralError naming the
// triple when the intersection is not a singleton.
Vertex median(const MetricGraph& g, Vertex x, Vertex y, Vertex z);

struct MedianCheck {
  bool is_median = true;
  bool exhaustive = true;
  std::int64_t triples_checked = 0;
  std::optional<std::array<Vertex, 3>> counterexample;
  int intersection_size = 1;    // for the counterexample
};

MedianCheck is_median_graph(const MetricGraph& g, int exhaustive_limit = 300,
                            std::int64_t samples = 200000, std::uint64_t seed = 1);

struct GrowthValue {
  std::int64_t count = 0;
  bool truncated = false;  // k exceeds the eccentricity: the ball hit the boundary
};

// |B(x, k)|.
GrowthValue growth(const MetricGraph& g, Vertex x, int k);
// min over x of |B(x, k)|; truncated when any ball was.
GrowthValue growth_min(const MetricGraph& g, int k);

Dist eccentricity(const MetricGraph& g, Vertex v);

// Exact diameter via bit-parallel multi-source BFS (64 sources per sweep).
Dist diameter(const MetricGraph& g);

bool is_tree(const MetricGraph& g);

// ---------------------------------------------------------------------------

template <class Allowed>
DistanceRow bfs_restricted(const MetricGraph& g, Vertex src, Allowed&& allowed) {
  DistanceRow dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> queue;
  queue.reserve(g.vertex_count());
  dist[src] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] != kUnreachable || !allowed(w)) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

template <class Allowed>
std::vector<int> component_labels(const MetricGraph& g, Allowed&& allowed) {
  std::vector<int> label(g.vertex_count(), -1);
  std::vector<Vertex> stack;
  int next = 0;
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    if (label[s] != -1 || !allowed(s)) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(u)) {
        if (label[w] != -1 || !allowed(w)) continue;
        label[w] = next;
        stack.push_back(w);
      }
    }
    ++next;
  }
  return label;
}

}  // namespace coarse
