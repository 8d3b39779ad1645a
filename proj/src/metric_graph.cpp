#include "coarse/metric_graph.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <unordered_set>

namespace coarse {

MetricGraph MetricGraph::from_edges(int vertex_count,
                                    std::span<const std::pair<Vertex, Vertex>> edges,
                                    std::vector<std::string> labels) {
  if (vertex_count < 1) throw InputError("graph must have at least one vertex");
  if (!labels.empty() && static_cast<int>(labels.size()) != vertex_count) {
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match vertex count " + std::to_string(vertex_count));
  }
  std::vector<std::vector<Vertex>> adj(vertex_count);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count) {
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") references a vertex outside [0," + std::to_string(vertex_count) + ")");
    }
    if (u == v) throw InputError("loop at vertex " + std::to_string(u));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  MetricGraph g;
  g.offsets_.assign(1, 0);
  for (int v = 0; v < vertex_count; ++v) {
    auto& nb = adj[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      auto it = std::adjacent_find(nb.begin(), nb.end());
      throw InputError("multi-edge between " + std::to_string(v) + " and " + std::to_string(*it));
    }
    g.targets_.insert(g.targets_.end(), nb.begin(), nb.end());
    g.offsets_.push_back(static_cast<int>(g.targets_.size()));
  }
  g.labels_ = std::move(labels);
  g.rows_.resize(vertex_count);

  auto row = bfs_restricted(g, 0, [](Vertex) { return true; });
  auto missing = std::find(row.begin(), row.end(), kUnreachable);
  if (missing != row.end()) {
    throw InputError("graph is disconnected: vertex " +
                     std::to_string(missing - row.begin()) + " unreachable from 0");
  }
  g.rows_[0] = std::make_unique<const DistanceRow>(std::move(row));
  return g;
}

MetricGraph::MetricGraph(const MetricGraph& other)
    : offsets_(other.offsets_), targets_(other.targets_), labels_(other.labels_) {
  rows_.resize(vertex_count());
}

MetricGraph& MetricGraph::operator=(const MetricGraph& other) {
  if (this != &other) {
    offsets_ = other.offsets_;
    targets_ = other.targets_;
    labels_ = other.labels_;
    rows_.clear();
    rows_.resize(vertex_count());
  }
  return *this;
}

MetricGraph::MetricGraph(MetricGraph&&) noexcept = default;
MetricGraph& MetricGraph::operator=(MetricGraph&&) noexcept = default;
MetricGraph::~MetricGraph() = default;

void MetricGraph::check_vertex(Vertex v) const {
  if (!contains(v)) {
    throw InputError("invalid vertex index " + std::to_string(v) + " (graph has " +
                     std::to_string(vertex_count()) + " vertices)");
  }
}

bool MetricGraph::adjacent(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

const DistanceRow& MetricGraph::distances_from(Vertex src) const {
  check_vertex(src);
  std::lock_guard lock(*cache_mutex_);
  auto& slot = rows_[src];
  if (!slot) {
    slot = std::make_unique<const DistanceRow>(bfs_restricted(*this, src, [](Vertex) { return true; }));
  }
  return *slot;
}

void MetricGraph::release_cache() const {
  std::lock_guard lock(*cache_mutex_);
  for (auto& r : rows_) r.reset();
}

std::string MetricGraph::label(Vertex v) const {
  check_vertex(v);
  if (labels_.empty()) return std::to_string(v);
  return labels_[v];
}

std::optional<Vertex> MetricGraph::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<Vertex>(i);
  }
  return std::nullopt;
}

std::vector<std::pair<Vertex, Vertex>> MetricGraph::edge_list() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < vertex_count(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

DistanceRow distance_map(const MetricGraph& g, Vertex src) {
  return g.distances_from(src);
}

DistanceRow punctured_distance_map(const MetricGraph& g, Vertex src, const Ball& ball) {
  if (!g.contains(src) || !g.contains(ball.center)) {
    throw InputError("invalid vertex in punctured_distance_map");
  }
  if (ball.empty()) return g.distances_from(src);
  const auto& to_center = g.distances_from(ball.center);
  if (ball.contains_distance(to_center[src])) {
    throw PreconditionError("source " + std::to_string(src) + " lies inside the ball: d(src, " +
                            std::to_string(ball.center) + ") = " + std::to_string(to_center[src]) +
                            " <= " + to_string(ball.radius));
  }
  const Dist cut = ball.max_dist();
  return bfs_restricted(g, src, [&](Vertex w) { return to_center[w] > cut; });
}

DistanceRow set_distance_map(const MetricGraph& g, std::span<const Vertex> sources) {
  DistanceRow dist(g.vertex_count(), kUnreachable);
  std::vector<Vertex> queue;
  queue.reserve(g.vertex_count());
  for (Vertex s : sources) {
    if (!g.contains(s)) throw InputError("invalid vertex " + std::to_string(s));
    if (dist[s] == 0) continue;
    dist[s] = 0;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] != kUnreachable) continue;
      dist[w] = dist[u] + 1;
      queue.push_back(w);
    }
  }
  return dist;
}

namespace {

inline Rational quadruple_defect(Dist dwx, Dist dyz, Dist dwy, Dist dxz, Dist dwz, Dist dxy) {
  Dist s1 = dwx + dyz, s2 = dwy + dxz, s3 = dwz + dxy;
  if (s1 < s2) std::swap(s1, s2);
  if (s2 < s3) std::swap(s2, s3);
  if (s1 < s2) std::swap(s1, s2);
  return Rational(s1 - s2, 2);
}

}  // namespace

DeltaEstimate four_point_delta(const MetricGraph& g, const SamplingSpec& spec) {
  const int n = g.vertex_count();
  bool exhaustive = spec.mode == SamplingSpec::Mode::kExhaustive ||
                    (spec.mode == SamplingSpec::Mode::kAuto && n <= spec.exhaustive_limit);
  if (spec.mode == SamplingSpec::Mode::kSampled && spec.samples <= 0) {
    throw InputError("sampled four-point scan needs a positive sample size");
  }
  DeltaEstimate est;
  est.exact = exhaustive;
  Dist best_gap = 0;
  if (exhaustive) {
    std::vector<const DistanceRow*> rows(n);
    for (Vertex v = 0; v < n; ++v) rows[v] = &g.distances_from(v);
    for (Vertex w = 0; w < n; ++w) {
      const auto& dw = *rows[w];
      for (Vertex x = w + 1; x < n; ++x) {
        const auto& dx = *rows[x];
        for (Vertex y = x + 1; y < n; ++y) {
          const auto& dy = *rows[y];
          const Dist dwx = dw[x], dwy = dw[y], dxy = dx[y];
          for (Vertex z = y + 1; z < n; ++z) {
            Dist s1 = dwx + dy[z], s2 = dwy + dx[z], s3 = dw[z] + dxy;
            Dist hi = std::max({s1, s2, s3});
            Dist lo = std::min({s1, s2, s3});
            Dist mid = s1 + s2 + s3 - hi - lo;
            if (hi - mid > best_gap) {
              best_gap = hi - mid;
              est.witness = {w, x, y, z};
            }
          }
          est.quadruples += std::max(0, n - y - 1);
        }
      }
    }
    est.delta = Rational(best_gap, 2);
    return est;
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Vertex> pool(n);
  for (Vertex v = 0; v < n; ++v) pool[v] = v;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min<int>(n, std::max(4, spec.pool)));
  std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
  Rational best(0);
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    Vertex w = pool[pick(rng)], x = pool[pick(rng)], y = pool[pick(rng)], z = pool[pick(rng)];
    const auto& dw = g.distances_from(w);
    const auto& dx = g.distances_from(x);
    const auto& dy = g.distances_from(y);
    Rational d = quadruple_defect(dw[x], dy[z], dw[y], dx[z], dw[z], dx[y]);
    if (d > best) {
      best = d;
      est.witness = {w, x, y, z};
    }
  }
  est.quadruples = spec.samples;
  est.delta = best;
  return est;
}

Vertex median(const MetricGraph& g, Vertex x, Vertex y, Vertex z) {
  for (Vertex v : {x, y, z}) {
    if (!g.contains(v)) throw InputError("invalid vertex " + std::to_string(v) + " in median");
  }
  const auto& dx = g.distances_from(x);
  const auto& dy = g.distances_from(y);
  const auto& dz = g.distances_from(z);
  std::vector<Vertex> hits;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (dx[v] + dy[v] == dx[y] && dx[v] + dz[v] == dx[z] && dy[v] + dz[v] == dy[z]) {
      hits.push_back(v);
    }
  }
  if (hits.size() != 1) {
    throw StructuralError("not a median graph: triple (" + std::to_string(x) + "," +
                          std::to_string(y) + "," + std::to_string(z) + ") has " +
                          std::to_string(hits.size()) + " medians");
  }
  return hits.front();
}

namespace {

// Interval I(a,b) as a bitset over vertices.
class IntervalTable {
 public:
  explicit IntervalTable(const MetricGraph& g) : n_(g.vertex_count()), words_((n_ + 63) / 64) {
    bits_.assign(static_cast<std::size_t>(n_) * n_ * words_, 0);
    for (Vertex a = 0; a < n_; ++a) {
      const auto& da = g.distances_from(a);
      for (Vertex b = a; b < n_; ++b) {
        const auto& db = g.distances_from(b);
        std::uint64_t* row = slot(a, b);
        for (Vertex v = 0; v < n_; ++v) {
          if (da[v] + db[v] == da[b]) row[v / 64] |= std::uint64_t{1} << (v % 64);
        }
        if (a != b) std::copy(row, row + words_, slot(b, a));
      }
    }
  }
  int meet_count(Vertex x, Vertex y, Vertex z) const {
    const std::uint64_t* a = slot(x, y);
    const std::uint64_t* b = slot(x, z);
    const std::uint64_t* c = slot(y, z);
    int count = 0;
    for (int i = 0; i < words_; ++i) count += std::popcount(a[i] & b[i] & c[i]);
    return count;
  }

 private:
  std::uint64_t* slot(Vertex a, Vertex b) {
    return bits_.data() + (static_cast<std::size_t>(a) * n_ + b) * words_;
  }
  const std::uint64_t* slot(Vertex a, Vertex b) const {
    return bits_.data() + (static_cast<std::size_t>(a) * n_ + b) * words_;
  }
  int n_;
  int words_;
  std::vector<std::uint64_t> bits_;
};

int meet_count_direct(const MetricGraph& g, Vertex x, Vertex y, Vertex z) {
  const auto& dx = g.distances_from(x);
  const auto& dy = g.distances_from(y);
  const auto& dz = g.distances_from(z);
  int count = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (dx[v] + dy[v] == dx[y] && dx[v] + dz[v] == dx[z] && dy[v] + dz[v] == dy[z]) ++count;
  }
  return count;
}

}  // namespace

MedianCheck is_median_graph(const MetricGraph& g, int exhaustive_limit, std::int64_t samples,
                            std::uint64_t seed) {
  MedianCheck out;
  const int n = g.vertex_count();
  if (n <= exhaustive_limit) {
    IntervalTable table(g);
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex y = x; y < n; ++y) {
        for (Vertex z = y; z < n; ++z) {
          ++out.triples_checked;
          int c = table.meet_count(x, y, z);
          if (c != 1) {
            out.is_median = false;
            out.counterexample = std::array<Vertex, 3>{x, y, z};
            out.intersection_size = c;
            return out;
          }
        }
      }
    }
    return out;
  }
  out.exhaustive = false;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> pick(0, n - 1);
  // Rows are cached per source; bound the number of distinct sources touched.
  std::vector<Vertex> pool(n);
  for (Vertex v = 0; v < n; ++v) pool[v] = v;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(n, 512));
  std::uniform_int_distribution<int> pick_pool(0, static_cast<int>(pool.size()) - 1);
  for (std::int64_t i = 0; i < samples; ++i) {
    Vertex x = pool[pick_pool(rng)], y = pool[pick_pool(rng)], z = pool[pick_pool(rng)];
    ++out.triples_checked;
    int c = meet_count_direct(g, x, y, z);
    if (c != 1) {
      out.is_median = false;
      out.counterexample = std::array<Vertex, 3>{x, y, z};
      out.intersection_size = c;
      return out;
    }
  }
  return out;
}

GrowthValue growth(const MetricGraph& g, Vertex x, int k) {
  const auto& row = g.distances_from(x);
  GrowthValue out;
  Dist ecc = 0;
  for (Dist d : row) {
    if (d <= k) ++out.count;
    ecc = std::max(ecc, d);
  }
  out.truncated = k > ecc;
  return out;
}

GrowthValue growth_min(const MetricGraph& g, int k) {
  GrowthValue best{std::numeric_limits<std::int64_t>::max(), false};
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    auto v = growth(g, x, k);
    best.count = std::min(best.count, v.count);
    best.truncated = best.truncated || v.truncated;
  }
  return best;
}

Dist eccentricity(const MetricGraph& g, Vertex v) {
  const auto& row = g.distances_from(v);
  return *std::max_element(row.begin(), row.end());
}

Dist diameter(const MetricGraph& g) {
  const int n = g.vertex_count();
  Dist best = 0;
  std::vector<std::uint64_t> seen(n), frontier(n), next(n);
  for (Vertex base = 0; base < n; base += 64) {
    std::fill(seen.begin(), seen.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    for (int i = 0; i < 64 && base + i < n; ++i) {
      seen[base + i] = frontier[base + i] = std::uint64_t{1} << i;
    }
    Dist level = 0;
    while (true) {
      bool any = false;
      for (Vertex v = 0; v < n; ++v) {
        std::uint64_t acc = 0;
        for (Vertex w : g.neighbors(v)) acc |= frontier[w];
        acc &= ~seen[v];
        next[v] = acc;
        if (acc) any = true;
      }
      if (!any) break;
      ++level;
      for (Vertex v = 0; v < n; ++v) seen[v] |= next[v];
      std::swap(frontier, next);
    }
    best = std::max(best, level);
  }
  return best;
}

bool is_tree(const MetricGraph& g) {
  return g.edge_count() == g.vertex_count() - 1;
}

}  // namespace coarse
