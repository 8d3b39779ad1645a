#include "coarse/path_system.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

namespace coarse {

namespace {

using VertexSeq = std::vector<Vertex>;

struct SeqHash {
  std::size_t operator()(const VertexSeq& s) const { return boost::hash_range(s.begin(), s.end()); }
};

using SeqSet = std::unordered_set<VertexSeq, SeqHash>;

bool is_geodesic_kind(SystemKind k) {
  return k == SystemKind::kAllGeodesics || k == SystemKind::kTreeGeodesics ||
         k == SystemKind::kMedianMonotone;
}

std::string seq_string(const VertexSeq& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Visits the staircase combing line a -> b in order; stops early and returns
// false as soon as visit returns false.
template <class Visit>
bool walk_combing(int half, Vertex a, Vertex b, Visit&& visit) {
  const int w = 2 * half + 1;
  int x = a % w - half, y = a / w - half;
  const int xb = b % w - half, yb = b / w - half;
  const int s = (y > 0) - (y < 0);
  const int z = s * std::max(0, s * yb);
  if (!visit(a)) return false;
  auto go = [&](int tx, int ty) {
    while (y != ty) {
      y += ty > y ? 1 : -1;
      if (!visit((y + half) * w + x + half)) return false;
    }
    while (x != tx) {
      x += tx > x ? 1 : -1;
      if (!visit((y + half) * w + x + half)) return false;
    }
    return true;
  };
  return go(x, z) && go(xb, z) && go(xb, yb);
}

}  // namespace

std::string kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::kAllGeodesics: return "AllGeodesics";
    case SystemKind::kTreeGeodesics: return "TreeGeodesics";
    case SystemKind::kMedianMonotone: return "MedianMonotone";
    case SystemKind::kStaircaseCombingZ2: return "StaircaseCombingZ2";
    case SystemKind::kStoredSet: return "StoredSet";
    case SystemKind::kPushForward: return "PushForward";
  }
  return "?";
}

struct PathSystem::Stored {
  std::vector<VertexSeq> paths;
  bool generated = false;
  std::vector<std::vector<std::pair<int, int>>> occurrences;  // vertex -> (path, position)
};

struct PathSystem::MedianState {
  std::mutex mu;
  std::optional<bool> is_median;
};

PathSystem PathSystem::all_geodesics(GraphPtr g) {
  if (!g) throw InputError("null graph");
  PathSystem ps;
  ps.kind_ = SystemKind::kAllGeodesics;
  ps.graph_ = std::move(g);
  ps.median_ = std::make_shared<MedianState>();
  return ps;
}

PathSystem PathSystem::tree_geodesics(GraphPtr g) {
  if (!g) throw InputError("null graph");
  if (!is_tree(*g)) throw StructuralError("TreeGeodesics requires a tree");
  PathSystem ps = all_geodesics(std::move(g));
  ps.kind_ = SystemKind::kTreeGeodesics;
  return ps;
}

PathSystem PathSystem::median_monotone(GraphPtr g) {
  if (!g) throw InputError("null graph");
  auto check = is_median_graph(*g);
  if (!check.is_median) {
    const auto& t = *check.counterexample;
    throw StructuralError("not a median graph: triple (" + std::to_string(t[0]) + "," +
                          std::to_string(t[1]) + "," + std::to_string(t[2]) + ") has " +
                          std::to_string(check.intersection_size) + " medians");
  }
  PathSystem ps = all_geodesics(std::move(g));
  ps.kind_ = SystemKind::kMedianMonotone;
  ps.config_.kappa0 = 2;
  ps.median_->is_median = true;
  return ps;
}

PathSystem PathSystem::staircase_z2(GraphPtr g, int half) {
  if (!g) throw InputError("null graph");
  if (half < 0) throw InputError("negative staircase half-width");
  const int w = 2 * half + 1;
  if (g->vertex_count() != w * w || g->edge_count() != 2LL * w * (w - 1)) {
    throw InputError("staircase combing needs the (2n+1)x(2n+1) grid, got " +
                     std::to_string(g->vertex_count()) + " vertices");
  }
  PathSystem ps;
  ps.kind_ = SystemKind::kStaircaseCombingZ2;
  ps.graph_ = std::move(g);
  ps.half_ = half;
  ps.config_.kappa0 = 1;
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x < half; ++x) {
      if (!ps.graph_->adjacent(ps.at(x, y), ps.at(x + 1, y))) {
        throw InputError("staircase grid is not row-major");
      }
    }
  }
  return ps;
}

namespace {

std::shared_ptr<PathSystem::Stored> make_stored(const MetricGraph& g, std::vector<VertexSeq> paths,
                                                bool generated);

}  // namespace

PathSystem PathSystem::generated(GraphPtr g, std::vector<std::vector<Vertex>> generators,
                                 PathSystemConfig config, SystemKind tag) {
  if (!g) throw InputError("null graph");
  for (const auto& p : generators) EdgePath(*g, p);
  PathSystem ps;
  ps.kind_ = tag;
  ps.graph_ = std::move(g);
  ps.config_ = config;
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  ps.stored_ = make_stored(*ps.graph_, std::move(generators), true);
  return ps;
}

PathSystem PathSystem::stored(GraphPtr g, std::vector<std::vector<Vertex>> paths,
                              PathSystemConfig config) {
  if (!g) throw InputError("null graph");
  for (const auto& p : paths) EdgePath(*g, p);
  SeqSet set(paths.begin(), paths.end());
  for (Vertex v = 0; v < g->vertex_count(); ++v) {
    if (!set.count(VertexSeq{v})) {
      throw StructuralError("stored path set lacks the trivial path at vertex " + std::to_string(v));
    }
  }
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i; j < p.size(); ++j) {
        VertexSeq sub(p.begin() + i, p.begin() + j + 1);
        if (!set.count(sub)) {
          throw StructuralError("stored path #" + std::to_string(k) + " " + seq_string(p) +
                                " is missing subsegment " + seq_string(sub));
        }
        if (config.undirected) {
          std::reverse(sub.begin(), sub.end());
          if (!set.count(sub)) {
            throw StructuralError("undirected stored set is missing inverse " + seq_string(sub) +
                                  " of a subsegment of path #" + std::to_string(k));
          }
        }
      }
    }
  }
  PathSystem ps;
  ps.kind_ = SystemKind::kStoredSet;
  ps.graph_ = std::move(g);
  ps.config_ = config;
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  ps.stored_ = make_stored(*ps.graph_, std::move(paths), false);
  return ps;
}

namespace {

std::shared_ptr<PathSystem::Stored> make_stored(const MetricGraph& g, std::vector<VertexSeq> paths,
                                                bool generated) {
  auto s = std::make_shared<PathSystem::Stored>();
  s->paths = std::move(paths);
  s->generated = generated;
  s->occurrences.resize(g.vertex_count());
  for (std::size_t k = 0; k < s->paths.size(); ++k) {
    const auto& p = s->paths[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      s->occurrences[p[i]].emplace_back(static_cast<int>(k), static_cast<int>(i));
    }
  }
  return s;
}

}  // namespace

bool PathSystem::is_generated() const { return stored_ && stored_->generated; }

const std::vector<std::vector<Vertex>>& PathSystem::stored_paths() const {
  if (!stored_) throw CapabilityError(kind_name(kind_) + " has no stored paths");
  return stored_->paths;
}

std::pair<int, int> PathSystem::coords(Vertex v) const {
  const int w = 2 * half_ + 1;
  return {v % w - half_, v / w - half_};
}

Vertex PathSystem::at(int x, int y) const {
  if (x < -half_ || x > half_ || y < -half_ || y > half_) {
    throw InputError("point (" + std::to_string(x) + "," + std::to_string(y) + ") outside the box");
  }
  const int w = 2 * half_ + 1;
  return (y + half_) * w + (x + half_);
}

EdgePath PathSystem::combing_line(Vertex a, Vertex b) const {
  if (kind_ != SystemKind::kStaircaseCombingZ2) {
    throw CapabilityError("combing_line on " + kind_name(kind_));
  }
  auto [xa, ya] = coords(a);
  auto [xb, yb] = coords(b);
  auto sgn = [](int v) { return (v > 0) - (v < 0); };
  const int s = sgn(ya);
  const int z = s * std::max(0, s * yb);
  std::vector<Vertex> vs{a};
  int x = xa, y = ya;
  auto walk = [&](int tx, int ty) {
    while (y != ty) {
      y += ty > y ? 1 : -1;
      vs.push_back(at(x, y));
    }
    while (x != tx) {
      x += tx > x ? 1 : -1;
      vs.push_back(at(x, y));
    }
  };
  walk(xa, z);
  walk(xb, z);
  walk(xb, yb);
  return EdgePath::unchecked(*graph_, std::move(vs));
}

std::vector<EdgePath> PathSystem::staircase_candidates(Vertex x, Vertex y) const {
  std::vector<EdgePath> out{combing_line(x, y)};
  if (config_.undirected) {
    EdgePath back = combing_line(y, x).inverse();
    if (back != out.front()) out.push_back(std::move(back));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PathSystem::require_median() const {
  if (kind_ == SystemKind::kTreeGeodesics || kind_ == SystemKind::kMedianMonotone ||
      kind_ == SystemKind::kStaircaseCombingZ2) {
    return;
  }
  if (kind_ != SystemKind::kAllGeodesics) {
    throw CapabilityError("bounded replacement is not supported for " + kind_name(kind_));
  }
  std::lock_guard lock(median_->mu);
  if (!median_->is_median) median_->is_median = is_median_graph(*graph_).is_median;
  if (!*median_->is_median) {
    throw CapabilityError("bounded replacement for AllGeodesics needs a median graph");
  }
}

bool PathSystem::supports_bounded_replacement() const {
  try {
    require_median();
    return true;
  } catch (const CapabilityError&) {
    return false;
  }
}

Dist PathSystem::replacement_bound() const {
  switch (kind_) {
    case SystemKind::kTreeGeodesics:
    case SystemKind::kStaircaseCombingZ2: return 1;
    case SystemKind::kAllGeodesics:
    case SystemKind::kMedianMonotone: return 2;
    default: throw CapabilityError("no replacement bound for " + kind_name(kind_));
  }
}

SpecialPaths PathSystem::special_paths(Vertex x, Vertex y, int cap) const {
  if (!graph_->contains(x) || !graph_->contains(y)) throw InputError("invalid vertex in special_paths");
  if (cap < 1) throw InputError("special_paths cap must be positive");
  SpecialPaths out;
  if (is_geodesic_kind(kind_)) {
    const auto& to_y = graph_->distances_from(y);
    std::vector<Vertex> cur{x};
    // Depth-first in increasing neighbor order yields lex order.
    std::function<bool()> dfs = [&]() -> bool {
      Vertex v = cur.back();
      if (v == y) {
        if (static_cast<int>(out.paths.size()) == cap) {
          out.complete = false;
          return false;
        }
        out.paths.push_back(EdgePath::unchecked(*graph_, cur));
        return true;
      }
      for (Vertex w : graph_->neighbors(v)) {
        if (to_y[w] != to_y[v] - 1) continue;
        cur.push_back(w);
        bool go_on = dfs();
        cur.pop_back();
        if (!go_on) return false;
      }
      return true;
    };
    dfs();
    return out;
  }
  if (kind_ == SystemKind::kStaircaseCombingZ2) {
    auto c = staircase_candidates(x, y);
    if (static_cast<int>(c.size()) > cap) {
      c.resize(cap);
      out.complete = false;
    }
    out.paths = std::move(c);
    return out;
  }
  std::set<VertexSeq> found;
  if (x == y) found.insert(VertexSeq{x});
  for (auto [k, i] : stored_->occurrences[x]) {
    const auto& p = stored_->paths[k];
    for (int j = i; j < static_cast<int>(p.size()); ++j) {
      if (p[j] == y) found.emplace(p.begin() + i, p.begin() + j + 1);
    }
    if (config_.undirected) {
      for (int j = i; j >= 0; --j) {
        if (p[j] == y) {
          VertexSeq s(p.begin() + j, p.begin() + i + 1);
          std::reverse(s.begin(), s.end());
          found.insert(std::move(s));
        }
      }
    }
  }
  for (const auto& s : found) {
    if (static_cast<int>(out.paths.size()) == cap) {
      out.complete = false;
      break;
    }
    out.paths.push_back(EdgePath::unchecked(*graph_, s));
  }
  return out;
}

EdgePath PathSystem::canonical_path(Vertex x, Vertex y) const {
  if (is_geodesic_kind(kind_)) return lex_min_geodesic(*graph_, x, y);
  if (kind_ == SystemKind::kStaircaseCombingZ2) return combing_line(x, y);
  auto sp = special_paths(x, y, std::numeric_limits<int>::max());
  if (sp.paths.empty()) {
    throw StructuralError("no special path from " + std::to_string(x) + " to " + std::to_string(y));
  }
  return *std::min_element(sp.paths.begin(), sp.paths.end(), [](const EdgePath& a, const EdgePath& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a < b;
  });
}

bool PathSystem::contains(const EdgePath& p) const {
  if (p.empty()) return false;
  for (int i = 0; i < p.size(); ++i) {
    if (!graph_->contains(p[i])) return false;
    if (i > 0 && !graph_->adjacent(p[i - 1], p[i])) return false;
  }
  if (is_geodesic_kind(kind_)) return graph_->distance(p.front(), p.back()) == p.length();
  if (kind_ == SystemKind::kStaircaseCombingZ2) {
    for (const auto& c : staircase_candidates(p.front(), p.back())) {
      if (c == p) return true;
    }
    return false;
  }
  if (p.length() == 0) return stored_->generated || !stored_->occurrences[p.front()].empty();
  for (const auto& c : special_paths(p.front(), p.back(), std::numeric_limits<int>::max()).paths) {
    if (c == p) return true;
  }
  return false;
}

bool PathSystem::avoids(const std::vector<Vertex>& vs, const DistanceRow* to_center, Dist cut) const {
  if (!to_center) return true;
  for (Vertex v : vs) {
    if ((*to_center)[v] <= cut) return false;
  }
  return true;
}

LegResult PathSystem::min_leg_avoiding(Vertex x, Vertex y, const Ball& ball) const {
  if (!graph_->contains(x) || !graph_->contains(y) || !graph_->contains(ball.center)) {
    throw InputError("invalid vertex in min_leg_avoiding");
  }
  LegResult res;
  if (ball.empty()) {
    if (is_geodesic_kind(kind_) || kind_ == SystemKind::kStaircaseCombingZ2) {
      res.length = graph_->distance(x, y);
      return res;
    }
  }
  const DistanceRow* to_c = ball.empty() ? nullptr : &graph_->distances_from(ball.center);
  const Dist cut = ball.max_dist();
  if (to_c && ((*to_c)[x] <= cut || (*to_c)[y] <= cut)) {
    res.endpoint_in_ball = true;
    return res;
  }
  if (is_geodesic_kind(kind_)) {
    const auto& dx = graph_->distances_from(x);
    const auto& dy = graph_->distances_from(y);
    const Dist d = dx[y];
    // BFS along the interval I(x,y), moving away from x.
    std::vector<char> seen(graph_->vertex_count(), 0);
    std::vector<Vertex> queue{x};
    seen[x] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex u = queue[head];
      if (u == y) {
        res.length = d;
        return res;
      }
      for (Vertex w : graph_->neighbors(u)) {
        if (seen[w] || dx[w] != dx[u] + 1 || dx[w] + dy[w] != d || (*to_c)[w] <= cut) continue;
        seen[w] = 1;
        queue.push_back(w);
      }
    }
    return res;
  }
  if (kind_ == SystemKind::kStaircaseCombingZ2) {
    for (const auto& c : staircase_candidates(x, y)) {
      if (avoids(c.vertices(), to_c, cut)) {
        res.length = c.length();
        return res;
      }
    }
    return res;
  }
  Dist row = leg_row(x, ball)[y];
  if (row != kUnreachable) res.length = row;
  return res;
}

std::optional<EdgePath> PathSystem::leg_path_avoiding(Vertex x, Vertex y, const Ball& ball) const {
  auto leg = min_leg_avoiding(x, y, ball);
  if (!leg.length) return std::nullopt;
  const DistanceRow* to_c = ball.empty() ? nullptr : &graph_->distances_from(ball.center);
  const Dist cut = ball.max_dist();
  if (is_geodesic_kind(kind_)) {
    if (!to_c) return lex_min_geodesic(*graph_, x, y);
    const auto& dx = graph_->distances_from(x);
    const Dist d = dx[y];
    // Distances to y inside the punctured interval, then greedy from x.
    const auto& dy = graph_->distances_from(y);
    auto in_interval = [&](Vertex w) { return dx[w] + dy[w] == d && (*to_c)[w] > cut; };
    DistanceRow back = bfs_restricted(*graph_, y, in_interval);
    std::vector<Vertex> vs{x};
    Vertex cur = x;
    while (cur != y) {
      for (Vertex w : graph_->neighbors(cur)) {
        if (back[w] != kUnreachable && back[w] == back[cur] - 1 && in_interval(w)) {
          cur = w;
          break;
        }
      }
      vs.push_back(cur);
    }
    return EdgePath::unchecked(*graph_, std::move(vs));
  }
  std::optional<EdgePath> best;
  for (const auto& c : special_paths(x, y, std::numeric_limits<int>::max()).paths) {
    if (!avoids(c.vertices(), to_c, cut)) continue;
    if (!best || c.length() < best->length() || (c.length() == best->length() && c < *best)) best = c;
  }
  return best;
}

DistanceRow PathSystem::leg_row(Vertex u, const Ball& ball) const {
  const int n = graph_->vertex_count();
  DistanceRow row(n, kUnreachable);
  const DistanceRow* to_c = ball.empty() ? nullptr : &graph_->distances_from(ball.center);
  const Dist cut = ball.max_dist();
  if (to_c && (*to_c)[u] <= cut) return row;
  if (is_geodesic_kind(kind_)) {
    const auto& du = graph_->distances_from(u);
    if (!to_c) return du;
    DistanceRow pd = bfs_restricted(*graph_, u, [&](Vertex w) { return (*to_c)[w] > cut; });
    for (Vertex v = 0; v < n; ++v) {
      if (pd[v] == du[v]) row[v] = du[v];
    }
    return row;
  }
  if (kind_ == SystemKind::kStaircaseCombingZ2) {
    const auto& du = graph_->distances_from(u);
    if (!to_c) return du;
    auto clear = [&](Vertex w) { return (*to_c)[w] > cut; };
    for (Vertex v = 0; v < n; ++v) {
      if (!clear(v)) continue;
      if (walk_combing(half_, u, v, clear) || (config_.undirected && walk_combing(half_, v, u, clear))) {
        row[v] = du[v];
      }
    }
    return row;
  }
  row[u] = 0;
  for (auto [k, i] : stored_->occurrences[u]) {
    const auto& p = stored_->paths[k];
    for (int j = i + 1; j < static_cast<int>(p.size()); ++j) {
      if (to_c && (*to_c)[p[j]] <= cut) break;
      if (row[p[j]] == kUnreachable || row[p[j]] > j - i) row[p[j]] = j - i;
    }
    if (config_.undirected) {
      for (int j = i - 1; j >= 0; --j) {
        if (to_c && (*to_c)[p[j]] <= cut) break;
        if (row[p[j]] == kUnreachable || row[p[j]] > i - j) row[p[j]] = i - j;
      }
    }
  }
  return row;
}

Replacement PathSystem::bounded_replacement(const EdgePath& h, Vertex y2) const {
  require_median();
  if (!graph_->contains(y2)) throw InputError("invalid vertex " + std::to_string(y2));
  if (!contains(h)) throw PreconditionError("path is not a special path of the system");
  if (graph_->distance(h.back(), y2) > 1) {
    throw PreconditionError("replacement endpoint " + std::to_string(y2) + " is at distance " +
                            std::to_string(graph_->distance(h.back(), y2)) + " from h+");
  }
  Replacement out;
  out.bound = replacement_bound();
  if (y2 == h.back()) {
    out.path = h;
    return out;
  }
  if (kind_ == SystemKind::kStaircaseCombingZ2) {
    std::optional<Replacement> best;
    for (const auto& c : staircase_candidates(h.front(), y2)) {
      Dist hd = hausdorff(*graph_, h, c);
      if (!best || hd < best->hausdorff) best = Replacement{c, hd, out.bound};
    }
    out = *best;
  } else {
    const Vertex x = h.front();
    const Dist d = graph_->distance(x, y2);
    auto near_h = set_distance_map(*graph_, h.vertices());
    bool found = false;
    for (Dist k = 0; k <= out.bound && !found; ++k) {
      auto allowed = [&](Vertex w) { return near_h[w] <= k; };
      if (!allowed(y2)) continue;
      DistanceRow back = bfs_restricted(*graph_, y2, allowed);
      if (back[x] != d) continue;
      std::vector<Vertex> vs{x};
      Vertex cur = x;
      while (cur != y2) {
        for (Vertex w : graph_->neighbors(cur)) {
          if (back[w] != kUnreachable && back[w] == back[cur] - 1) {
            cur = w;
            break;
          }
        }
        vs.push_back(cur);
      }
      EdgePath cand = EdgePath::unchecked(*graph_, std::move(vs));
      Dist hd = hausdorff(*graph_, h, cand);
      if (hd <= out.bound) {
        out.path = std::move(cand);
        out.hausdorff = hd;
        found = true;
      }
    }
    if (!found) {
      throw InternalError("no geodesic replacement within Hausdorff " + std::to_string(out.bound) +
                          " for path ending at " + std::to_string(h.back()) + ", new end " +
                          std::to_string(y2));
    }
  }
  if (out.hausdorff > out.bound) {
    throw InternalError("bounded replacement has Hausdorff distance " +
                        std::to_string(out.hausdorff) + " > " + std::to_string(out.bound));
  }
  return out;
}

QiCheck check_quasi_isometry(const MetricGraph& source, const MetricGraph& target,
                             const std::vector<Vertex>& f, const Rational& C,
                             std::int64_t samples, std::uint64_t seed) {
  if (static_cast<int>(f.size()) != source.vertex_count()) {
    throw InputError("vertex map covers " + std::to_string(f.size()) + " of " +
                     std::to_string(source.vertex_count()) + " source vertices");
  }
  for (Vertex v : f) {
    if (!target.contains(v)) throw InputError("vertex map hits invalid target vertex " + std::to_string(v));
  }
  if (C < 0) throw InputError("quasi-isometry constant must be nonnegative");
  QiCheck out;
  const Rational lambda = std::max(Rational(1), C);
  auto pair_ok = [&](Vertex x, Vertex y) {
    Rational d = source.distance(x, y);
    Rational df = target.distance(f[x], f[y]);
    return df <= lambda * d + C && df >= d / lambda - C;
  };
  auto fail = [&](Vertex x, Vertex y) {
    out.ok = false;
    out.witness = std::make_pair(x, y);
    out.message = "pair (" + std::to_string(x) + "," + std::to_string(y) + "): d=" +
                  std::to_string(source.distance(x, y)) + ", image distance " +
                  std::to_string(target.distance(f[x], f[y])) + " violates the " + to_string(C) +
                  "-quasi-isometry bounds";
  };
  const int n = source.vertex_count();
  if (n <= 400) {
    for (Vertex x = 0; x < n && out.ok; ++x) {
      for (Vertex y = x + 1; y < n; ++y) {
        if (!pair_ok(x, y)) {
          fail(x, y);
          break;
        }
      }
    }
  } else {
    out.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::vector<Vertex> pool(n);
    for (Vertex v = 0; v < n; ++v) pool[v] = v;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(n, 256));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
    for (std::int64_t i = 0; i < samples; ++i) {
      Vertex x = pool[pick(rng)], y = pool[pick(rng)];
      if (!pair_ok(x, y)) {
        fail(x, y);
        break;
      }
    }
  }
  if (!out.ok) return out;
  auto near = set_distance_map(target, f);
  for (Vertex v = 0; v < target.vertex_count(); ++v) {
    if (Rational(near[v]) > C) {
      out.ok = false;
      out.uncovered = v;
      out.message = "target vertex " + std::to_string(v) + " is at distance " +
                    std::to_string(near[v]) + " > " + to_string(C) + " from the image";
      break;
    }
  }
  return out;
}

PushForwardResult push_forward(const std::vector<Vertex>& f, const Rational& C,
                               const PathSystem& source, GraphPtr target,
                               const PushForwardOptions& opt) {
  if (!target) throw InputError("null target graph");
  const MetricGraph& src = source.graph();
  const MetricGraph& tgt = *target;
  auto qi = check_quasi_isometry(src, tgt, f, C, opt.qi_samples, opt.seed);
  if (!qi.ok) throw InputError("map is not a quasi-isometry: " + qi.message);

  const Dist radius = static_cast<Dist>(floor_of(C));
  std::vector<std::vector<Vertex>> near_cache(tgt.vertex_count());
  auto near = [&](Vertex c) -> const std::vector<Vertex>& {
    auto& slot = near_cache[c];
    if (slot.empty()) {
      const auto& row = tgt.distances_from(c);
      for (Vertex v = 0; v < tgt.vertex_count(); ++v) {
        if (row[v] <= radius) slot.push_back(v);
      }
    }
    return slot;
  };

  PushForwardResult res{PathSystem::all_geodesics(target), true, 0};
  SeqSet gens;
  const int n = src.vertex_count();
  bool capped = false;
  for (Vertex x = 0; x < n && !capped; ++x) {
    for (Vertex y = source.config().undirected ? x : 0; y < n && !capped; ++y) {
      auto sp = source.special_paths(x, y, opt.paths_per_pair);
      if (!sp.complete) res.source_complete = false;
      for (const auto& h : sp.paths) {
        std::vector<Vertex> image;
        image.reserve(h.size());
        for (Vertex v : h.vertices()) image.push_back(f[v]);
        EdgePath core = rectify(tgt, image);
        for (Vertex a : near(core.front())) {
          EdgePath head = concat(lex_min_geodesic(tgt, a, core.front()), core);
          for (Vertex b : near(core.back())) {
            gens.insert(concat(head, lex_min_geodesic(tgt, core.back(), b)).vertices());
            if (static_cast<std::int64_t>(gens.size()) >= opt.max_generators) {
              capped = true;
              break;
            }
          }
          if (capped) break;
        }
        if (capped) break;
      }
    }
  }
  if (capped) res.source_complete = false;

  PathSystemConfig cfg;
  cfg.undirected = source.config().undirected;
  const Rational lambda_f = std::max(Rational(1), C);
  cfg.lambda0 = source.config().lambda0 * lambda_f;
  Rational kappa(0);
  for (const auto& g : gens) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& row = tgt.distances_from(g[i]);
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        Rational excess = Rational(static_cast<std::int64_t>(j - i)) - cfg.lambda0 * row[g[j]];
        kappa = std::max(kappa, excess);
      }
    }
  }
  cfg.kappa0 = kappa;
  cfg.c_p = std::max(source.config().c_p, cfg.lambda0 + cfg.kappa0);
  std::vector<std::vector<Vertex>> list(gens.begin(), gens.end());
  res.generators = static_cast<std::int64_t>(list.size());
  res.system = PathSystem::generated(std::move(target), std::move(list), cfg, SystemKind::kPushForward);
  return res;
}

ValidationReport validate_system(const PathSystem& ps, std::int64_t samples, std::uint64_t seed) {
  ValidationReport rep;
  const MetricGraph& g = ps.graph();
  const int n = g.vertex_count();
  const auto& cfg = ps.config();
  auto fail = [&](std::string msg, std::optional<EdgePath> w) {
    if (rep.passed) rep.witness = std::move(w);
    rep.passed = false;
    rep.failures.push_back(std::move(msg));
  };

  for (Vertex v = 0; v < n; ++v) {
    if (!ps.contains(EdgePath::trivial(g, v))) {
      fail("missing trivial path at " + std::to_string(v), EdgePath::trivial(g, v));
      break;
    }
  }

  auto check_path = [&](const EdgePath& p) {
    ++rep.paths_checked;
    for (int i = 0; i < p.size(); ++i) {
      const auto& row = g.distances_from(p[i]);
      for (int j = i + 1; j < p.size(); ++j) {
        const Dist d = row[p[j]];
        const Rational len(j - i);
        if (d > 0) rep.measured_lambda = std::max(rep.measured_lambda, len / d);
        if (len > cfg.lambda0 * d + cfg.kappa0) {
          fail("subpath " + std::to_string(i) + ".." + std::to_string(j) + " of length " +
                   std::to_string(j - i) + " exceeds " + to_string(cfg.lambda0) + "*" +
                   std::to_string(d) + "+" + to_string(cfg.kappa0),
               p);
          return;
        }
      }
    }
  };

  if (ps.is_stored()) {
    const auto& paths = ps.stored_paths();
    if (!ps.is_generated()) {
      SeqSet set(paths.begin(), paths.end());
      for (const auto& p : paths) {
        bool ok = true;
        for (std::size_t i = 0; i < p.size() && ok; ++i) {
          for (std::size_t j = i; j < p.size() && ok; ++j) {
            VertexSeq sub(p.begin() + i, p.begin() + j + 1);
            if (!set.count(sub)) {
              fail("missing subsegment " + seq_string(sub), EdgePath::unchecked(g, p));
              ok = false;
            } else if (cfg.undirected) {
              std::reverse(sub.begin(), sub.end());
              if (!set.count(sub)) {
                fail("missing inverse " + seq_string(sub), EdgePath::unchecked(g, p));
                ok = false;
              }
            }
          }
        }
        if (!ok) break;
      }
    }
    for (const auto& p : paths) check_path(EdgePath::unchecked(g, p));
  }

  std::vector<std::pair<Vertex, Vertex>> pairs;
  if (samples <= 0) {
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex y = 0; y < n; ++y) pairs.emplace_back(x, y);
    }
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Vertex> pick(0, n - 1);
    for (std::int64_t i = 0; i < samples; ++i) pairs.emplace_back(pick(rng), pick(rng));
  }
  for (auto [x, y] : pairs) {
    auto sp = ps.special_paths(x, y, 4);
    if (sp.paths.empty()) {
      fail("no special path from " + std::to_string(x) + " to " + std::to_string(y), std::nullopt);
      continue;
    }
    if (!ps.is_stored()) {
      for (const auto& p : sp.paths) check_path(p);
    }
    if (cfg.undirected && ps.special_paths(y, x, 1).paths.empty()) {
      fail("no inverse path from " + std::to_string(y) + " to " + std::to_string(x), sp.paths.front());
    }
    if (rep.failures.size() > 16) break;
  }
  return rep;
}

}  // namespace coarse
