#include "coarse/morse.hpp"

#include <algorithm>
#include <random>

namespace coarse {

void ThinnessParams::validate() const {
  if (epsilon <= 0 || epsilon >= 1) throw InputError("epsilon must lie in (0, 1)");
  if (A < 1) throw InputError("A must be at least 1");
  if (n < 1) throw InputError("n must be at least 1");
  if (R < 0) throw InputError("R must be nonnegative");
  if (L && *L <= 0) throw InputError("scale L must be positive");
}

namespace {

// Thinness of the window gamma[i..j]; fills the witness on failure.
bool window_thin(const EdgePath& gamma, int i, int j, const ThinnessParams& p, const PathSystem& ps,
                 MorseWitness& out) {
  const MetricGraph& g = ps.graph();
  const Vertex lo = gamma[i], hi = gamma[j];
  const Dist d = g.distance(lo, hi);
  const Rational radius = p.epsilon * d;
  const Rational budget = p.A * d;
  // In a tree every walk from hi to lo runs through the whole window.
  const bool geodesic_kind = ps.kind() == SystemKind::kAllGeodesics ||
                             ps.kind() == SystemKind::kTreeGeodesics ||
                             ps.kind() == SystemKind::kMedianMonotone;
  if (geodesic_kind && g.edge_count() == g.vertex_count() - 1) return true;
  std::vector<Vertex> seen;
  for (int k = i; k <= j; ++k) {
    const Vertex z = gamma[k];
    if (std::find(seen.begin(), seen.end(), z) != seen.end()) continue;
    seen.push_back(z);
    const Ball ball{z, radius};
    const auto& to_z = g.distances_from(z);
    if (ball.contains_distance(to_z[lo]) || ball.contains_distance(to_z[hi])) continue;
    auto res = shortest_line(ps, ball, hi, lo, p.n);
    if (res.line && Rational(res.length) <= budget) {
      out = MorseWitness{i, j, res.line, z, std::nullopt};
      return false;
    }
  }
  return true;
}

void record(MorseReport& r, std::string key, std::string value) {
  r.measured.emplace_back(std::move(key), std::move(value));
}

}  // namespace

MorseReport proportionally_thin(const EdgePath& gamma, const ThinnessParams& p, const PathSystem& ps) {
  p.validate();
  MorseReport rep;
  MorseWitness w;
  rep.verdict = window_thin(gamma, 0, gamma.length(), p, ps, w);
  if (!rep.verdict) rep.witness = w;
  record(rep, "d", std::to_string(ps.graph().distance(gamma.front(), gamma.back())));
  return rep;
}

MorseReport weakly_polygonally_morse(const EdgePath& gamma, const ThinnessParams& p,
                                     const PathSystem& ps) {
  p.validate();
  MorseReport rep;
  const int len = gamma.length();
  const int min_len = static_cast<int>(std::max<std::int64_t>(0, ceil_of(p.R)));
  const int max_len = p.L ? static_cast<int>(std::min<std::int64_t>(len, floor_of(*p.L))) : len;
  std::int64_t windows = 0;
  for (int i = 0; i <= len; ++i) {
    for (int j = i + min_len; j <= len && j - i <= max_len; ++j) {
      ++windows;
      MorseWitness w;
      if (!window_thin(gamma, i, j, p, ps, w)) {
        rep.verdict = false;
        rep.witness = w;
        record(rep, "windows_checked", std::to_string(windows));
        return rep;
      }
    }
  }
  record(rep, "windows_checked", std::to_string(windows));
  if (windows == 0) rep.note = "no window of admissible length";
  return rep;
}

bool verify_thinness_witness(const EdgePath& gamma, const ThinnessParams& p, const PathSystem& ps,
                             const MorseWitness& w) {
  if (!w.line || !w.point) return false;
  if (w.i < 0 || w.j > gamma.length() || w.i > w.j) return false;
  const MetricGraph& g = ps.graph();
  const PolygonalLine& line = *w.line;
  if (line.legs.empty() || static_cast<int>(line.legs.size()) > p.n) return false;
  try {
    line.check_joined();
  } catch (const InputError&) {
    return false;
  }
  for (const auto& leg : line.legs) {
    if (!ps.contains(leg)) return false;
  }
  const Vertex lo = gamma[w.i], hi = gamma[w.j];
  if (line.front() != hi || line.back() != lo) return false;
  bool on_window = false;
  for (int k = w.i; k <= w.j; ++k) on_window = on_window || gamma[k] == *w.point;
  if (!on_window) return false;
  const Dist d = g.distance(lo, hi);
  if (Rational(line.length()) > p.A * d) return false;
  return Rational(line.clearance(g, *w.point)) > p.epsilon * d;
}

std::vector<Vertex> closest_point_projection(const MetricGraph& g, const EdgePath& gamma) {
  const int V = g.vertex_count();
  std::vector<Vertex> on(gamma.vertices().begin(), gamma.vertices().end());
  std::sort(on.begin(), on.end());
  on.erase(std::unique(on.begin(), on.end()), on.end());
  // BFS layer by layer, carrying the smallest-id source reaching each vertex.
  std::vector<Vertex> owner(V, -1);
  std::vector<Dist> dist(V, kUnreachable);
  std::vector<Vertex> layer = on;
  for (Vertex v : on) {
    owner[v] = v;
    dist[v] = 0;
  }
  Dist level = 0;
  while (!layer.empty()) {
    std::vector<Vertex> next;
    for (Vertex u : layer) {
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] == kUnreachable) {
          dist[w] = level + 1;
          owner[w] = owner[u];
          next.push_back(w);
        } else if (dist[w] == level + 1 && owner[u] < owner[w]) {
          owner[w] = owner[u];
        }
      }
    }
    layer = std::move(next);
    ++level;
  }
  return owner;
}

MorseReport p_contracting_check(const EdgePath& gamma, const Rational& C, const PathSystem& ps,
                                const ContractingOptions& opt) {
  const MetricGraph& g = ps.graph();
  const int V = g.vertex_count();
  MorseReport rep;
  std::vector<Vertex> pi = opt.projection ? *opt.projection : closest_point_projection(g, gamma);
  if (static_cast<int>(pi.size()) != V) throw InputError("projection must be defined on every vertex");
  for (Vertex v : pi) {
    if (!gamma.contains(v)) throw InputError("projection must map into gamma");
  }
  record(rep, "C", to_string(C));
  for (int k = 0; k <= gamma.length(); ++k) {
    const Vertex x = gamma[k];
    if (Rational(g.distance(x, pi[x])) > C) {
      rep.verdict = false;
      rep.witness = MorseWitness{k, k, std::nullopt, x, std::nullopt};
      rep.note = "a point of gamma is moved more than C by the projection";
      return rep;
    }
  }
  auto ball_of = [&](Vertex v) { return Ball{pi[v], C}; };
  auto fail = [&](Vertex x, Vertex y, Vertex centre) {
    rep.verdict = false;
    auto path = ps.leg_path_avoiding(x, y, Ball{centre, C});
    MorseWitness w;
    if (path) w.line = PolygonalLine{{*path}};
    w.point = centre;
    w.pair = std::make_pair(x, y);
    rep.witness = w;
  };

  const bool undirected = ps.config().undirected;
  if (V <= opt.exhaustive_limit) {
    std::vector<DistanceRow> rows(V);
    for (Vertex u = 0; u < V; ++u) rows[u] = ps.leg_row(u, ball_of(u));
    for (Vertex x = 0; x < V; ++x) {
      const auto& dpx = g.distances_from(pi[x]);
      for (Vertex y = 0; y < V; ++y) {
        if (Rational(dpx[pi[y]]) < C) continue;
        if (rows[x][y] != kUnreachable) {
          fail(x, y, pi[x]);
          return rep;
        }
        bool avoids_y = undirected ? rows[y][x] != kUnreachable
                                   : ps.min_leg_avoiding(x, y, ball_of(y)).length.has_value();
        if (avoids_y) {
          fail(x, y, pi[y]);
          return rep;
        }
      }
    }
    return rep;
  }
  rep.exhaustive = false;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<Vertex> pick(0, V - 1);
  for (std::int64_t s = 0; s < opt.samples; ++s) {
    const Vertex x = pick(rng), y = pick(rng);
    if (Rational(g.distance(pi[x], pi[y])) < C) continue;
    if (ps.min_leg_avoiding(x, y, ball_of(x)).length) {
      fail(x, y, pi[x]);
      return rep;
    }
    if (ps.min_leg_avoiding(x, y, ball_of(y)).length) {
      fail(x, y, pi[y]);
      return rep;
    }
  }
  record(rep, "pairs_sampled", std::to_string(opt.samples));
  return rep;
}

Dist p_contracting_constant(const EdgePath& gamma, const PathSystem& ps, const ContractingOptions& opt) {
  Dist lo = 0, hi = std::max<Dist>(1, diameter(ps.graph()));
  if (!p_contracting_check(gamma, hi, ps, opt).verdict) {
    throw InternalError("p-contraction fails at the diameter");
  }
  while (lo < hi) {
    Dist mid = (lo + hi) / 2;
    if (p_contracting_check(gamma, mid, ps, opt).verdict) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

Dist strong_contraction_constant(const EdgePath& gamma, const MetricGraph& g) {
  const int V = g.vertex_count();
  std::vector<Vertex> on(gamma.vertices().begin(), gamma.vertices().end());
  std::sort(on.begin(), on.end());
  on.erase(std::unique(on.begin(), on.end()), on.end());
  const int k = static_cast<int>(on.size());
  std::vector<int> slot(V, -1);
  for (int i = 0; i < k; ++i) slot[on[i]] = i;

  const DistanceRow to_gamma = set_distance_map(g, on);
  // proj[v]: bitset over gamma vertices at distance to_gamma[v] from v
  const int words = (k + 63) / 64;
  std::vector<std::uint64_t> proj(static_cast<std::size_t>(V) * words, 0);
  for (int i = 0; i < k; ++i) {
    const auto& row = g.distances_from(on[i]);
    for (Vertex v = 0; v < V; ++v) {
      if (row[v] == to_gamma[v]) proj[static_cast<std::size_t>(v) * words + i / 64] |= 1ull << (i % 64);
    }
  }
  std::vector<std::vector<Dist>> dd(k, std::vector<Dist>(k));
  for (int i = 0; i < k; ++i) {
    const auto& row = g.distances_from(on[i]);
    for (int j = 0; j < k; ++j) dd[i][j] = row[on[j]];
  }

  Dist best = 0;
  std::vector<std::uint64_t> acc(words);
  std::vector<int> members;
  for (Vertex c = 0; c < V; ++c) {
    if (slot[c] >= 0) continue;
    const Dist radius = to_gamma[c] - 1;
    std::fill(acc.begin(), acc.end(), 0);
    auto ball = bfs_restricted(g, c, [](Vertex) { return true; });
    for (Vertex v = 0; v < V; ++v) {
      if (ball[v] == kUnreachable || ball[v] > radius) continue;
      for (int w = 0; w < words; ++w) acc[w] |= proj[static_cast<std::size_t>(v) * words + w];
    }
    members.clear();
    for (int i = 0; i < k; ++i) {
      if (acc[i / 64] >> (i % 64) & 1) members.push_back(i);
    }
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) best = std::max(best, dd[members[a]][members[b]]);
    }
  }
  return best;
}

ProjectionPoints projection_points(const EdgePath& h, const EdgePath& gamma, const Rational& R) {
  const MetricGraph& g = h.host();
  std::vector<Vertex> on(gamma.vertices().begin(), gamma.vertices().end());
  const DistanceRow to_gamma = set_distance_map(g, on);
  ProjectionPoints out;
  bool found = false;
  for (int t = 0; t <= h.length() && !found; ++t) {
    if (Rational(to_gamma[h[t]]) <= R) {
      out.upper = h[t];
      out.upper_index = t;
      found = true;
    }
  }
  if (!found) throw PreconditionError("no vertex of the path lies within R of gamma");
  const auto& row = g.distances_from(out.upper);
  for (int s = 0; s <= gamma.length(); ++s) {
    if (Rational(row[gamma[s]]) <= R) out.lowers.push_back(s);
  }
  return out;
}

bool is_almost_orthogonal(const EdgePath& h, const EdgePath& gamma, const Rational& R,
                          const Rational& C, const PathSystem& ps) {
  if (!gamma.contains(h.back())) throw PreconditionError("path must end on gamma");
  if (C <= 0) throw InputError("C must be positive");
  const MetricGraph& g = ps.graph();
  auto pts = projection_points(h, gamma, R);
  const Rational slack = Rational(g.distance(h.front(), h.back())) / C + 4 * ps.config().D(R + 1);
  const auto& row = g.distances_from(h.back());
  for (int s : pts.lowers) {
    if (Rational(row[gamma[s]]) > slack) return false;
  }
  return true;
}

OrthogonalSearch find_almost_orthogonal(Vertex x, const EdgePath& gamma, const Rational& R,
                                        const Rational& C, const PathSystem& ps) {
  const MetricGraph& g = ps.graph();
  OrthogonalSearch out{EdgePath::trivial(g, x), 0, {}};
  for (int i = 0; i <= gamma.length(); ++i) {
    if (gamma[i] == x) {
      out.target_index = i;
      out.trace.push_back("x lies on gamma at " + std::to_string(i));
      return out;
    }
  }
  const int T = gamma.length();
  std::vector<EdgePath> cand;
  std::vector<char> left(T + 1);
  cand.reserve(T + 1);
  for (int i = 0; i <= T; ++i) {
    cand.push_back(ps.canonical_path(x, gamma[i]));
    auto pts = projection_points(cand.back(), gamma, R);
    // lower projection parameter: the lower point nearest the upper point
    const auto& row = g.distances_from(pts.upper);
    int s = pts.lowers.front();
    for (int l : pts.lowers) {
      if (row[gamma[l]] < row[gamma[s]]) s = l;
    }
    left[i] = s <= i;
    out.trace.push_back("target " + std::to_string(i) + ": lower " + std::to_string(s) +
                        (left[i] ? " left" : " right"));
  }
  std::vector<int> order;
  for (int i = 0; i < T; ++i) {
    if (left[i] != left[i + 1]) order.push_back(left[i] ? i : i + 1);
  }
  if (std::all_of(left.begin(), left.end(), [](char c) { return c; })) order.push_back(0);
  if (std::none_of(left.begin(), left.end(), [](char c) { return c; })) order.push_back(T);
  for (int i = 0; i <= T; ++i) order.push_back(i);
  for (int i : order) {
    if (is_almost_orthogonal(cand[i], gamma, R, C, ps)) {
      out.path = cand[i];
      out.target_index = i;
      out.trace.push_back("accepted target " + std::to_string(i));
      return out;
    }
  }
  std::string trace;
  for (const auto& t : out.trace) trace += t + "; ";
  throw SearchExhaustedError("no almost orthogonal candidate: " + trace);
}

MorseGaugeValue morse_gauge_oracle(const EdgePath& gamma, const Rational& Q, const Rational& q,
                                   const MetricGraph& g) {
  if (Q < 1 || q < 0) throw InputError("need Q >= 1 and q >= 0");
  const int V = g.vertex_count();
  const int T = gamma.length();
  MorseGaugeValue best;
  std::vector<Dist> near(V);
  for (int s = 0; s < T; ++s) {
    const auto& ds = g.distances_from(gamma[s]);
    for (Vertex v = 0; v < V; ++v) near[v] = ds[v];
    for (int t = s + 1; t <= T; ++t) {
      const auto& dt = g.distances_from(gamma[t]);
      for (Vertex v = 0; v < V; ++v) near[v] = std::min(near[v], dt[v]);
      const std::int64_t budget = floor_of(Q * ds[gamma[t]] + q);
      for (Vertex v = 0; v < V; ++v) {
        if (ds[v] + dt[v] <= budget && near[v] > best.value) {
          best.value = near[v];
          best.s = s;
          best.t = t;
          best.far = v;
        }
      }
    }
  }
  return best;
}

}  // namespace coarse
