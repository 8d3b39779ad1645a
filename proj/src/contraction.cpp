#include "coarse/contraction.hpp"

#include <algorithm>
#include <cmath>

namespace coarse {

Gauge Gauge::affine(Rational slope, Rational intercept) {
  if (slope < 0) throw InputError("gauge slope must be nonnegative");
  Gauge k;
  k.slope_ = slope;
  k.intercept_ = intercept;
  return k;
}

Gauge Gauge::steps(std::vector<Rational> breaks, std::vector<std::optional<Rational>> values,
                   Rational tail_start, Rational slope, Rational intercept) {
  if (breaks.size() != values.size()) throw InputError("gauge breaks and values differ in length");
  if (!breaks.empty() && breaks.front() != 0) throw InputError("first gauge break must be at r = 0");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (breaks[i] <= breaks[i - 1]) throw InputError("gauge breaks must increase");
    const auto& a = values[i - 1];
    const auto& b = values[i];
    if (!a && b) throw InputError("gauge must stay infinite once infinite");
    if (a && b && *b < *a) throw InputError("gauge must be nondecreasing");
  }
  if (!breaks.empty() && tail_start <= breaks.back()) {
    throw InputError("gauge tail must start after the last break");
  }
  if (slope < 0) throw InputError("gauge slope must be nonnegative");
  if (!values.empty() && values.back() && *values.back() > slope * tail_start + intercept) {
    throw InputError("gauge must be nondecreasing into the affine tail");
  }
  Gauge k;
  k.breaks_ = std::move(breaks);
  k.values_ = std::move(values);
  k.tail_start_ = tail_start;
  k.slope_ = slope;
  k.intercept_ = intercept;
  return k;
}

std::optional<Rational> Gauge::operator()(const Rational& r) const {
  if (breaks_.empty() || r >= tail_start_) {
    if (!values_.empty() && !values_.back()) return std::nullopt;
    return slope_ * std::max(r, Rational(0)) + intercept_;
  }
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  std::size_t idx = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return values_[idx];
}

bool Gauge::full() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); });
}

std::string Gauge::describe() const {
  std::string tail = to_string(slope_) + "r+" + to_string(intercept_);
  if (breaks_.empty()) return "K(r)=" + tail;
  std::string out = "K(r)=steps[";
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (i) out += ",";
    out += to_string(breaks_[i]) + ":" + (values_[i] ? to_string(*values_[i]) : "inf");
  }
  return out + "];r>=" + to_string(tail_start_) + ":" + tail;
}

ContractionTriple ContractionTriple::validator_default(PathSystem ps, int n) {
  const Rational c = ps.config().c_p;
  Gauge k = Gauge::affine(3 * c + 6 * c * c, (c + 1) * (c + 1));
  return ContractionTriple{std::move(k), n, std::move(ps)};
}

AllowedReport check_allowed(const ContractionTriple& t) {
  AllowedReport rep;
  auto fail = [&](std::string s) {
    rep.allowed = false;
    rep.failures.push_back(std::move(s));
  };
  if (t.n < 7) fail("n = " + std::to_string(t.n) + " < 7");
  if (!t.K.full()) {
    fail("gauge is not full");
    return rep;
  }
  const Rational c = t.ps.config().c_p;
  struct Bound {
    const char* name;
    Rational slope, icept;
  };
  const Bound bounds[] = {
      {"K(r) > D(1)", Rational(0), 2 * c},
      {"K(r) > 2D(r)", 2 * c, 2 * c},
      {"K(r) > D(3r + D(6r))", 3 * c + 6 * c * c, c * c + c},
  };
  const auto& br = t.K.breaks();
  for (const auto& b : bounds) {
    auto f = [&](const Rational& r) { return b.slope * r + b.icept; };
    bool ok = true;
    for (std::size_t i = 0; i < br.size() && ok; ++i) {
      Rational end = i + 1 < br.size() ? br[i + 1] : t.K.tail_start();
      const Rational& v = *t.K.values()[i];
      ok = b.slope > 0 ? v >= f(end) : v > f(end);
      if (!ok) fail(std::string(b.name) + " fails on [" + to_string(br[i]) + "," + to_string(end) + ")");
    }
    if (!ok) continue;
    const Rational start = br.empty() ? Rational(0) : t.K.tail_start();
    if (t.K.slope() < b.slope || !(t.K.slope() * start + t.K.intercept() > f(start))) {
      fail(std::string(b.name) + " fails for large r (" + t.K.describe() + ")");
    }
  }
  return rep;
}

namespace {

bool line_systems_always_connect(SystemKind k) {
  return k != SystemKind::kStoredSet && k != SystemKind::kPushForward;
}

}  // namespace

MidthinOracle::MidthinOracle(const ContractionTriple& t, std::size_t cache_bytes)
    : triple_(&t), cache_bytes_(cache_bytes) {
  if (t.n < 1) throw InputError("line leg bound must be positive");
}

int MidthinOracle::rho_for(int length) const {
  int best = -1;
  for (int r = 0; r <= length / 2; ++r) {
    auto k = triple_->K(Rational(r));
    if (!k || *k > length) break;
    best = r;
  }
  return best;
}

const std::vector<int>& MidthinOracle::components(Vertex m, Dist cut) {
  const std::uint64_t key = (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint32_t>(cut);
  auto it = components_.find(key);
  if (it != components_.end()) return it->second;
  const MetricGraph& g = triple_->ps.graph();
  const std::size_t bytes = sizeof(int) * g.vertex_count() + 64;
  if (cache_used_ + bytes > cache_bytes_) {
    components_.clear();
    cache_used_ = 0;
  }
  const auto& to_m = g.distances_from(m);
  auto labels = component_labels(g, [&](Vertex w) { return to_m[w] > cut; });
  cache_used_ += bytes;
  return components_.emplace(key, std::move(labels)).first->second;
}

bool MidthinOracle::line_with_clearance(Vertex a, Vertex b, Vertex m, Dist c) {
  ++queries_;
  const PathSystem& ps = triple_->ps;
  const MetricGraph& g = ps.graph();
  if (c <= 0) {
    if (line_systems_always_connect(ps.kind())) return true;
    return reachable_within(ps, Ball::none(), a, b, triple_->n);
  }
  const auto& to_m = g.distances_from(m);
  if (to_m[a] < c || to_m[b] < c) return false;
  const Ball ball{m, Rational(c - 1)};
  if (ps.min_leg_avoiding(a, b, ball).length) return true;
  if (triple_->n == 1) return false;
  const auto& comp = components(m, c - 1);
  if (comp[a] != comp[b]) return false;
  return reachable_within(ps, ball, a, b, triple_->n);
}

Rational MidthinOracle::neck_radius(const EdgePath& h) {
  const MetricGraph& g = triple_->ps.graph();
  const Vertex a = h.back(), b = h.front(), m = h.midpoint();
  Dist hi = std::min(g.distance(a, m), g.distance(b, m));
  if (!line_with_clearance(a, b, m, 0)) return Rational(0);
  Dist lo = 0;
  while (lo < hi) {
    Dist mid = (lo + hi + 1) / 2;
    if (line_with_clearance(a, b, m, mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return Rational(lo);
}

MidthinVerdict MidthinOracle::is_midthin(const EdgePath& h, bool want_neck) {
  MidthinVerdict v;
  v.rho = rho_for(h.length());
  if (v.rho >= 0) v.midthin = !line_with_clearance(h.back(), h.front(), h.midpoint(), v.rho + 1);
  if (want_neck) v.neck = neck_radius(h);
  return v;
}

bool MidthinOracle::window_midthin(const EdgePath& h, int i, int j) {
  const int len = j - i;
  if (rho_for(len) < 0) return false;
  const Vertex lo = h[i], hi = h[j], m = h[i + len / 2];
  const bool keyed = triple_->ps.graph().vertex_count() <= (1 << 17) && len < (1 << 13);
  std::uint64_t key = 0;
  if (keyed) {
    key = (static_cast<std::uint64_t>(lo) << 47) | (static_cast<std::uint64_t>(hi) << 30) |
          (static_cast<std::uint64_t>(m) << 13) | static_cast<std::uint64_t>(len);
    auto it = windows_.find(key);
    if (it != windows_.end()) return it->second;
  }
  const bool verdict = !line_with_clearance(hi, lo, m, rho_for(len) + 1);
  if (keyed) windows_.emplace(key, verdict);
  return verdict;
}

AntiVerdict MidthinOracle::is_anti_contracting(const EdgePath& h) {
  AntiVerdict out;
  for (int len = 1; len <= h.length(); ++len) {
    if (rho_for(len) < 0) continue;
    for (int i = 0; i + len <= h.length(); ++i) {
      if (window_midthin(h, i, i + len)) {
        out.anti_contracting = false;
        out.witness = std::make_pair(i, i + len);
        out.witness_neck = neck_radius(h.slice(i, i + len));
        return out;
      }
    }
  }
  return out;
}

Rational neck_radius(const EdgePath& h, int n, const PathSystem& ps) {
  if (!ps.contains(h)) throw PreconditionError("path is not a special path of the system");
  ContractionTriple t{Gauge::affine(0, 0), n, ps};
  MidthinOracle oracle(t);
  return oracle.neck_radius(h);
}

MidthinVerdict is_midthin(const EdgePath& h, const ContractionTriple& t) {
  if (!t.ps.contains(h)) throw PreconditionError("path is not a special path of the system");
  MidthinOracle oracle(t);
  return oracle.is_midthin(h, true);
}

AntiVerdict is_anti_contracting(const EdgePath& h, const ContractionTriple& t) {
  if (!t.ps.contains(h)) throw PreconditionError("path is not a special path of the system");
  MidthinOracle oracle(t);
  return oracle.is_anti_contracting(h);
}

namespace {

bool is_geodesic_kind(SystemKind k) {
  return k == SystemKind::kAllGeodesics || k == SystemKind::kTreeGeodesics ||
         k == SystemKind::kMedianMonotone;
}

// True when some window of p ending at its last vertex is midthin.
bool tail_window_midthin(MidthinOracle& oracle, const EdgePath& p) {
  const int last = p.length();
  for (int i = 0; i < last; ++i) {
    if (oracle.window_midthin(p, i, last)) return true;
  }
  return false;
}

}  // namespace

ContractionSpace build_contraction_space(const ContractionTriple& t, const BuildOptions& opt) {
  const PathSystem& ps = t.ps;
  const MetricGraph& g = ps.graph();
  const int V = g.vertex_count();
  MidthinOracle oracle(t);
  ContractionSpace space{ps.graph_ptr(), t, {}, nullptr, true, 0, {}};
  std::vector<std::uint64_t> pairs;
  auto add_pair = [&](Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    pairs.push_back((static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v));
  };
  auto cap_hit = [&](const std::string& what) {
    if (opt.scope == PairScope::kExhaustive) {
      throw EnumerationCapError(what + " exceeded the enumeration cap of " +
                                std::to_string(opt.node_cap_per_target) +
                                " in exhaustive scope");
    }
    space.complete = false;
  };

  if (is_geodesic_kind(ps.kind())) {
    std::vector<Vertex> parent(V), queue;
    std::vector<char> resolved(V), dropped(V);
    std::vector<Vertex> chain;
    for (Vertex x = 0; x < V; ++x) {
      const auto& dx = g.distances_from(x);
      std::fill(resolved.begin(), resolved.end(), 0);
      std::fill(dropped.begin(), dropped.end(), 0);
      bool any_dropped = false;
      queue.assign(1, x);
      parent[x] = -1;
      resolved[x] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex v = queue[head];
        chain.clear();
        for (Vertex u = v; u != -1; u = parent[u]) chain.push_back(u);
        std::reverse(chain.begin(), chain.end());
        chain.push_back(-1);
        for (Vertex w : g.neighbors(v)) {
          if (dx[w] != dx[v] + 1) continue;
          chain.back() = w;
          EdgePath p = EdgePath::unchecked(g, chain);
          if (tail_window_midthin(oracle, p)) continue;
          if (resolved[w]) {
            dropped[w] = 1;
            any_dropped = true;
            continue;
          }
          resolved[w] = 1;
          parent[w] = v;
          queue.push_back(w);
        }
      }
      for (Vertex w : queue) {
        if (dx[w] >= 2) add_pair(x, w);
      }
      if (!any_dropped) continue;

      for (Vertex target = 0; target < V; ++target) {
        if (resolved[target]) continue;
        const auto& dt = g.distances_from(target);
        bool downstream = false;
        for (Vertex v = 0; v < V && !downstream; ++v) {
          downstream = dropped[v] && dx[v] + dt[v] == dx[target];
        }
        if (!downstream) continue;
        // Depth-first over geodesics x -> target, pruning at midthin windows.
        std::int64_t nodes = 0;
        bool found = false, capped = false;
        std::vector<Vertex> path{x};
        std::vector<std::size_t> next_idx{0};
        while (!path.empty() && !found && !capped) {
          const Vertex cur = path.back();
          if (cur == target) {
            found = true;
            break;
          }
          auto nb = g.neighbors(cur);
          std::size_t& k = next_idx.back();
          while (k < nb.size() && dt[nb[k]] != dt[cur] - 1) ++k;
          if (k == nb.size()) {
            path.pop_back();
            next_idx.pop_back();
            continue;
          }
          const Vertex w = nb[k++];
          if (++nodes > opt.node_cap_per_target) {
            capped = true;
            break;
          }
          path.push_back(w);
          if (tail_window_midthin(oracle, EdgePath::unchecked(g, path))) {
            path.pop_back();
            continue;
          }
          next_idx.push_back(0);
        }
        if (capped) {
          cap_hit("geodesic search " + std::to_string(x) + " -> " + std::to_string(target));
        } else if (found) {
          add_pair(x, target);
        }
      }
    }
  } else {
    const int cap = static_cast<int>(std::min<std::int64_t>(opt.node_cap_per_target, 1 << 30));
    for (Vertex x = 0; x < V; ++x) {
      const auto& dx = g.distances_from(x);
      for (Vertex y = 0; y < V; ++y) {
        if (dx[y] < 2) continue;
        auto sp = ps.special_paths(x, y, cap);
        if (!sp.complete) cap_hit("special path enumeration " + std::to_string(x) + " -> " + std::to_string(y));
        for (const auto& p : sp.paths) {
          if (oracle.is_anti_contracting(p).anti_contracting) {
            add_pair(x, y);
            break;
          }
        }
      }
    }
  }

  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  auto edges = g.edge_list();
  space.extra_edges.reserve(pairs.size());
  for (auto key : pairs) {
    Vertex u = static_cast<Vertex>(key >> 32), v = static_cast<Vertex>(key & 0xffffffffu);
    space.extra_edges.emplace_back(u, v);
    edges.emplace_back(u, v);
  }
  space.hat = std::make_shared<const MetricGraph>(MetricGraph::from_edges(V, edges, g.labels()));
  space.diameter = diameter(*space.hat);
  if (opt.measure_delta) space.delta_hat = four_point_delta(*space.hat, opt.delta_spec);
  return space;
}

QuasiGeodesicFit image_quasi_geodesic_constant(const EdgePath& h, const ContractionSpace& space) {
  QuasiGeodesicFit fit;
  for (int s = 0; s < h.size(); ++s) {
    const auto& row = space.hat->distances_from(h[s]);
    for (int t = s + 1; t < h.size(); ++t) {
      const double L = t - s;
      const double D = row[h[t]];
      const double upper = D / (L + 1.0);
      const double lower = (-D + std::sqrt(D * D + 4.0 * L)) / 2.0;
      const double q = std::max(upper, lower);
      if (q > fit.Q) {
        fit.Q = q;
        fit.s = s;
        fit.t = t;
      }
    }
  }
  return fit;
}

bool image_is_quasi_geodesic(const EdgePath& h, const ContractionSpace& space, const Rational& Q) {
  if (Q < 1) return false;
  for (int s = 0; s < h.size(); ++s) {
    const auto& row = space.hat->distances_from(h[s]);
    for (int t = s + 1; t < h.size(); ++t) {
      const Rational L(t - s);
      const Rational D(row[h[t]]);
      if (D > Q * L + Q || L / Q - Q > D) return false;
    }
  }
  return true;
}

Rational weak_dichotomy_bound(const Rational& delta, const Rational& rho) {
  if (delta < 0 || rho < 0) throw InputError("weak dichotomy bound needs nonnegative arguments");
  return 4 * delta + 4 * rho + 3;
}

}  // namespace coarse
