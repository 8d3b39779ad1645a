#include "coarse/navigation.hpp"

#include <map>
#include <random>
#include <sstream>

namespace coarse {

namespace {

Dist path_clearance(const DistanceRow& to_m, const EdgePath& p) {
  Dist best = std::numeric_limits<Dist>::max();
  for (Vertex v : p.vertices()) best = std::min(best, to_m[v]);
  return best;
}

std::string describe(const EdgePath& p) {
  std::ostringstream os;
  os << p.front() << "->" << p.back() << " (" << p.length() << ")";
  return os.str();
}

// Lex-min geodesic from z to y through vertices at distance >= R from m, if any.
std::optional<EdgePath> geodesic_outside(const MetricGraph& g, Vertex z, Vertex y, Vertex m,
                                         const Rational& R) {
  const auto& to_m = g.distances_from(m);
  auto allowed = [&](Vertex w) { return to_m[w] >= R; };
  if (!allowed(z) || !allowed(y)) return std::nullopt;
  DistanceRow back = bfs_restricted(g, y, allowed);
  if (back[z] != g.distance(z, y)) return std::nullopt;
  std::vector<Vertex> vs{z};
  Vertex cur = z;
  while (cur != y) {
    for (Vertex w : g.neighbors(cur)) {
      if (back[w] != kUnreachable && back[w] == back[cur] - 1) {
        cur = w;
        break;
      }
    }
    vs.push_back(cur);
  }
  return EdgePath::unchecked(g, std::move(vs));
}

}  // namespace

void NavigabilityInstance::validate(const MetricGraph& g) const {
  if (R < 0) throw InputError("navigability radius must be nonnegative");
  if (!g.contains(m)) throw InputError("invalid centre " + std::to_string(m));
  if (alpha.legs.empty()) throw InputError("navigability instance needs at least one leg");
  alpha.check_joined();
  const auto& to_m = g.distances_from(m);
  const Dist clear = alpha.clearance(g, m);
  if (clear < R) {
    throw InputError("alpha comes within " + std::to_string(clear) + " < R = " + to_string(R) +
                     " of m");
  }
  if (to_m[alpha.front()] > 2 * R || to_m[alpha.back()] > 2 * R) {
    throw InputError("alpha has an endpoint farther than 2R = " + to_string(2 * R) + " from m");
  }
}

NavigationResult navigate_search(const NavigabilityInstance& inst, const Rational& C, int k,
                                 const PathSystem& ps) {
  const MetricGraph& g = ps.graph();
  inst.validate(g);
  if (C < 1) throw InputError("navigability constant must be >= 1");
  if (k < 1) throw InputError("navigability leg factor must be >= 1");
  for (const auto& leg : inst.alpha.legs) {
    if (!ps.contains(leg)) throw InputError("alpha leg " + describe(leg) + " is not a special path");
  }
  NavigationResult res;
  res.ball = Ball{inst.m, inst.R / C};
  res.hop_limit = k * inst.n();
  res.length_bound = C * inst.n() * inst.R;
  res.below_scale = inst.R < C;
  auto found = shortest_line(ps, res.ball, inst.alpha.front(), inst.alpha.back(), res.hop_limit);
  res.best_by_legs = found.best_by_legs;
  if (!found.line) {
    res.reason = "no line with at most " + std::to_string(res.hop_limit) + " legs avoids the ball";
    return res;
  }
  if (found.length > res.length_bound) {
    res.reason = "shortest avoiding line has length " + std::to_string(found.length) + " > " +
                 to_string(res.length_bound);
    return res;
  }
  res.length = found.length;
  res.line = std::move(found.line);
  return res;
}

LineCheck verify_navigation(const PolygonalLine& line, const NavigabilityInstance& inst,
                            const Rational& C, int max_legs, const PathSystem& ps) {
  const MetricGraph& g = ps.graph();
  LineCheck out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.failures.push_back(std::move(msg));
  };
  if (line.legs.empty()) {
    fail("empty line");
    return out;
  }
  if (line.leg_count() > max_legs) {
    fail(std::to_string(line.leg_count()) + " legs > " + std::to_string(max_legs));
  }
  for (int i = 0; i < line.leg_count(); ++i) {
    const auto& leg = line.legs[i];
    if (leg.empty()) {
      fail("leg " + std::to_string(i) + " is empty");
      return out;
    }
    for (int j = 1; j < leg.size(); ++j) {
      if (!g.adjacent(leg[j - 1], leg[j])) fail("leg " + std::to_string(i) + " is not an edge path");
    }
    if (!ps.contains(leg)) fail("leg " + std::to_string(i) + " " + describe(leg) + " is not special");
    if (i > 0 && line.legs[i - 1].back() != leg.front()) {
      fail("legs " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not joined");
    }
  }
  if (line.front() != inst.alpha.front() || line.back() != inst.alpha.back()) {
    fail("endpoints differ from alpha's");
  }
  Dist total = 0;
  for (const auto& leg : line.legs) total += leg.length();
  const Rational bound = C * inst.n() * inst.R;
  if (total > bound) fail("length " + std::to_string(total) + " > " + to_string(bound));
  DistanceRow to_m = distance_map(g, inst.m);
  const Rational radius = inst.R / C;
  for (const auto& leg : line.legs) {
    for (Vertex v : leg.vertices()) {
      if (to_m[v] <= radius) {
        fail("vertex " + std::to_string(v) + " at distance " + std::to_string(to_m[v]) +
             " <= " + to_string(radius) + " from m");
        return out;
      }
    }
  }
  return out;
}

PolygonalLine median_avoid(Vertex z1, Vertex z2, Vertex y, Vertex m, const Rational& R,
                           const MetricGraph& g, std::optional<EdgePath> h1,
                           std::optional<EdgePath> h2) {
  for (Vertex v : {z1, z2, y, m}) {
    if (!g.contains(v)) throw InputError("invalid vertex " + std::to_string(v));
  }
  if (R < 14) throw PreconditionError("median avoidance needs R >= 14, got " + to_string(R));
  const auto& to_m = g.distances_from(m);
  auto prepare = [&](std::optional<EdgePath>& h, Vertex z, int i) {
    if (to_m[z] > 4 * R) {
      throw PreconditionError("d(m, z" + std::to_string(i) + ") = " + std::to_string(to_m[z]) +
                              " exceeds 4R");
    }
    if (!h) {
      h = geodesic_outside(g, z, y, m, R);
      if (!h) {
        throw PreconditionError("no geodesic from z" + std::to_string(i) + " to y stays R away from m");
      }
    }
    if (h->front() != z || h->back() != y) throw PreconditionError("h" + std::to_string(i) + " has wrong endpoints");
    if (!is_geodesic(*h)) throw PreconditionError("h" + std::to_string(i) + " is not a geodesic");
    if (path_clearance(to_m, *h) < R) {
      throw PreconditionError("h" + std::to_string(i) + " enters the open R-ball around m");
    }
  };
  prepare(h1, z1, 1);
  prepare(h2, z2, 2);

  PolygonalLine out;
  if (h1->length() <= 5 * R || h2->length() <= 5 * R) {
    out.legs = {*h1, h2->inverse()};
  } else {
    const int step = static_cast<int>(ceil_of(5 * R));
    const Vertex x1 = (*h1)[step], x2 = (*h2)[step];
    const Vertex u = median(g, x1, x2, y);
    EdgePath gamma = concat(lex_min_geodesic(g, x1, u), lex_min_geodesic(g, u, x2));
    if (gamma.length() != g.distance(x1, x2)) {
      throw InternalError("path through the median is not a geodesic");
    }
    out.legs = {h1->slice(0, step), std::move(gamma), h2->slice(0, step).inverse()};
  }
  if (out.length() > 28 * R) {
    throw InternalError("median detour has length " + std::to_string(out.length()) + " > 28R");
  }
  if (out.clearance(g, m) < R) throw InternalError("median detour enters the open R-ball around m");
  return out;
}

PolygonalLine combing_avoid(Vertex z1, Vertex z2, Vertex y, Vertex m, const Rational& R,
                            const PathSystem& combing, const Rational& kappa0) {
  const MetricGraph& g = combing.graph();
  for (Vertex v : {z1, z2, y, m}) {
    if (!g.contains(v)) throw InputError("invalid vertex " + std::to_string(v));
  }
  switch (combing.kind()) {
    case SystemKind::kTreeGeodesics:
    case SystemKind::kAllGeodesics:
    case SystemKind::kMedianMonotone:
    case SystemKind::kStaircaseCombingZ2: break;
    default: throw CapabilityError("combing avoidance needs a geodesic combing");
  }
  CombingGeometry<Vertex> geo;
  geo.dist = [&g](Vertex a, Vertex b) { return g.distance(a, b); };
  geo.line = [&combing](Vertex a, Vertex b) {
    EdgePath p = combing.kind() == SystemKind::kStaircaseCombingZ2 ? combing.combing_line(a, b)
                                                                   : combing.canonical_path(a, b);
    return p.vertices();
  };
  auto detour = combing_avoid<Vertex>(z1, z2, y, m, R, kappa0, geo);
  PolygonalLine out;
  for (auto& leg : detour.legs) out.legs.emplace_back(g, std::move(leg));
  return out;
}

std::string reduce_word(const std::string& w) {
  auto inverse = [](char c) {
    switch (c) {
      case 'a': return 'A';
      case 'A': return 'a';
      case 'b': return 'B';
      case 'B': return 'b';
    }
    throw InputError(std::string("letter '") + c + "' is not in {a, A, b, B}");
  };
  std::string out;
  for (char c : w) {
    char inv = inverse(c);
    if (!out.empty() && out.back() == inv) {
      out.pop_back();
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string multiply_words(const std::string& u, const std::string& v) { return reduce_word(u + v); }

CombingGeometry<std::string> free_group_geometry() {
  auto common = [](const std::string& u, const std::string& v) {
    std::size_t i = 0;
    while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
    return i;
  };
  CombingGeometry<std::string> geo;
  geo.dist = [common](const std::string& u, const std::string& v) {
    return static_cast<Dist>(u.size() + v.size() - 2 * common(u, v));
  };
  geo.line = [common](const std::string& u, const std::string& v) {
    const std::size_t c = common(u, v);
    std::vector<std::string> out;
    for (std::size_t len = u.size(); len > c; --len) out.push_back(u.substr(0, len));
    for (std::size_t len = c; len <= v.size(); ++len) out.push_back(v.substr(0, len));
    return out;
  };
  return geo;
}

SlideResult slides_navigate(const NavigabilityInstance& inst, const PathSystem& ps,
                            const SlideOptions& opt) {
  const MetricGraph& g = ps.graph();
  inst.validate(g);
  if (!ps.supports_bounded_replacement()) {
    throw CapabilityError("slides need bounded replacement, unavailable for " + kind_name(ps.kind()));
  }
  if (opt.C < 1 || opt.k < 1) throw InputError("slide constants must be positive");
  const Dist kappa = ps.replacement_bound();
  const Rational& R = inst.R;
  const auto& to_m = g.distances_from(inst.m);
  SlideResult res;
  auto log = [&](std::string s) { res.log.push_back(std::move(s)); };
  auto replace_end = [&](const EdgePath& h, Vertex x) { return ps.bounded_replacement(h, x).path; };
  auto replace_start = [&](const EdgePath& h, Vertex x) {
    return ps.bounded_replacement(h.inverse(), x).path.inverse();
  };

  std::vector<EdgePath> pieces;
  for (int i = 0; i < inst.n(); ++i) {
    EdgePath beta = inst.alpha.legs[i];
    EdgePath gamma = EdgePath::trivial(g, beta.back());
    log("leg " + std::to_string(i) + ": " + describe(beta));
    while (path_clearance(to_m, beta) > R && path_clearance(to_m, gamma) > R) {
      const Vertex j = beta.back();
      Vertex x = -1;
      for (Vertex w : g.neighbors(j)) {
        if (to_m[w] == to_m[j] - 1) {
          x = w;
          break;
        }
      }
      if (x < 0 || to_m[x] >= to_m[j]) throw InternalError("central slide cannot approach m");
      beta = replace_end(beta, x);
      gamma = replace_start(gamma, x);
      ++res.central_slides;
      log("  central slide: junction " + std::to_string(j) + " -> " + std::to_string(x) +
          " at distance " + std::to_string(to_m[x]));
    }
    const bool flipped = path_clearance(to_m, beta) > R;
    if (flipped) std::swap(beta, gamma), beta = beta.inverse(), gamma = gamma.inverse();
    while (path_clearance(to_m, gamma) > R) {
      int t = -1;
      for (int s = 0; s < beta.size(); ++s) {
        if (to_m[beta[s]] <= R) t = s;
      }
      int s = t;
      while (g.distance(beta[s], beta.back()) > 1) ++s;
      if (t < 0 || s >= beta.length()) throw InternalError("side slide makes no progress");
      const Vertex x = beta[s];
      beta = beta.slice(0, s);
      gamma = replace_start(gamma, x);
      ++res.side_slides;
      log("  side slide: split moved to " + std::to_string(x));
    }
    if (flipped) std::swap(beta, gamma), beta = beta.inverse(), gamma = gamma.inverse();
    for (const EdgePath* p : {&beta, &gamma}) {
      const Dist c = path_clearance(to_m, *p);
      if (c <= R - kappa || c > R) {
        throw InternalError("slid path " + describe(*p) + " has clearance " + std::to_string(c) +
                            " outside (R - kappa0, R]");
      }
    }
    log("  calibrated: " + describe(beta) + " | " + describe(gamma));
    pieces.push_back(std::move(beta));
    pieces.push_back(std::move(gamma));
  }

  // One calibrated point per piece.
  std::vector<int> mark;
  for (const auto& p : pieces) {
    int idx = -1;
    for (int s = 0; s < p.size() && idx < 0; ++s) {
      if (to_m[p[s]] > R - kappa && to_m[p[s]] <= R) idx = s;
    }
    mark.push_back(idx);
  }

  const Rational R1 = R - kappa;
  const bool median_kind = ps.kind() == SystemKind::kAllGeodesics ||
                           ps.kind() == SystemKind::kMedianMonotone ||
                           ps.kind() == SystemKind::kTreeGeodesics;
  const Ball ball{inst.m, R / opt.C};
  PolygonalLine out;
  auto append = [&](EdgePath leg) {
    if (leg.length() > 0) out.legs.push_back(std::move(leg));
  };
  auto escalate = [&](const std::string& why) {
    log("escalating to navigate_search: " + why);
    auto found = navigate_search(inst, opt.C, 2 * opt.k, ps);
    if (!found.line) throw SearchExhaustedError("slides and navigate_search both failed: " + found.reason);
    res.escalated = true;
    res.line = std::move(*found.line);
  };

  append(pieces.front().slice(0, mark.front()));
  for (std::size_t j = 0; j + 1 < pieces.size(); ++j) {
    const Vertex q1 = pieces[j][mark[j]];
    const Vertex q2 = pieces[j + 1][mark[j + 1]];
    const Vertex y = pieces[j].back();
    std::optional<PolygonalLine> detour;
    std::string how;
    if (median_kind && R1 >= 14) {
      try {
        detour = median_avoid(q1, q2, y, inst.m, R1, g, pieces[j].slice(mark[j], pieces[j].length()),
                              pieces[j + 1].slice(0, mark[j + 1]).inverse());
        how = "median_avoid";
      } catch (const PreconditionError& e) {
        log("  median_avoid rejected: " + std::string(e.what()));
      } catch (const StructuralError& e) {
        log("  median_avoid rejected: " + std::string(e.what()));
      }
    }
    if (!detour) {
      auto found = shortest_line(ps, ball, q1, q2, opt.k);
      if (found.line) {
        detour = std::move(found.line);
        how = "line search";
      }
    }
    if (!detour) {
      if (!opt.allow_escalation) throw SearchExhaustedError("no detour between calibrated points");
      escalate("no detour from " + std::to_string(q1) + " to " + std::to_string(q2));
      break;
    }
    log("  detour " + std::to_string(q1) + " -> " + std::to_string(q2) + " via " + how + ": " +
        std::to_string(detour->length()));
    for (auto& leg : detour->legs) append(std::move(leg));
  }
  if (!res.escalated) {
    append(pieces.back().slice(mark.back(), pieces.back().length()));
    if (out.legs.empty()) out.legs.push_back(EdgePath::trivial(g, inst.alpha.front()));
    res.line = std::move(out);
  }
  if (R > 0) res.measured_C = Rational(res.line.length()) / (inst.n() * R);
  return res;
}

DivergenceValue divergence_point(Vertex a, Vertex b, Vertex c, const Rational& delta,
                                 const Rational& epsilon, const MetricGraph& g) {
  for (Vertex v : {a, b, c}) {
    if (!g.contains(v)) throw InputError("invalid vertex " + std::to_string(v));
  }
  if (a == b) throw InputError("divergence needs distinct endpoints");
  if (delta <= 0 || delta >= 1) throw InputError("delta must lie in (0, 1)");
  if (epsilon < 0) throw InputError("epsilon must be nonnegative");
  const auto& to_c = g.distances_from(c);
  DivergenceValue out;
  out.threshold = delta * std::min(to_c[a], to_c[b]) - epsilon;
  if (out.threshold <= 0) {
    out.length = g.distance(a, b);
    return out;
  }
  // Excluded: d(v, c) < threshold.
  DistanceRow row = punctured_distance_map(g, a, Ball{c, Rational(ceil_of(out.threshold) - 1)});
  if (row[b] != kUnreachable) out.length = row[b];
  return out;
}

DivergenceProfile divergence_profile(const MetricGraph& g, const std::vector<int>& n_values,
                                     const Rational& delta, const Rational& epsilon,
                                     const DivergenceOptions& opt) {
  if (n_values.empty()) throw InputError("divergence profile needs at least one n");
  for (int n : n_values) {
    if (n < 1) throw InputError("divergence scale n must be >= 1");
  }
  if (delta <= 0 || delta >= 1) throw InputError("delta must lie in (0, 1)");
  if (epsilon < 0) throw InputError("epsilon must be nonnegative");
  const int V = g.vertex_count();
  std::vector<Vertex> region = opt.region;
  if (region.empty()) {
    for (Vertex v = 0; v < V; ++v) region.push_back(v);
  }
  std::vector<char> in_region(V, 0);
  for (Vertex v : region) {
    if (!g.contains(v)) throw InputError("invalid region vertex " + std::to_string(v));
    in_region[v] = 1;
  }
  const int nmax = *std::max_element(n_values.begin(), n_values.end());
  const auto& spec = opt.sampling;
  const bool exhaustive = spec.mode == SamplingSpec::Mode::kExhaustive ||
                          (spec.mode == SamplingSpec::Mode::kAuto && V <= spec.exhaustive_limit);

  DivergenceProfile prof;
  prof.exhaustive = exhaustive;
  // worst[d]: largest value over triples with d(a, b) = d; -1 marks infinite.
  std::vector<Dist> worst(nmax + 1, 0);
  auto record = [&](Dist dab, std::optional<Dist> v) {
    if (worst[dab] == -1) return;
    worst[dab] = v ? std::max(worst[dab], *v) : -1;
  };
  auto radius_for = [&](Dist k) -> std::optional<Dist> {
    Rational t = delta * k - epsilon;
    if (t <= 0) return std::nullopt;
    return static_cast<Dist>(ceil_of(t) - 1);
  };

  if (exhaustive) {
    for (Vertex a : region) {
      const auto& from_a = g.distances_from(a);
      for (Vertex c : region) {
        const auto& to_c = g.distances_from(c);
        std::map<Dist, DistanceRow> rows;
        for (Vertex b : region) {
          if (b <= a || from_a[b] > nmax) continue;
          ++prof.triples;
          auto r = radius_for(std::min(to_c[a], to_c[b]));
          if (!r) {
            record(from_a[b], from_a[b]);
            continue;
          }
          auto it = rows.find(*r);
          if (it == rows.end()) {
            it = rows.emplace(*r, punctured_distance_map(g, a, Ball{c, Rational(*r)})).first;
          }
          const Dist v = it->second[b];
          record(from_a[b], v == kUnreachable ? std::nullopt : std::optional<Dist>(v));
        }
      }
    }
  } else {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick(0, region.size() - 1);
    for (std::int64_t s = 0; s < spec.samples; ++s) {
      const Vertex a = region[pick(rng)];
      const auto& from_a = g.distances_from(a);
      std::vector<Vertex> near;
      for (Vertex v : region) {
        if (v != a && from_a[v] <= nmax) near.push_back(v);
      }
      if (near.empty()) continue;
      const Vertex b = near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
      const Vertex c = region[pick(rng)];
      ++prof.triples;
      record(from_a[b], divergence_point(a, b, c, delta, epsilon, g).length);
    }
    prof.note = "sampled: values are lower bounds";
  }
  if (!opt.region.empty()) {
    prof.note += std::string(prof.note.empty() ? "" : "; ") + "triples restricted to " +
                 std::to_string(region.size()) + " region vertices";
  }

  std::optional<Rational> coef = Rational(0);
  std::vector<int> ns = n_values;
  for (int n : ns) {
    DivergenceEntry e;
    e.n = n;
    e.delta = delta;
    e.epsilon = epsilon;
    Dist best = 0;
    bool infinite = false;
    for (int d = 1; d <= std::min(n, nmax); ++d) {
      if (worst[d] == -1) infinite = true;
      else best = std::max(best, worst[d]);
    }
    if (infinite) {
      coef.reset();
    } else {
      e.value = best;
      if (coef) coef = std::max(*coef, Rational(best, n));
    }
    prof.entries.push_back(e);
  }
  prof.linear_coefficient = coef;
  prof.linear = coef && *coef <= opt.linear_bound;
  return prof;
}

std::string divergence_csv(const std::string& family, int instance_size, const DivergenceProfile& p,
                           bool header) {
  std::ostringstream os;
  if (header) os << "family,instance_size,n,delta,epsilon,value,is_lower_bound\n";
  for (const auto& e : p.entries) {
    os << family << ',' << instance_size << ',' << e.n << ',' << to_string(e.delta) << ','
       << to_string(e.epsilon) << ',' << (e.value ? std::to_string(*e.value) : "inf") << ','
       << (p.exhaustive ? "false" : "true") << '\n';
  }
  return os.str();
}

}  // namespace coarse
