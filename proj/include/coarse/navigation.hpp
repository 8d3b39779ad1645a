#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coarse/line_search.hpp"

namespace coarse {

struct NavigabilityInstance {
  Vertex m = 0;
  Rational R{0};
  PolygonalLine alpha;

  // d(alpha, m) >= R and both endpoints within 2R of m; throws InputError.
  void validate(const MetricGraph& g) const;
  int n() const { return alpha.leg_count(); }
};

struct NavigationResult {
  std::optional<PolygonalLine> line;
  Dist length = kUnreachable;
  Ball ball;                        // B(m, R/C)
  int hop_limit = 0;                // k n
  Rational length_bound{0};         // C n R
  std::vector<Dist> best_by_legs;   // infeasibility certificate when line is empty
  bool below_scale = false;         // R < C
  std::string reason;
};

NavigationResult navigate_search(const NavigabilityInstance& inst, const Rational& C, int k,
                                 const PathSystem& ps);

struct LineCheck {
  bool ok = true;
  std::vector<std::string> failures;
};

// Checks a candidate answer for the instance from scratch: legs are special
// paths of the closure, consecutive, with alpha's endpoints, at most max_legs
// of them, total length <= C n R, and every vertex at distance > R/C from m.
LineCheck verify_navigation(const PolygonalLine& line, const NavigabilityInstance& inst,
                            const Rational& C, int max_legs, const PathSystem& ps);

// Three-leg detour from z1 to z2 around B(m, R) in a median graph, following
// geodesics h_i from z_i to y that stay R away from m. Missing h_i are chosen
// as the lex-min geodesics outside the open R-ball.
PolygonalLine median_avoid(Vertex z1, Vertex z2, Vertex y, Vertex m, const Rational& R,
                           const MetricGraph& g, std::optional<EdgePath> h1 = std::nullopt,
                           std::optional<EdgePath> h2 = std::nullopt);

// Geometry with a geodesic combing: Point, dist(a, b), line(a, b) -> vertices
// of the combing line from a to b.
template <class P>
struct CombingGeometry {
  using Point = P;
  std::function<Dist(const P&, const P&)> dist;
  std::function<std::vector<P>(const P&, const P&)> line;
};

template <class P>
struct CombingDetour {
  std::vector<std::vector<P>> legs;
  bool short_case = false;
  Dist length() const {
    Dist total = 0;
    for (const auto& l : legs) total += static_cast<Dist>(l.size()) - 1;
    return total;
  }
};

// Five-leg detour around B(m, R) built from the combing lines z_i -> y.
template <class P>
CombingDetour<P> combing_avoid(const P& z1, const P& z2, const P& y, const P& m,
                               const Rational& R, const Rational& kappa0,
                               const CombingGeometry<P>& geo);

// Graph-backed form: the combing is the system's canonical path.
PolygonalLine combing_avoid(Vertex z1, Vertex z2, Vertex y, Vertex m, const Rational& R,
                            const PathSystem& combing, const Rational& kappa0);

// Reduced words in the free group on a, b (inverses A, B) with the tree
// combing. The identity is the empty word.
CombingGeometry<std::string> free_group_geometry();
std::string reduce_word(const std::string& w);
std::string multiply_words(const std::string& u, const std::string& v);

struct SlideOptions {
  Rational C{28};   // avoid-subroutine constant; output avoids B(m, R/C)
  int k = 3;        // legs per avoidance detour
  bool allow_escalation = true;
};

struct SlideResult {
  PolygonalLine line;
  int central_slides = 0;
  int side_slides = 0;
  bool escalated = false;
  Rational measured_C{0};  // ||line|| / (n R)
  std::vector<std::string> log;
};

// Slides each leg of alpha until it splits into two special paths touching
// the annulus R - kappa0 < d(., m) <= R, then joins the 2n calibrated points
// with avoidance detours.
SlideResult slides_navigate(const NavigabilityInstance& inst, const PathSystem& ps,
                            const SlideOptions& opt = {});

struct DivergenceValue {
  std::optional<Dist> length;  // nullopt: infinite
  Rational threshold{0};
};

// Shortest a -> b path among vertices at distance >= delta d(c, {a, b}) - epsilon from c.
DivergenceValue divergence_point(Vertex a, Vertex b, Vertex c, const Rational& delta,
                                 const Rational& epsilon, const MetricGraph& g);

struct DivergenceEntry {
  int n = 0;
  Rational delta{1, 2};
  Rational epsilon{0};
  std::optional<Dist> value;   // nullopt: infinite
};

struct DivergenceProfile {
  std::vector<DivergenceEntry> entries;
  bool exhaustive = true;        // false: values are sampled lower bounds
  std::int64_t triples = 0;
  std::optional<Rational> linear_coefficient;  // sup value / n; empty when infinite
  bool linear = false;
  std::string note;
};

struct DivergenceOptions {
  SamplingSpec sampling;
  Rational linear_bound{8};
  // Triples drawn from these vertices only; all vertices when empty.
  std::vector<Vertex> region;
};

DivergenceProfile divergence_profile(const MetricGraph& g, const std::vector<int>& n_values,
                                     const Rational& delta, const Rational& epsilon,
                                     const DivergenceOptions& opt = {});

// Rows (family, instance_size, n, delta, epsilon, value, is_lower_bound);
// infinite values are written as "inf".
std::string divergence_csv(const std::string& family, int instance_size,
                           const DivergenceProfile& p, bool header = true);

// ---------------------------------------------------------------------------

template <class P>
CombingDetour<P> combing_avoid(const P& z1, const P& z2, const P& y, const P& m,
                               const Rational& R, const Rational& kappa0,
                               const CombingGeometry<P>& geo) {
  if (kappa0 < 0) throw InputError("kappa0 must be nonnegative");
  if (R < 50 * (kappa0 + 1)) {
    throw PreconditionError("combing avoidance needs R >= 50(kappa0 + 1), got R = " + to_string(R));
  }
  const Rational C = 100 * (kappa0 + 1);
  for (const P* z : {&z1, &z2}) {
    if (geo.dist(*z, m) > 4 * R) throw PreconditionError("d(m, z_i) exceeds 4R");
  }
  const auto h1 = geo.line(z1, y);
  const auto h2 = geo.line(z2, y);
  auto clearance = [&](const std::vector<P>& path) {
    Dist best = std::numeric_limits<Dist>::max();
    for (const auto& p : path) best = std::min(best, geo.dist(p, m));
    return best;
  };
  if (clearance(h1) < R || clearance(h2) < R) {
    throw PreconditionError("a combing line z_i -> y enters the open R-ball around m");
  }
  auto reversed = [](std::vector<P> v) {
    std::reverse(v.begin(), v.end());
    return v;
  };
  auto slice = [](const std::vector<P>& v, std::size_t i, std::size_t j) {
    return std::vector<P>(v.begin() + i, v.begin() + j + 1);
  };

  CombingDetour<P> out;
  const Rational short_scale = (20 * kappa0 + 5) * R;
  if (geo.dist(y, z1) <= short_scale || geo.dist(y, z2) <= short_scale) {
    out.short_case = true;
    out.legs = {h1, reversed(h2)};
  } else {
    const auto step_x = static_cast<std::size_t>(ceil_of(5 * R));
    const auto step_u = static_cast<std::size_t>(ceil_of(20 * kappa0 * R));
    const auto a1 = geo.line(y, h1[step_x]);
    const auto a2 = geo.line(y, h2[step_x]);
    const std::size_t i1 = a1.size() - 1 - std::min(step_u, a1.size() - 1);
    const std::size_t i2 = a2.size() - 1 - std::min(step_u, a2.size() - 1);
    out.legs = {slice(h1, 0, step_x), reversed(slice(a1, i1, a1.size() - 1)),
                geo.line(a1[i1], a2[i2]), slice(a2, i2, a2.size() - 1),
                reversed(slice(h2, 0, step_x))};
  }
  if (out.legs.front().front() != z1 || out.legs.back().back() != z2) {
    throw InternalError("combing detour has wrong endpoints");
  }
  for (std::size_t i = 1; i < out.legs.size(); ++i) {
    if (out.legs[i - 1].back() != out.legs[i].front()) throw InternalError("combing detour is not joined");
  }
  if (out.length() > C * R) {
    throw InternalError("combing detour has length " + std::to_string(out.length()) + " > " +
                        to_string(C * R));
  }
  for (const auto& leg : out.legs) {
    if (clearance(leg) < R) throw InternalError("combing detour enters the open R-ball around m");
  }
  return out;
}

}  // namespace coarse
