#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse/line_search.hpp"

namespace coarse {

struct ThinnessParams {
  Rational epsilon{1, 4};
  Rational A{1};
  int n = 3;
  Rational R{0};
  std::optional<Rational> L;  // scale: only windows of length <= L

  void validate() const;
};

struct MorseWitness {
  int i = 0, j = 0;                    // window gamma[i..j]
  std::optional<PolygonalLine> line;   // violating line, or offending special path as one leg
  std::optional<Vertex> point;         // point left uncovered / ball centre
  std::optional<std::pair<Vertex, Vertex>> pair;
};

struct MorseReport {
  bool verdict = true;
  bool exhaustive = true;
  std::optional<MorseWitness> witness;
  std::vector<std::pair<std::string, std::string>> measured;
  std::string note;
};

// Does every line of <= n legs from gamma+ to gamma- with length <= A d(gamma-, gamma+)
// come within epsilon * d of every vertex of gamma?
MorseReport proportionally_thin(const EdgePath& gamma, const ThinnessParams& p, const PathSystem& ps);
// Every window of length >= R (and <= L when set) is proportionally thin.
MorseReport weakly_polygonally_morse(const EdgePath& gamma, const ThinnessParams& p,
                                     const PathSystem& ps);
// Replays a thinness witness against the window gamma[i..j].
bool verify_thinness_witness(const EdgePath& gamma, const ThinnessParams& p, const PathSystem& ps,
                             const MorseWitness& w);

// Closest point on gamma for every vertex, ties to the smallest vertex id.
std::vector<Vertex> closest_point_projection(const MetricGraph& g, const EdgePath& gamma);

struct ContractingOptions {
  std::optional<std::vector<Vertex>> projection;  // supplied map; closest point when empty
  int exhaustive_limit = 400;
  std::int64_t samples = 20000;
  std::uint64_t seed = 1;
};

MorseReport p_contracting_check(const EdgePath& gamma, const Rational& C, const PathSystem& ps,
                                const ContractingOptions& opt = {});
// Minimal integer C for which p_contracting_check passes.
Dist p_contracting_constant(const EdgePath& gamma, const PathSystem& ps,
                            const ContractingOptions& opt = {});

// max over balls B disjoint from gamma of diam(pi_gamma(B)), where pi_gamma(v)
// is the set of all closest points of gamma.
Dist strong_contraction_constant(const EdgePath& gamma, const MetricGraph& g);

struct ProjectionPoints {
  Vertex upper = 0;
  int upper_index = 0;             // position on h
  std::vector<int> lowers;         // positions on gamma
};

ProjectionPoints projection_points(const EdgePath& h, const EdgePath& gamma, const Rational& R);

bool is_almost_orthogonal(const EdgePath& h, const EdgePath& gamma, const Rational& R,
                          const Rational& C, const PathSystem& ps);

struct OrthogonalSearch {
  EdgePath path;
  int target_index = 0;
  std::vector<std::string> trace;
};

// Special path from x onto gamma that is C-almost R-orthogonal, found by a
// left/right leaning scan over targets gamma(i).
OrthogonalSearch find_almost_orthogonal(Vertex x, const EdgePath& gamma, const Rational& R,
                                        const Rational& C, const PathSystem& ps);

struct MorseGaugeValue {
  Dist value = 0;
  int s = 0, t = 0;
  std::optional<Vertex> far;  // vertex realising the value
};

// Max over s < t and over walks between gamma(s), gamma(t) of length
// <= Q d + q of the distance from the walk to gamma[s, t]. Walks include every
// (Q, q)-quasi-geodesic with tamed parametrisation, so this bounds the gauge
// from above.
MorseGaugeValue morse_gauge_oracle(const EdgePath& gamma, const Rational& Q, const Rational& q,
                                   const MetricGraph& g);

}  // namespace coarse
