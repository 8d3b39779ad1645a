#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "coarse/line_search.hpp"

namespace coarse {

// Nondecreasing step function with an affine tail:
//   K(r) = values[i]        for breaks[i] <= r < breaks[i+1]  (nullopt = infinity)
//   K(r) = slope*r + icept  for r >= tail_start
class Gauge {
 public:
  static Gauge affine(Rational slope, Rational intercept);
  static Gauge steps(std::vector<Rational> breaks, std::vector<std::optional<Rational>> values,
                     Rational tail_start, Rational slope, Rational intercept);

  std::optional<Rational> operator()(const Rational& r) const;
  bool full() const;
  std::string describe() const;

  const std::vector<Rational>& breaks() const { return breaks_; }
  const std::vector<std::optional<Rational>>& values() const { return values_; }
  const Rational& tail_start() const { return tail_start_; }
  const Rational& slope() const { return slope_; }
  const Rational& intercept() const { return intercept_; }

 private:
  std::vector<Rational> breaks_;
  std::vector<std::optional<Rational>> values_;
  Rational tail_start_{0};
  Rational slope_{0};
  Rational intercept_{0};
};

struct ContractionTriple {
  Gauge K;
  int n = 7;
  PathSystem ps;

  // K(r) = (3c + 6c^2) r + (c + 1)^2 with c = c_p, which dominates the three
  // threshold inequalities below.
  static ContractionTriple validator_default(PathSystem ps, int n = 7);
};

struct AllowedReport {
  bool allowed = true;
  std::vector<std::string> failures;
};

// n >= 7, K full, and for all r >= 0: K(r) > D(1), K(r) > 2 D(r),
// K(r) > D(3r + D(6r)).
AllowedReport check_allowed(const ContractionTriple& t);

struct MidthinVerdict {
  bool midthin = false;
  std::optional<Rational> neck;  // exact neck radius, when computed
  int rho = -1;                  // largest integer r <= |h|/2 with K(r) <= |h|, or -1
};

struct AntiVerdict {
  bool anti_contracting = true;
  std::optional<std::pair<int, int>> witness;  // index window [i, j] that is midthin
  std::optional<Rational> witness_neck;
};

// Midthin / anti-contracting decisions for one triple, with caches shared
// across queries. Not thread-safe.
class MidthinOracle {
 public:
  explicit MidthinOracle(const ContractionTriple& t, std::size_t cache_bytes = 256u << 20);

  const ContractionTriple& triple() const { return *triple_; }

  // Is there a line with at most n legs from a to b all of whose vertices
  // are at distance >= c from m?
  bool line_with_clearance(Vertex a, Vertex b, Vertex m, Dist c);
  // Max clearance from the midpoint over lines h+ -> h-.
  Rational neck_radius(const EdgePath& h);
  MidthinVerdict is_midthin(const EdgePath& h, bool want_neck = false);
  AntiVerdict is_anti_contracting(const EdgePath& h);
  // Is the window h[i..j] midthin? Memoized on (ends, midpoint, length).
  bool window_midthin(const EdgePath& h, int i, int j);

  std::int64_t queries() const { return queries_; }

 private:
  int rho_for(int length) const;
  const std::vector<int>& components(Vertex m, Dist cut);

  const ContractionTriple* triple_;
  std::size_t cache_bytes_;
  std::size_t cache_used_ = 0;
  std::unordered_map<std::uint64_t, std::vector<int>> components_;
  std::unordered_map<std::uint64_t, bool> windows_;
  std::vector<int> rho_;
  std::int64_t queries_ = 0;
};

// Standalone forms.
Rational neck_radius(const EdgePath& h, int n, const PathSystem& ps);
MidthinVerdict is_midthin(const EdgePath& h, const ContractionTriple& t);
AntiVerdict is_anti_contracting(const EdgePath& h, const ContractionTriple& t);

enum class PairScope { kExhaustive, kCapped };

struct ContractionSpace {
  GraphPtr base;
  ContractionTriple triple;
  std::vector<std::pair<Vertex, Vertex>> extra_edges;  // u < v, d(u,v) >= 2
  GraphPtr hat;
  bool complete = true;   // false: capped enumeration may have missed edges
  Dist diameter = 0;
  DeltaEstimate delta_hat;

  Dist dhat(Vertex u, Vertex v) const { return hat->distance(u, v); }
};

struct BuildOptions {
  PairScope scope = PairScope::kExhaustive;
  std::int64_t node_cap_per_target = 200000;
  bool measure_delta = true;
  SamplingSpec delta_spec;
};

ContractionSpace build_contraction_space(const ContractionTriple& t, const BuildOptions& opt = {});

struct QuasiGeodesicFit {
  double Q = 1.0;
  int s = 0, t = 0;  // pair attaining Q
};

// Minimal Q >= 1 with |t-s|/Q - Q <= dhat(h(s),h(t)) <= Q|t-s| + Q for all s, t.
QuasiGeodesicFit image_quasi_geodesic_constant(const EdgePath& h, const ContractionSpace& space);
// Exact check of the same inequalities at a given Q.
bool image_is_quasi_geodesic(const EdgePath& h, const ContractionSpace& space, const Rational& Q);

// 4 delta + 4 rho + 3
Rational weak_dichotomy_bound(const Rational& delta, const Rational& rho);

}  // namespace coarse
