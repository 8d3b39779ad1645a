#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coarse/paths.hpp"

namespace coarse {

// D(r) = c_p * r + c_p dominates the system's distance-control quantities.
struct PathSystemConfig {
  Rational lambda0{1};
  Rational kappa0{0};
  Rational c_p{1};
  bool undirected = true;

  Rational D(const Rational& r) const { return c_p * r + c_p; }
};

enum class SystemKind {
  kAllGeodesics,
  kTreeGeodesics,
  kMedianMonotone,
  kStaircaseCombingZ2,
  kStoredSet,
  kPushForward,
};

std::string kind_name(SystemKind k);

struct SpecialPaths {
  std::vector<EdgePath> paths;
  bool complete = true;
};

struct LegResult {
  std::optional<Dist> length;  // nullopt: infeasible
  bool endpoint_in_ball = false;
};

struct Replacement {
  EdgePath path;
  Dist hausdorff = 0;
  Dist bound = 0;
};

struct ValidationReport {
  bool passed = true;
  bool exhaustive = true;
  std::int64_t paths_checked = 0;
  Rational measured_lambda{1};
  std::vector<std::string> failures;
  std::optional<EdgePath> witness;
};

// Provider of special paths. Cheap to copy; the graph and any stored paths
// are shared.
class PathSystem {
 public:
  static PathSystem all_geodesics(GraphPtr g);
  // Requires a tree.
  static PathSystem tree_geodesics(GraphPtr g);
  // All geodesics on a median graph (checked), declared 2-bounded.
  static PathSystem median_monotone(GraphPtr g);
  // Staircase combing on the box [-half, half]^2, vertex id (y+half)*(2half+1) + (x+half).
  static PathSystem staircase_z2(GraphPtr g, int half);
  // Explicit set; closure under subsegments (and inverses when undirected) and
  // trivial paths at every vertex are enforced, failing with the first gap.
  static PathSystem stored(GraphPtr g, std::vector<std::vector<Vertex>> paths,
                           PathSystemConfig config);
  // Paths generate the system: special paths are their subsegments, plus
  // inverses when undirected, plus trivial paths.
  static PathSystem generated(GraphPtr g, std::vector<std::vector<Vertex>> generators,
                              PathSystemConfig config, SystemKind tag = SystemKind::kStoredSet);

  SystemKind kind() const { return kind_; }
  const PathSystemConfig& config() const { return config_; }
  const MetricGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  bool is_stored() const { return stored_ != nullptr; }
  bool is_generated() const;
  const std::vector<std::vector<Vertex>>& stored_paths() const;
  int staircase_half() const { return half_; }

  // Deterministic lex order, at most cap paths.
  SpecialPaths special_paths(Vertex x, Vertex y, int cap) const;
  // Some special path from x to y, deterministic. Throws StructuralError if none.
  EdgePath canonical_path(Vertex x, Vertex y) const;
  bool contains(const EdgePath& p) const;

  LegResult min_leg_avoiding(Vertex x, Vertex y, const Ball& ball) const;
  // Shortest special path x -> y avoiding the ball, lex-min among those.
  std::optional<EdgePath> leg_path_avoiding(Vertex x, Vertex y, const Ball& ball) const;
  // For every v: the minimum length of a special path u -> v avoiding the
  // ball, or kUnreachable.
  DistanceRow leg_row(Vertex u, const Ball& ball) const;

  bool supports_bounded_replacement() const;
  Dist replacement_bound() const;
  // Special path from h^- to y2 (d(h^+, y2) <= 1) within the declared
  // Hausdorff bound of h.
  Replacement bounded_replacement(const EdgePath& h, Vertex y2) const;

  // Staircase combing line eta_ab.
  EdgePath combing_line(Vertex a, Vertex b) const;
  std::pair<int, int> coords(Vertex v) const;
  Vertex at(int x, int y) const;

  struct Stored;

 private:
  struct MedianState;

  PathSystem() = default;
  bool avoids(const std::vector<Vertex>& vs, const DistanceRow* to_center, Dist cut) const;
  std::vector<EdgePath> staircase_candidates(Vertex x, Vertex y) const;
  void require_median() const;

  SystemKind kind_ = SystemKind::kAllGeodesics;
  PathSystemConfig config_;
  GraphPtr graph_;
  int half_ = 0;
  std::shared_ptr<const Stored> stored_;
  std::shared_ptr<MedianState> median_;
};

struct QiCheck {
  bool ok = true;
  bool exhaustive = true;
  std::optional<std::pair<Vertex, Vertex>> witness;  // violating pair
  std::optional<Vertex> uncovered;                   // target vertex far from the image
  std::string message;
};

// f is a C-quasi-isometry with multiplicative constant max(1, C) and additive
// constant C, and its image is C-dense.
QiCheck check_quasi_isometry(const MetricGraph& source, const MetricGraph& target,
                             const std::vector<Vertex>& f, const Rational& C,
                             std::int64_t samples = 20000, std::uint64_t seed = 1);

struct PushForwardOptions {
  int paths_per_pair = 4;             // for enumerated source systems
  std::int64_t max_generators = 2000000;
  std::int64_t qi_samples = 20000;
  std::uint64_t seed = 1;
};

struct PushForwardResult {
  PathSystem system;
  bool source_complete = true;        // every source path was pushed
  std::int64_t generators = 0;
};

// C-push-forward of the source system along f: rectified images with
// geodesic attachments to every target vertex within C of the image endpoints.
PushForwardResult push_forward(const std::vector<Vertex>& f, const Rational& C,
                               const PathSystem& source, GraphPtr target,
                               const PushForwardOptions& opt = {});

// samples <= 0: every pair.
ValidationReport validate_system(const PathSystem& ps, std::int64_t samples = 2000,
                                 std::uint64_t seed = 1);

}  // namespace coarse
