#pragma once

#include <optional>
#include <vector>

#include "coarse/path_system.hpp"

namespace coarse {

// Leg relation of a path system punctured at a ball: u -> v with cost c iff
// the shortest special path u -> v avoiding the ball has length c. Rows are
// computed on demand and cached when the graph is small enough.
class LegRelation {
 public:
  LegRelation(const PathSystem& ps, const Ball& ball);

  const DistanceRow& row(Vertex u);
  const PathSystem& system() const { return *ps_; }
  const Ball& ball() const { return ball_; }
  bool blocked(Vertex v) const;
  std::int64_t rows_computed() const { return rows_computed_; }

 private:
  const PathSystem* ps_;
  Ball ball_;
  const DistanceRow* to_center_ = nullptr;
  bool cache_rows_;
  std::vector<std::optional<DistanceRow>> cache_;
  DistanceRow scratch_;
  std::int64_t rows_computed_ = 0;
};

// Is there a polygonal line with at most n legs from s to t avoiding the ball?
bool reachable_within(const PathSystem& ps, const Ball& ball, Vertex s, Vertex t, int n);

struct LineSearchResult {
  std::optional<PolygonalLine> line;  // a shortest line, when one exists
  Dist length = kUnreachable;         // its total length
  std::vector<Dist> best_by_legs;     // [k] = min length with at most k legs
};

// Minimum total length over lines with at most n legs from s to t avoiding
// the ball. Legs are the lex-min shortest avoiding special paths.
LineSearchResult shortest_line(const PathSystem& ps, const Ball& ball, Vertex s, Vertex t, int n);

}  // namespace coarse
