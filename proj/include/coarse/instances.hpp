#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse/path_system.hpp"

namespace coarse {

enum class Family {
  kGridZd,
  kFreeGroupBall,
  kTree,
  kCycle,
  kRacgBall,
  kSurfaceGroupBall,
  kProduct,
  kStaircaseZ2,
};

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct FamilySpec {
  Family family = Family::kGridZd;
  int dim = 2;       // grid_zd
  int size = 5;      // grid_zd side length, cycle length, staircase half-width
  int radius = 3;    // ball radius (free group, tree, RACG, surface group)
  int rank = 2;      // free group rank
  int degree = 3;    // tree degree
  // RACG defining graph on `generators` letters a, b, c, ...; commuting pairs.
  int generators = 4;
  std::vector<std::pair<int, int>> commuting{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  std::vector<FamilySpec> factors;  // product
  std::uint64_t seed = 1;

  static FamilySpec grid(int size, int dim = 2);
  static FamilySpec free_group(int radius, int rank = 2);
  static FamilySpec tree(int degree, int radius);
  static FamilySpec cycle(int n);
  static FamilySpec racg(int radius);
  static FamilySpec surface(int radius);
  static FamilySpec product(FamilySpec a, FamilySpec b);
  static FamilySpec staircase(int half);

  std::string describe() const;
};

struct InstanceMeta {
  std::string name;
  Vertex basepoint = 0;
  std::optional<int> truncation_radius;  // Cayley balls and boxes
  std::optional<int> inner_safe_radius;  // half the truncation radius
  std::vector<Vertex> inner_safe;        // vertices within inner_safe_radius of the basepoint
  std::int64_t word_checks = 0;          // normal-form comparisons made while building
};

struct Instance {
  GraphPtr graph;
  PathSystem system;
  InstanceMeta meta;
};

Instance generate(const FamilySpec& spec);

struct AutomorphismSet {
  std::vector<std::vector<Vertex>> maps;  // verified permutations
  std::vector<std::string> rejected;      // candidates that failed the check
};

AutomorphismSet automorphisms(const FamilySpec& spec, const Instance& inst);

// True iff p is a permutation of the vertices mapping edges to edges.
bool is_graph_automorphism(const MetricGraph& g, const std::vector<Vertex>& p);

// Word problems used by the generators. Letters: free and surface groups use
// a, b, c, d with inverses A, B, C, D; Coxeter generators are involutions.
std::string free_reduce(const std::string& w);
std::string invert_word(const std::string& w);
// Dehn's algorithm for <a, b, c, d | [a, b][c, d]>.
std::string dehn_reduce(const std::string& w);
bool surface_word_is_trivial(const std::string& w);
// Shortlex normal form in the right-angled Coxeter group with the given
// commuting pairs (letters 'a' + i).
std::string racg_normal_form(const std::string& w, int generators,
                             const std::vector<std::pair<int, int>>& commuting);

}  // namespace coarse
