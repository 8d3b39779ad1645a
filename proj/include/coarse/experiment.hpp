#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coarse/instances.hpp"
#include "coarse/io.hpp"

namespace coarse {

struct TripleSpec {
  std::string label = "validator-default";
  std::optional<Gauge> K;  // empty: the validator default for each instance's system
  int n = 7;
};

struct DivergenceParams {
  std::vector<int> n_values{2, 4, 6};
  Rational delta{1, 2};
  Rational epsilon{0};
  int exhaustive_limit = 49;          // vertex count up to which every triple is tried
  int region_exhaustive_limit = 200;  // same, for triples restricted to the inner-safe region
  std::int64_t samples = 3000;
  Rational linear_bound{8};
};

struct FamilySeries {
  std::string label;
  std::vector<FamilySpec> members;  // increasing size
};

struct ExperimentConfig {
  std::vector<FamilySeries> families;
  std::vector<TripleSpec> triples;
  ThinnessParams thinness;  // weak polygonal Morse check on diameter geodesics
  DivergenceParams divergence;
  bool measure_delta = true;
  std::int64_t delta_samples = 200000;
  std::string output_dir;
  std::uint64_t seed = 1;

  // Grid 7..13, free group radius 4..8, staircase half-width 4, 6, 8.
  static ExperimentConfig standard();
};

Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const Json& j);
Json family_spec_to_json(const FamilySpec& s);
FamilySpec family_spec_from_json(const Json& j);

struct HatRecord {
  std::string triple;
  bool allowed = false;
  bool complete = true;
  Dist diameter = 0;
  DeltaEstimate delta;
};

// Example signature on the staircase: the x-axis segment (0,0)..(L,0).
struct StaircaseSignature {
  int length = 0;
  MorseReport thin_two;    // n = 2, eps = 1/4, A = 10
  MorseReport thin_three;  // n = 3, eps = 1/4, A = 3
  std::vector<Dist> rectangle_gauge;  // lower bounds at (Q, q) = (2, 0), windows 2, 4, ...
  bool axis_morse = true;
};

struct InstanceRecord {
  std::string family;
  std::string name;
  int size = 0;
  int vertices = 0;
  Dist diameter = 0;
  std::vector<HatRecord> hats;
  DivergenceProfile divergence;
  std::string divergence_scope;
  std::vector<Vertex> diameter_geodesic;
  MorseReport wpm;
  std::optional<StaircaseSignature> staircase;
};

struct SeriesRow {
  std::string family;
  std::string triple;
  std::vector<int> sizes;
  std::vector<Dist> hat_diameters;
  std::string diameter_class;    // "1", "bounded", "growing"
  std::string divergence_class;  // "linear", "superlinear", "infinite"
  bool contracting_present = false;
  std::string prediction;
  bool deviation = false;
  std::vector<std::string> flags;
  std::optional<std::string> signature;  // staircase: "thin2=pass thin3=fail axis=not-morse"
};

struct DichotomyReport {
  ExperimentConfig config;
  std::vector<InstanceRecord> instances;
  std::vector<SeriesRow> rows;
  bool deviation = false;
};

DichotomyReport run_dichotomy_experiment(const ExperimentConfig& cfg);
StaircaseSignature staircase_signature(const PathSystem& staircase, int length);

Json report_to_json(const DichotomyReport& r);
std::string report_table_csv(const DichotomyReport& r);
std::string report_divergence_csv(const DichotomyReport& r);
// report.json, table.csv, divergence.csv
void write_report(const DichotomyReport& r, const std::filesystem::path& dir);

}  // namespace coarse
