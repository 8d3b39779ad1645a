#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "coarse/contraction.hpp"
#include "coarse/morse.hpp"
#include "coarse/navigation.hpp"

namespace coarse {

// Insertion-ordered, so dumps are byte-stable.
using Json = nlohmann::ordered_json;

// Two-space indent plus a trailing newline.
std::string dump(const Json& j);
Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

// {"vertices": n, "labels": [...], "edges": [[u, v], ...]}
Json graph_to_json(const MetricGraph& g);
GraphPtr graph_from_json(const Json& j);
std::string graph_to_dot(const MetricGraph& g, const std::string& name = "G");

// {"kind", "config", ...}; stored kinds carry "paths", the staircase its "half".
Json system_to_json(const PathSystem& ps);
PathSystem system_from_json(const Json& j, GraphPtr g);

Json gauge_to_json(const Gauge& K);
Gauge gauge_from_json(const Json& j);

Json space_to_json(const ContractionSpace& s);
ContractionSpace space_from_json(const Json& j);

Json path_to_json(const EdgePath& p);
EdgePath path_from_json(const Json& j, const MetricGraph& g);
Json line_to_json(const PolygonalLine& line);
PolygonalLine line_from_json(const Json& j, const MetricGraph& g);

Json morse_report_to_json(const MorseReport& r);
MorseWitness witness_from_json(const Json& j, const MetricGraph& g);
Json divergence_to_json(const DivergenceProfile& p);

// RFC 4180 quoting when the field needs it.
std::string csv_field(const std::string& s);

}  // namespace coarse
