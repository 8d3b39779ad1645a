#include "coarse/io.hpp"

#include <fstream>
#include <sstream>

namespace coarse {

namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad field '") + key + "': " + e.what());
  }
}

SystemKind parse_kind(const std::string& name) {
  for (auto k : {SystemKind::kAllGeodesics, SystemKind::kTreeGeodesics, SystemKind::kMedianMonotone,
                 SystemKind::kStaircaseCombingZ2, SystemKind::kStoredSet, SystemKind::kPushForward}) {
    if (kind_name(k) == name) return k;
  }
  throw InputError("unknown path system kind '" + name + "'");
}

Json optional_rational(const std::optional<Rational>& r) {
  return r ? rational_to_json(*r) : Json(nullptr);
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path)); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

Json rational_to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw InputError("expected a rational, got " + j.dump());
}

Json graph_to_json(const MetricGraph& g) {
  Json edges = Json::array();
  for (auto [u, v] : g.edge_list()) edges.push_back({u, v});
  Json labels = Json::array();
  for (Vertex v = 0; v < g.vertex_count(); ++v) labels.push_back(g.label(v));
  return Json{{"vertices", g.vertex_count()}, {"labels", labels}, {"edges", edges}};
}

GraphPtr graph_from_json(const Json& j) {
  const int n = get<int>(j, "vertices");
  auto edges = get<std::vector<std::pair<Vertex, Vertex>>>(j, "edges");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = get<std::vector<std::string>>(j, "labels");
  return std::make_shared<const MetricGraph>(MetricGraph::from_edges(n, edges, std::move(labels)));
}

std::string graph_to_dot(const MetricGraph& g, const std::string& name) {
  std::ostringstream out;
  out << "graph " << Json(name).dump() << " {\n";
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    out << "  " << v << " [label=" << Json(g.label(v)).dump() << "];\n";
  }
  for (auto [u, v] : g.edge_list()) out << "  " << u << " -- " << v << ";\n";
  out << "}\n";
  return out.str();
}

Json system_to_json(const PathSystem& ps) {
  const auto& c = ps.config();
  Json j{{"kind", kind_name(ps.kind())},
         {"config",
          {{"lambda0", rational_to_json(c.lambda0)},
           {"kappa0", rational_to_json(c.kappa0)},
           {"c_p", rational_to_json(c.c_p)},
           {"undirected", c.undirected}}}};
  if (ps.kind() == SystemKind::kStaircaseCombingZ2) j["half"] = ps.staircase_half();
  if (ps.is_stored()) {
    j["generated"] = ps.is_generated();
    j["paths"] = ps.stored_paths();
  }
  return j;
}

PathSystem system_from_json(const Json& j, GraphPtr g) {
  const SystemKind kind = parse_kind(get<std::string>(j, "kind"));
  PathSystemConfig config;
  if (j.contains("config")) {
    const auto& c = j.at("config");
    config.lambda0 = rational_from_json(c.at("lambda0"));
    config.kappa0 = rational_from_json(c.at("kappa0"));
    config.c_p = rational_from_json(c.at("c_p"));
    config.undirected = get<bool>(c, "undirected");
  }
  switch (kind) {
    case SystemKind::kAllGeodesics: return PathSystem::all_geodesics(g);
    case SystemKind::kTreeGeodesics: return PathSystem::tree_geodesics(g);
    case SystemKind::kMedianMonotone: return PathSystem::median_monotone(g);
    case SystemKind::kStaircaseCombingZ2: return PathSystem::staircase_z2(g, get<int>(j, "half"));
    case SystemKind::kStoredSet:
    case SystemKind::kPushForward: {
      auto paths = get<std::vector<std::vector<Vertex>>>(j, "paths");
      if (j.value("generated", false)) return PathSystem::generated(g, std::move(paths), config, kind);
      return PathSystem::stored(g, std::move(paths), config);
    }
  }
  throw InputError("unsupported path system kind");
}

Json gauge_to_json(const Gauge& K) {
  Json breaks = Json::array(), values = Json::array();
  for (const auto& b : K.breaks()) breaks.push_back(rational_to_json(b));
  for (const auto& v : K.values()) values.push_back(optional_rational(v));
  return Json{{"breaks", breaks},
              {"values", values},
              {"tail_start", rational_to_json(K.tail_start())},
              {"slope", rational_to_json(K.slope())},
              {"intercept", rational_to_json(K.intercept())}};
}

Gauge gauge_from_json(const Json& j) {
  const Rational slope = rational_from_json(j.at("slope"));
  const Rational intercept = rational_from_json(j.at("intercept"));
  std::vector<Rational> breaks;
  std::vector<std::optional<Rational>> values;
  for (const auto& b : j.value("breaks", Json::array())) breaks.push_back(rational_from_json(b));
  for (const auto& v : j.value("values", Json::array())) {
    values.push_back(v.is_null() ? std::nullopt : std::optional<Rational>(rational_from_json(v)));
  }
  if (breaks.empty() && values.empty()) return Gauge::affine(slope, intercept);
  return Gauge::steps(std::move(breaks), std::move(values), rational_from_json(j.at("tail_start")),
                      slope, intercept);
}

Json space_to_json(const ContractionSpace& s) {
  Json extra = Json::array();
  for (auto [u, v] : s.extra_edges) extra.push_back({u, v});
  const auto& d = s.delta_hat;
  return Json{{"schema", "coarse.contraction_space/1"},
              {"graph", graph_to_json(*s.base)},
              {"system", system_to_json(s.triple.ps)},
              {"triple", {{"n", s.triple.n}, {"K", gauge_to_json(s.triple.K)}}},
              {"complete", s.complete},
              {"diameter", s.diameter},
              {"delta_hat",
               {{"delta", rational_to_json(d.delta)},
                {"exact", d.exact},
                {"quadruples", d.quadruples},
                {"witness", d.witness}}},
              {"extra_edges", extra}};
}

ContractionSpace space_from_json(const Json& j) {
  if (j.value("schema", std::string()) != "coarse.contraction_space/1") {
    throw InputError("not a contraction space file");
  }
  GraphPtr base = graph_from_json(j.at("graph"));
  PathSystem ps = system_from_json(j.at("system"), base);
  const auto& t = j.at("triple");
  ContractionTriple triple{gauge_from_json(t.at("K")), get<int>(t, "n"), ps};
  auto extra = get<std::vector<std::pair<Vertex, Vertex>>>(j, "extra_edges");
  auto all = base->edge_list();
  for (auto [u, v] : extra) {
    if (!base->contains(u) || !base->contains(v) || u >= v) {
      throw InputError("bad contraction edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    all.emplace_back(u, v);
  }
  GraphPtr hat = std::make_shared<const MetricGraph>(
      MetricGraph::from_edges(base->vertex_count(), all, base->labels()));
  DeltaEstimate delta;
  const auto& dj = j.at("delta_hat");
  delta.delta = rational_from_json(dj.at("delta"));
  delta.exact = get<bool>(dj, "exact");
  delta.quadruples = get<std::int64_t>(dj, "quadruples");
  delta.witness = get<std::array<Vertex, 4>>(dj, "witness");
  return ContractionSpace{base,           std::move(triple),         std::move(extra), hat,
                          get<bool>(j, "complete"), get<Dist>(j, "diameter"), delta};
}

Json path_to_json(const EdgePath& p) { return p.vertices(); }

EdgePath path_from_json(const Json& j, const MetricGraph& g) {
  if (!j.is_array()) throw InputError("a path is an array of vertices");
  auto vs = j.get<std::vector<Vertex>>();
  for (Vertex v : vs) {
    if (!g.contains(v)) throw InputError("path vertex " + std::to_string(v) + " not in the graph");
  }
  try {
    return EdgePath(g, std::move(vs));
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

Json line_to_json(const PolygonalLine& line) {
  Json legs = Json::array();
  for (const auto& l : line.legs) legs.push_back(path_to_json(l));
  return legs;
}

PolygonalLine line_from_json(const Json& j, const MetricGraph& g) {
  if (!j.is_array()) throw InputError("a polygonal line is an array of legs");
  PolygonalLine line;
  for (const auto& leg : j) line.legs.push_back(path_from_json(leg, g));
  if (line.legs.empty()) throw InputError("a polygonal line needs at least one leg");
  line.check_joined();
  return line;
}

Json morse_report_to_json(const MorseReport& r) {
  Json measured = Json::object();
  for (const auto& [k, v] : r.measured) measured[k] = v;
  Json witness = nullptr;
  if (r.witness) {
    const auto& w = *r.witness;
    witness = Json{{"i", w.i},
                   {"j", w.j},
                   {"line", w.line ? line_to_json(*w.line) : Json(nullptr)},
                   {"point", w.point ? Json(*w.point) : Json(nullptr)},
                   {"pair", w.pair ? Json({w.pair->first, w.pair->second}) : Json(nullptr)}};
  }
  return Json{{"verdict", r.verdict},
              {"exhaustive", r.exhaustive},
              {"witness", witness},
              {"measured", measured},
              {"note", r.note}};
}

MorseWitness witness_from_json(const Json& j, const MetricGraph& g) {
  MorseWitness w;
  w.i = get<int>(j, "i");
  w.j = get<int>(j, "j");
  if (j.contains("line") && !j.at("line").is_null()) w.line = line_from_json(j.at("line"), g);
  if (j.contains("point") && !j.at("point").is_null()) w.point = get<Vertex>(j, "point");
  if (j.contains("pair") && !j.at("pair").is_null()) w.pair = get<std::pair<Vertex, Vertex>>(j, "pair");
  return w;
}

Json divergence_to_json(const DivergenceProfile& p) {
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"n", e.n},
                       {"delta", rational_to_json(e.delta)},
                       {"epsilon", rational_to_json(e.epsilon)},
                       {"value", e.value ? Json(*e.value) : Json("inf")}});
  }
  return Json{{"entries", entries},
              {"exhaustive", p.exhaustive},
              {"triples", p.triples},
              {"linear_coefficient", optional_rational(p.linear_coefficient)},
              {"linear", p.linear},
              {"note", p.note}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace coarse
