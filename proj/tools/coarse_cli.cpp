#include <charconv>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "coarse/experiment.hpp"

using namespace coarse;

namespace {

constexpr int kOk = 0;
constexpr int kDeviation = 2;
constexpr int kInputError = 3;
constexpr int kInternalError = 4;

struct Common {
  std::string json_out;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--json-out", c.json_out, "Write the JSON result to this file (default: stdout)");
  app->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s; c.seed_given = true; },
      "Seed for every sampled computation");
}

void emit(const Common& c, const Json& j) {
  if (c.json_out.empty()) {
    std::cout << dump(j);
  } else {
    write_text_file(c.json_out, dump(j));
  }
}

// Where an instance comes from: a generated family or graph/system files.
struct Source {
  std::string family;
  int size = 5, dim = 2, radius = 3, rank = 2, degree = 3;
  std::string graph_file, system_file;

  void add(CLI::App* app) {
    app->add_option("--family", family, "grid_zd, free_group_ball, tree, cycle, racg_ball, surface_group_ball, staircase_z2");
    app->add_option("--size", size, "Side length, cycle length or staircase half-width");
    app->add_option("--dim", dim, "Grid dimension");
    app->add_option("--radius", radius, "Ball radius");
    app->add_option("--rank", rank, "Free group rank");
    app->add_option("--degree", degree, "Tree degree");
    app->add_option("--graph", graph_file, "Graph JSON file (from gen)");
    app->add_option("--system", system_file, "Path system JSON file (default: all geodesics)");
  }

  FamilySpec spec(std::uint64_t seed) const {
    FamilySpec s;
    s.family = parse_family(family);
    s.size = size;
    s.dim = dim;
    s.radius = radius;
    s.rank = rank;
    s.degree = degree;
    s.seed = seed;
    return s;
  }

  Instance load(std::uint64_t seed) const {
    if (!family.empty() && !graph_file.empty()) throw InputError("give either --family or --graph, not both");
    if (!family.empty()) return generate(spec(seed));
    if (graph_file.empty()) throw InputError("an instance is required: --family or --graph");
    GraphPtr g = graph_from_json(read_json_file(graph_file));
    PathSystem ps = system_file.empty() ? PathSystem::all_geodesics(g)
                                        : system_from_json(read_json_file(system_file), g);
    InstanceMeta meta;
    meta.name = graph_file;
    return Instance{g, ps, meta};
  }
};

Vertex vertex_ref(const MetricGraph& g, const std::string& text) {
  int id = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec == std::errc() && ptr == text.data() + text.size()) {
    if (!g.contains(id)) throw InputError("vertex " + text + " is not in the graph");
    return id;
  }
  if (auto v = g.find_label(text)) return *v;
  throw InputError("no vertex with id or label '" + text + "'");
}

// A path given vertex by vertex, or the system's canonical path between two vertices.
struct PathArg {
  std::vector<std::string> vertices;
  std::string from, to;

  void add(CLI::App* app) {
    app->add_option("--path", vertices, "Vertices of the path (ids or labels)");
    app->add_option("--from", from, "Start of the canonical special path");
    app->add_option("--to", to, "End of the canonical special path");
  }

  EdgePath resolve(const PathSystem& ps) const {
    const MetricGraph& g = ps.graph();
    if (!vertices.empty()) {
      std::vector<Vertex> vs;
      for (const auto& v : vertices) vs.push_back(vertex_ref(g, v));
      try {
        return EdgePath(g, std::move(vs));
      } catch (const Error& e) {
        throw InputError(e.what());
      }
    }
    if (from.empty() || to.empty()) throw InputError("give --path or both --from and --to");
    return ps.canonical_path(vertex_ref(g, from), vertex_ref(g, to));
  }
};

struct TripleArg {
  std::string gauge = "validator-default";
  int n = 7;

  void add(CLI::App* app) {
    app->add_option("--gauge", gauge,
                    "validator-default, 'slope,intercept', or a JSON gauge file");
    app->add_option("--n", n, "Leg bound of the contraction triple");
  }

  ContractionTriple build(const PathSystem& ps) const {
    if (gauge == "validator-default") return ContractionTriple::validator_default(ps, n);
    auto comma = gauge.find(',');
    if (comma != std::string::npos && gauge.find('{') == std::string::npos &&
        !std::filesystem::exists(gauge)) {
      return ContractionTriple{Gauge::affine(parse_rational(gauge.substr(0, comma)),
                                             parse_rational(gauge.substr(comma + 1))),
                               n, ps};
    }
    return ContractionTriple{gauge_from_json(read_json_file(gauge)), n, ps};
  }
};

Json triple_json(const ContractionTriple& t) {
  auto allowed = check_allowed(t);
  return Json{{"n", t.n}, {"K", gauge_to_json(t.K)}, {"describe", t.K.describe()},
              {"allowed", allowed.allowed}, {"failures", allowed.failures}};
}

Json path_json(const EdgePath& p) { return Json{{"vertices", p.vertices()}, {"length", p.length()}}; }

Json ball_json(const Ball& b) {
  return Json{{"center", b.center}, {"radius", rational_to_json(b.radius)}};
}

PolygonalLine parse_line_arg(const std::string& text, const MetricGraph& g) {
  if (std::filesystem::exists(text)) return line_from_json(read_json_file(text), g);
  return line_from_json(parse_json(text), g);
}

// ---------------------------------------------------------------------------

int cmd_gen(const Source& src, const Common& c, const std::string& out_dir, bool dot) {
  Instance inst = src.load(c.seed);
  const MetricGraph& g = *inst.graph;
  Json meta{{"name", inst.meta.name},
            {"vertices", g.vertex_count()},
            {"edges", g.edge_count()},
            {"basepoint", inst.meta.basepoint},
            {"truncation_radius", inst.meta.truncation_radius ? Json(*inst.meta.truncation_radius) : Json(nullptr)},
            {"inner_safe_radius", inst.meta.inner_safe_radius ? Json(*inst.meta.inner_safe_radius) : Json(nullptr)},
            {"inner_safe", inst.meta.inner_safe},
            {"system", kind_name(inst.system.kind())},
            {"seed", c.seed}};
  if (!src.family.empty()) meta["spec"] = family_spec_to_json(src.spec(c.seed));
  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    write_text_file(dir / "graph.json", dump(graph_to_json(g)));
    write_text_file(dir / "system.json", dump(system_to_json(inst.system)));
    write_text_file(dir / "meta.json", dump(meta));
    if (dot) write_text_file(dir / "graph.dot", graph_to_dot(g));
  }
  emit(c, meta);
  return kOk;
}

int cmd_midthin(const Source& src, const Common& c, const PathArg& pa, const TripleArg& ta) {
  Instance inst = src.load(c.seed);
  EdgePath h = pa.resolve(inst.system);
  auto triple = ta.build(inst.system);
  auto v = is_midthin(h, triple);
  emit(c, Json{{"path", path_json(h)},
               {"triple", triple_json(triple)},
               {"midthin", v.midthin},
               {"neck", v.neck ? rational_to_json(*v.neck) : Json(nullptr)},
               {"rho", v.rho}});
  return kOk;
}

int cmd_anti(const Source& src, const Common& c, const PathArg& pa, const TripleArg& ta) {
  Instance inst = src.load(c.seed);
  EdgePath h = pa.resolve(inst.system);
  auto triple = ta.build(inst.system);
  auto v = is_anti_contracting(h, triple);
  Json witness = nullptr;
  if (v.witness) {
    witness = Json{{"i", v.witness->first},
                   {"j", v.witness->second},
                   {"neck", v.witness_neck ? rational_to_json(*v.witness_neck) : Json(nullptr)}};
  }
  emit(c, Json{{"path", path_json(h)},
               {"triple", triple_json(triple)},
               {"anti_contracting", v.anti_contracting},
               {"midthin_window", witness}});
  return kOk;
}

int cmd_space(const Source& src, const Common& c, const TripleArg& ta, const std::string& scope,
              bool delta, const std::string& dot_out) {
  Instance inst = src.load(c.seed);
  auto triple = ta.build(inst.system);
  BuildOptions opt;
  if (scope == "capped") {
    opt.scope = PairScope::kCapped;
  } else if (scope != "exhaustive") {
    throw InputError("--scope must be exhaustive or capped");
  }
  opt.measure_delta = delta;
  opt.delta_spec.seed = c.seed;
  auto space = build_contraction_space(triple, opt);
  if (!dot_out.empty()) write_text_file(dot_out, graph_to_dot(*space.hat, "contraction_space"));
  if (c.json_out.empty()) {
    std::cout << dump(Json{{"vertices", space.base->vertex_count()},
                           {"extra_edges", space.extra_edges.size()},
                           {"complete", space.complete},
                           {"diameter", space.diameter},
                           {"delta_hat", rational_to_json(space.delta_hat.delta)},
                           {"delta_exact", space.delta_hat.exact},
                           {"allowed", check_allowed(triple).allowed}});
  } else {
    write_text_file(c.json_out, dump(space_to_json(space)));
  }
  return kOk;
}

struct MorseArgs {
  std::string check = "thin";
  std::string epsilon = "1/4", A = "1", R = "0", L, C = "1", Q = "2", q = "0";
  int n = 3;
};

ThinnessParams thinness_from(const MorseArgs& m) {
  ThinnessParams p;
  p.epsilon = parse_rational(m.epsilon);
  p.A = parse_rational(m.A);
  p.n = m.n;
  p.R = parse_rational(m.R);
  if (!m.L.empty()) p.L = parse_rational(m.L);
  p.validate();
  return p;
}

int cmd_morse(const Source& src, const Common& c, const PathArg& pa, const MorseArgs& m) {
  Instance inst = src.load(c.seed);
  EdgePath gamma = pa.resolve(inst.system);
  Json out{{"path", path_json(gamma)}, {"check", m.check}};
  if (m.check == "thin" || m.check == "wpm") {
    auto p = thinness_from(m);
    auto rep = m.check == "thin" ? proportionally_thin(gamma, p, inst.system)
                                 : weakly_polygonally_morse(gamma, p, inst.system);
    out["params"] = {{"epsilon", m.epsilon}, {"A", m.A}, {"n", m.n}, {"R", m.R}, {"L", m.L}};
    out["report"] = morse_report_to_json(rep);
  } else if (m.check == "contracting") {
    ContractingOptions opt;
    opt.seed = c.seed;
    out["C"] = m.C;
    out["report"] = morse_report_to_json(p_contracting_check(gamma, parse_rational(m.C), inst.system, opt));
    out["minimal_C"] = p_contracting_constant(gamma, inst.system, opt);
  } else if (m.check == "strong") {
    out["strong_constant"] = strong_contraction_constant(gamma, inst.system.graph());
  } else if (m.check == "gauge") {
    auto v = morse_gauge_oracle(gamma, parse_rational(m.Q), parse_rational(m.q), inst.system.graph());
    out["Q"] = m.Q;
    out["q"] = m.q;
    out["gauge_upper_bound"] = v.value;
    out["window"] = {v.s, v.t};
    out["far"] = v.far ? Json(*v.far) : Json(nullptr);
  } else {
    throw InputError("--check must be thin, wpm, contracting, strong or gauge");
  }
  emit(c, out);
  return kOk;
}

struct NavArgs {
  std::string method = "search";
  std::string m, R, C = "28", alpha;
  int k = 3;
  std::string z1, z2, y;
};

int cmd_navigate(const Source& src, const Common& c, const NavArgs& a) {
  Instance inst = src.load(c.seed);
  const MetricGraph& g = *inst.graph;
  if (a.m.empty() || a.R.empty()) throw InputError("--m and --R are required");
  const Vertex m = vertex_ref(g, a.m);
  const Rational R = parse_rational(a.R);
  const Rational C = parse_rational(a.C);
  Json out{{"method", a.method}, {"m", m}, {"R", rational_to_json(R)}};

  if (a.method == "median") {
    if (a.z1.empty() || a.z2.empty() || a.y.empty()) throw InputError("median needs --z1, --z2 and --y");
    auto line = median_avoid(vertex_ref(g, a.z1), vertex_ref(g, a.z2), vertex_ref(g, a.y), m, R, g);
    out["line"] = line_to_json(line);
    out["length"] = line.length();
    out["clearance"] = line.clearance(g, m);
    emit(c, out);
    return kOk;
  }
  if (a.alpha.empty()) throw InputError("--alpha (JSON legs or file) is required");
  NavigabilityInstance ni{m, R, parse_line_arg(a.alpha, g)};
  if (a.method == "search") {
    auto res = navigate_search(ni, C, a.k, inst.system);
    out["C"] = rational_to_json(C);
    out["k"] = a.k;
    out["ball"] = ball_json(res.ball);
    out["hop_limit"] = res.hop_limit;
    out["length_bound"] = rational_to_json(res.length_bound);
    out["found"] = res.line.has_value();
    out["line"] = res.line ? line_to_json(*res.line) : Json(nullptr);
    out["length"] = res.length;
    out["best_by_legs"] = res.best_by_legs;
    out["below_scale"] = res.below_scale;
    out["reason"] = res.reason;
  } else if (a.method == "slides") {
    SlideOptions opt;
    opt.C = C;
    opt.k = a.k;
    auto res = slides_navigate(ni, inst.system, opt);
    out["line"] = line_to_json(res.line);
    out["length"] = res.line.length();
    out["central_slides"] = res.central_slides;
    out["side_slides"] = res.side_slides;
    out["escalated"] = res.escalated;
    out["measured_C"] = rational_to_json(res.measured_C);
    out["log"] = res.log;
  } else {
    throw InputError("--method must be search, slides or median");
  }
  emit(c, out);
  return kOk;
}

struct DivArgs {
  std::vector<int> n_values{2, 4, 6};
  std::string delta = "1/2", epsilon = "0";
  std::int64_t samples = 3000;
  int exhaustive_limit = 200;
  std::string csv_out;
  bool safe_region = false;
};

int cmd_diverge(const Source& src, const Common& c, const DivArgs& a) {
  Instance inst = src.load(c.seed);
  DivergenceOptions opt;
  opt.sampling.samples = a.samples;
  opt.sampling.seed = c.seed;
  opt.sampling.exhaustive_limit = a.exhaustive_limit;
  if (a.safe_region) opt.region = inst.meta.inner_safe;
  auto prof = divergence_profile(*inst.graph, a.n_values, parse_rational(a.delta), parse_rational(a.epsilon), opt);
  const std::string family = src.family.empty() ? inst.meta.name : src.family;
  const int size = src.family.empty() ? inst.graph->vertex_count() : src.size;
  if (!a.csv_out.empty()) write_text_file(a.csv_out, divergence_csv(family, size, prof));
  Json out = divergence_to_json(prof);
  out["instance"] = inst.meta.name;
  out["region"] = a.safe_region ? "inner-safe" : "all vertices";
  emit(c, out);
  return kOk;
}

int cmd_dichotomy(const Common& c, const std::string& config_file, const std::string& out_dir) {
  ExperimentConfig cfg =
      config_file.empty() ? ExperimentConfig::standard() : config_from_json(read_json_file(config_file));
  if (config_file.empty() || c.seed_given) cfg.seed = c.seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  auto report = run_dichotomy_experiment(cfg);
  if (!cfg.output_dir.empty()) write_report(report, cfg.output_dir);
  if (!c.json_out.empty()) write_text_file(c.json_out, dump(report_to_json(report)));
  std::cout << report_table_csv(report);
  for (const auto& row : report.rows) {
    for (const auto& f : row.flags) std::cerr << "DEVIATION " << row.family << ": " << f << "\n";
  }
  return report.deviation ? kDeviation : kOk;
}

int cmd_verify(const Source& src, const Common& c, const PathArg& pa, const MorseArgs& m,
               const std::string& witness_file) {
  Instance inst = src.load(c.seed);
  EdgePath gamma = pa.resolve(inst.system);
  auto p = thinness_from(m);
  Json j = read_json_file(witness_file);
  if (j.contains("report")) j = j.at("report");
  if (j.contains("witness")) j = j.at("witness");
  if (j.is_null()) throw InputError("the file holds no witness");
  MorseWitness w = witness_from_json(j, inst.system.graph());
  const bool ok = verify_thinness_witness(gamma, p, inst.system, w);
  emit(c, Json{{"path", path_json(gamma)}, {"window", {w.i, w.j}}, {"valid", ok}});
  return ok ? kOk : kDeviation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse contraction, Morse and navigability experiments on finite graphs"};
  app.require_subcommand(1);

  Common common;
  Source src;
  PathArg path;
  TripleArg triple;
  MorseArgs morse;
  NavArgs nav;
  DivArgs div;
  std::string out_dir, scope = "exhaustive", dot_out, config_file, witness_file;
  bool dot = false, no_delta = false;

  auto* gen = app.add_subcommand("gen", "Generate a family instance: graph, path system and metadata");
  add_common(gen, common);
  src.add(gen);
  gen->add_option("--out-dir", out_dir, "Write graph.json, system.json and meta.json here");
  gen->add_flag("--dot", dot, "Also write graph.dot");

  auto* mid = app.add_subcommand("midthin", "Is a special path midthin for a contraction triple");
  add_common(mid, common);
  src.add(mid);
  path.add(mid);
  triple.add(mid);

  auto* anti = app.add_subcommand("anti", "Is a special path anti-contracting for a contraction triple");
  add_common(anti, common);
  src.add(anti);
  path.add(anti);
  triple.add(anti);

  auto* space = app.add_subcommand("space", "Build the contraction space");
  add_common(space, common);
  src.add(space);
  triple.add(space);
  space->add_option("--scope", scope, "exhaustive or capped");
  space->add_flag("--no-delta", no_delta, "Skip the four-point delta of the contraction space");
  space->add_option("--dot-out", dot_out, "Write the contraction space as DOT");

  auto* mo = app.add_subcommand("morse", "Thinness, weak polygonal Morse, contraction and gauge checks");
  add_common(mo, common);
  src.add(mo);
  path.add(mo);
  mo->add_option("--check", morse.check, "thin, wpm, contracting, strong or gauge");
  mo->add_option("--epsilon", morse.epsilon);
  mo->add_option("--A", morse.A);
  mo->add_option("--legs", morse.n, "Leg bound n of the polygonal lines");
  mo->add_option("--R", morse.R, "Minimal window length");
  mo->add_option("--L", morse.L, "Maximal window length");
  mo->add_option("--C", morse.C, "Contraction constant");
  mo->add_option("--Q", morse.Q, "Gauge multiplicative constant");
  mo->add_option("--q", morse.q, "Gauge additive constant");

  auto* na = app.add_subcommand("navigate", "Polygonal lines avoiding a ball");
  add_common(na, common);
  src.add(na);
  na->add_option("--method", nav.method, "search, slides or median");
  na->add_option("--m", nav.m, "Ball centre");
  na->add_option("--R", nav.R, "Ball radius");
  na->add_option("--C", nav.C, "Navigation constant");
  na->add_option("--k", nav.k, "Leg multiplier");
  na->add_option("--alpha", nav.alpha, "Input line: JSON array of legs, or a file holding one");
  na->add_option("--z1", nav.z1);
  na->add_option("--z2", nav.z2);
  na->add_option("--y", nav.y);

  auto* dv = app.add_subcommand("diverge", "Divergence profile");
  add_common(dv, common);
  src.add(dv);
  dv->add_option("--n-values", div.n_values);
  dv->add_option("--delta", div.delta);
  dv->add_option("--epsilon", div.epsilon);
  dv->add_option("--samples", div.samples);
  dv->add_option("--exhaustive-limit", div.exhaustive_limit);
  dv->add_option("--csv-out", div.csv_out);
  dv->add_flag("--safe-region", div.safe_region, "Draw triples from the inner-safe region only");

  auto* di = app.add_subcommand("dichotomy", "Run the dichotomy experiment; exit 2 on a flagged deviation");
  add_common(di, common);
  di->add_option("--config", config_file, "Experiment config JSON (default: the standard table)");
  di->add_option("--out-dir", out_dir, "Write report.json, table.csv and divergence.csv here");

  auto* vw = app.add_subcommand("verify-witness", "Replay a thinness witness; exit 2 if it does not verify");
  add_common(vw, common);
  src.add(vw);
  path.add(vw);
  vw->add_option("--witness", witness_file, "JSON file: a morse report or a bare witness")->required();
  vw->add_option("--epsilon", morse.epsilon);
  vw->add_option("--A", morse.A);
  vw->add_option("--legs", morse.n);
  vw->add_option("--R", morse.R);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*gen) return cmd_gen(src, common, out_dir, dot);
    if (*mid) return cmd_midthin(src, common, path, triple);
    if (*anti) return cmd_anti(src, common, path, triple);
    if (*space) return cmd_space(src, common, triple, scope, !no_delta, dot_out);
    if (*mo) return cmd_morse(src, common, path, morse);
    if (*na) return cmd_navigate(src, common, nav);
    if (*dv) return cmd_diverge(src, common, div);
    if (*di) return cmd_dichotomy(common, config_file, out_dir);
    if (*vw) return cmd_verify(src, common, path, morse, witness_file);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}
