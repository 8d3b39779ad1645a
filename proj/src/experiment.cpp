#include "coarse/experiment.hpp"

#include <algorithm>
#include <sstream>

namespace coarse {

namespace {

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad field '") + key + "': " + e.what());
  }
}

Rational rational_field(const Json& j, const char* key, Rational fallback) {
  return j.contains(key) ? rational_from_json(j.at(key)) : fallback;
}

int spec_size(const FamilySpec& s) {
  switch (s.family) {
    case Family::kGridZd:
    case Family::kCycle:
    case Family::kStaircaseZ2: return s.size;
    case Family::kProduct: return s.factors.empty() ? 0 : spec_size(s.factors.front());
    default: return s.radius;
  }
}

bool restrict_to_safe_region(Family f) {
  return f == Family::kFreeGroupBall || f == Family::kTree || f == Family::kRacgBall ||
         f == Family::kSurfaceGroupBall;
}

// First pair in vertex order realising the diameter.
std::pair<Vertex, Vertex> diameter_pair(const MetricGraph& g, Vertex start) {
  const Dist D = diameter(g);
  auto farthest = [&](const DistanceRow& row) {
    return static_cast<Vertex>(std::max_element(row.begin(), row.end()) - row.begin());
  };
  const Vertex u = farthest(distance_map(g, start));
  const auto from_u = distance_map(g, u);
  if (from_u[farthest(from_u)] == D) return {std::min(u, farthest(from_u)), std::max(u, farthest(from_u))};
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    const auto row = distance_map(g, s);
    const Vertex t = farthest(row);
    if (row[t] == D) return {s, t};
  }
  throw InternalError("no pair realises the diameter");
}

std::string verdict_word(bool ok) { return ok ? "pass" : "fail"; }

Json gauge_or_default(const std::optional<Gauge>& K) {
  return K ? gauge_to_json(*K) : Json("validator-default");
}

}  // namespace

ExperimentConfig ExperimentConfig::standard() {
  ExperimentConfig cfg;
  FamilySeries grid{"grid", {}}, free{"free_group", {}}, stair{"staircase", {}};
  for (int n = 7; n <= 13; ++n) grid.members.push_back(FamilySpec::grid(n));
  for (int r = 4; r <= 8; ++r) free.members.push_back(FamilySpec::free_group(r));
  for (int h : {4, 6, 8}) stair.members.push_back(FamilySpec::staircase(h));
  cfg.families = {grid, free, stair};
  cfg.triples = {TripleSpec{}};
  cfg.thinness.epsilon = Rational(1, 4);
  cfg.thinness.A = 1;
  cfg.thinness.n = 3;
  cfg.thinness.R = 4;
  return cfg;
}

Json family_spec_to_json(const FamilySpec& s) {
  Json commuting = Json::array();
  for (auto [a, b] : s.commuting) commuting.push_back({a, b});
  Json factors = Json::array();
  for (const auto& f : s.factors) factors.push_back(family_spec_to_json(f));
  return Json{{"family", family_name(s.family)},
              {"dim", s.dim},
              {"size", s.size},
              {"radius", s.radius},
              {"rank", s.rank},
              {"degree", s.degree},
              {"generators", s.generators},
              {"commuting", commuting},
              {"factors", factors},
              {"seed", s.seed}};
}

FamilySpec family_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family")) throw InputError("family spec needs a 'family' field");
  FamilySpec s;
  s.family = parse_family(j.at("family").get<std::string>());
  s.dim = field(j, "dim", s.dim);
  s.size = field(j, "size", s.size);
  s.radius = field(j, "radius", s.radius);
  s.rank = field(j, "rank", s.rank);
  s.degree = field(j, "degree", s.degree);
  s.generators = field(j, "generators", s.generators);
  s.commuting = field(j, "commuting", s.commuting);
  s.seed = field(j, "seed", s.seed);
  for (const auto& f : j.value("factors", Json::array())) s.factors.push_back(family_spec_from_json(f));
  return s;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json families = Json::array();
  for (const auto& f : cfg.families) {
    Json members = Json::array();
    for (const auto& m : f.members) members.push_back(family_spec_to_json(m));
    families.push_back({{"label", f.label}, {"members", members}});
  }
  Json triples = Json::array();
  for (const auto& t : cfg.triples) {
    triples.push_back({{"label", t.label}, {"n", t.n}, {"K", gauge_or_default(t.K)}});
  }
  const auto& th = cfg.thinness;
  const auto& dv = cfg.divergence;
  return Json{{"families", families},
              {"triples", triples},
              {"thinness",
               {{"epsilon", rational_to_json(th.epsilon)},
                {"A", rational_to_json(th.A)},
                {"n", th.n},
                {"R", rational_to_json(th.R)},
                {"L", th.L ? rational_to_json(*th.L) : Json(nullptr)}}},
              {"divergence",
               {{"n_values", dv.n_values},
                {"delta", rational_to_json(dv.delta)},
                {"epsilon", rational_to_json(dv.epsilon)},
                {"exhaustive_limit", dv.exhaustive_limit},
                {"region_exhaustive_limit", dv.region_exhaustive_limit},
                {"samples", dv.samples},
                {"linear_bound", rational_to_json(dv.linear_bound)}}},
              {"measure_delta", cfg.measure_delta},
              {"delta_samples", cfg.delta_samples},
              {"output_dir", cfg.output_dir},
              {"seed", cfg.seed}};
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  for (const auto& f : j.value("families", Json::array())) {
    FamilySeries series;
    series.label = field<std::string>(f, "label", "");
    for (const auto& m : f.value("members", Json::array())) series.members.push_back(family_spec_from_json(m));
    if (series.members.empty()) throw InputError("family series '" + series.label + "' has no members");
    if (series.label.empty()) series.label = family_name(series.members.front().family);
    cfg.families.push_back(std::move(series));
  }
  for (const auto& t : j.value("triples", Json::array())) {
    TripleSpec spec;
    spec.label = field<std::string>(t, "label", spec.label);
    spec.n = field(t, "n", spec.n);
    if (t.contains("K") && !(t.at("K").is_string() && t.at("K") == "validator-default")) {
      spec.K = gauge_from_json(t.at("K"));
    }
    cfg.triples.push_back(std::move(spec));
  }
  if (cfg.triples.empty() && !cfg.families.empty()) cfg.triples.push_back(TripleSpec{});
  if (j.contains("thinness")) {
    const auto& th = j.at("thinness");
    cfg.thinness.epsilon = rational_field(th, "epsilon", cfg.thinness.epsilon);
    cfg.thinness.A = rational_field(th, "A", cfg.thinness.A);
    cfg.thinness.n = field(th, "n", cfg.thinness.n);
    cfg.thinness.R = rational_field(th, "R", cfg.thinness.R);
    if (th.contains("L") && !th.at("L").is_null()) cfg.thinness.L = rational_from_json(th.at("L"));
  }
  cfg.thinness.validate();
  if (j.contains("divergence")) {
    const auto& dv = j.at("divergence");
    auto& d = cfg.divergence;
    d.n_values = field(dv, "n_values", d.n_values);
    d.delta = rational_field(dv, "delta", d.delta);
    d.epsilon = rational_field(dv, "epsilon", d.epsilon);
    d.exhaustive_limit = field(dv, "exhaustive_limit", d.exhaustive_limit);
    d.region_exhaustive_limit = field(dv, "region_exhaustive_limit", d.region_exhaustive_limit);
    d.samples = field(dv, "samples", d.samples);
    d.linear_bound = rational_field(dv, "linear_bound", d.linear_bound);
  }
  cfg.measure_delta = field(j, "measure_delta", cfg.measure_delta);
  cfg.delta_samples = field(j, "delta_samples", cfg.delta_samples);
  cfg.output_dir = field<std::string>(j, "output_dir", "");
  cfg.seed = field(j, "seed", cfg.seed);
  return cfg;
}

StaircaseSignature staircase_signature(const PathSystem& ps, int length) {
  if (ps.kind() != SystemKind::kStaircaseCombingZ2) {
    throw InputError("staircase signature needs the staircase combing");
  }
  if (length < 2 || length > ps.staircase_half()) {
    throw InputError("axis length must lie in [2, half-width]");
  }
  const MetricGraph& g = ps.graph();
  StaircaseSignature sig;
  sig.length = length;
  std::vector<Vertex> axis;
  for (int x = 0; x <= length; ++x) axis.push_back(ps.at(x, 0));
  const EdgePath gamma(g, axis);

  ThinnessParams two;
  two.epsilon = Rational(1, 4);
  two.A = 10;
  two.n = 2;
  sig.thin_two = proportionally_thin(gamma, two, ps);
  ThinnessParams three = two;
  three.A = 3;
  three.n = 3;
  sig.thin_three = proportionally_thin(gamma, three, ps);

  // Rectangles over [0, L'] of height L'/2 are (2, 0)-quasi-geodesics with
  // endpoints on the axis; their tops give lower bounds on the Morse gauge.
  for (int w = 2; w <= length; w += 2) {
    const int k = w / 2;
    std::vector<Vertex> rect;
    for (int y = 0; y <= k; ++y) rect.push_back(ps.at(0, y));
    for (int x = 1; x <= w; ++x) rect.push_back(ps.at(x, k));
    for (int y = k - 1; y >= 0; --y) rect.push_back(ps.at(w, y));
    const int len = static_cast<int>(rect.size()) - 1;
    for (int s = 0; s <= len; ++s) {
      for (int t = s + 1; t <= len; ++t) {
        if (2 * g.distance(rect[s], rect[t]) < t - s) {
          throw InternalError("rectangle is not a (2, 0)-quasi-geodesic");
        }
      }
    }
    const EdgePath window = gamma.slice(0, w);
    Dist far = 0;
    for (Vertex v : rect) far = std::max(far, distance_to_path(g, v, window));
    sig.rectangle_gauge.push_back(far);
  }
  bool grows = sig.rectangle_gauge.size() >= 2;
  for (std::size_t i = 1; i < sig.rectangle_gauge.size(); ++i) {
    grows = grows && sig.rectangle_gauge[i] > sig.rectangle_gauge[i - 1];
  }
  sig.axis_morse = !grows;
  return sig;
}

DichotomyReport run_dichotomy_experiment(const ExperimentConfig& cfg) {
  cfg.thinness.validate();
  DichotomyReport report;
  report.config = cfg;
  std::uint64_t stream = 0;

  for (const auto& series : cfg.families) {
    const std::size_t first = report.instances.size();
    for (const auto& spec : series.members) {
      const std::string context = series.label + " / " + spec.describe() + ": ";
      try {
        Instance inst = generate(spec);
        const MetricGraph& g = *inst.graph;
        InstanceRecord rec;
        rec.family = series.label;
        rec.name = inst.meta.name;
        rec.size = spec_size(spec);
        rec.vertices = g.vertex_count();
        rec.diameter = diameter(g);

        for (const auto& ts : cfg.triples) {
          ContractionTriple triple = ts.K ? ContractionTriple{*ts.K, ts.n, inst.system}
                                          : ContractionTriple::validator_default(inst.system, ts.n);
          BuildOptions opt;
          opt.measure_delta = cfg.measure_delta;
          opt.delta_spec.samples = cfg.delta_samples;
          opt.delta_spec.seed = cfg.seed + stream++;
          auto space = build_contraction_space(triple, opt);
          rec.hats.push_back(HatRecord{ts.label, check_allowed(triple).allowed, space.complete,
                                       space.diameter, space.delta_hat});
        }

        const auto& dv = cfg.divergence;
        DivergenceOptions dopt;
        dopt.linear_bound = dv.linear_bound;
        dopt.sampling.samples = dv.samples;
        dopt.sampling.seed = cfg.seed + stream++;
        if (restrict_to_safe_region(spec.family) && !inst.meta.inner_safe.empty()) {
          dopt.region = inst.meta.inner_safe;
          const bool small = static_cast<int>(dopt.region.size()) <= dv.region_exhaustive_limit;
          dopt.sampling.mode = small ? SamplingSpec::Mode::kExhaustive : SamplingSpec::Mode::kSampled;
          rec.divergence_scope = "inner-safe radius " + std::to_string(*inst.meta.inner_safe_radius);
        } else {
          dopt.sampling.exhaustive_limit = dv.exhaustive_limit;
          rec.divergence_scope = "all vertices";
        }
        rec.divergence = divergence_profile(g, dv.n_values, dv.delta, dv.epsilon, dopt);

        auto [u, v] = diameter_pair(g, inst.meta.basepoint);
        EdgePath geo = inst.system.canonical_path(u, v);
        rec.diameter_geodesic = geo.vertices();
        rec.wpm = weakly_polygonally_morse(geo, cfg.thinness, inst.system);

        if (spec.family == Family::kStaircaseZ2) {
          rec.staircase = staircase_signature(inst.system, std::min(spec.size, 10));
        }
        g.release_cache();
        report.instances.push_back(std::move(rec));
      } catch (const InputError& e) {
        throw InputError(context + e.what());
      } catch (const PreconditionError& e) {
        throw PreconditionError(context + e.what());
      } catch (const InternalError& e) {
        throw InternalError(context + e.what());
      } catch (const Error& e) {
        throw Error(context + e.what());
      }
    }

    for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
      SeriesRow row;
      row.family = series.label;
      row.triple = cfg.triples[t].label;
      bool all_linear = true, any_infinite = false, all_contracting = true, all_complete = true;
      for (std::size_t i = first; i < report.instances.size(); ++i) {
        const auto& rec = report.instances[i];
        row.sizes.push_back(rec.size);
        row.hat_diameters.push_back(rec.hats[t].diameter);
        all_complete = all_complete && rec.hats[t].complete;
        all_linear = all_linear && rec.divergence.linear;
        for (const auto& e : rec.divergence.entries) {
          any_infinite = any_infinite || (e.n >= 2 && !e.value);
        }
        all_contracting = all_contracting && rec.wpm.verdict;
      }
      const auto& d = row.hat_diameters;
      const bool nondecreasing = std::is_sorted(d.begin(), d.end());
      if (std::all_of(d.begin(), d.end(), [](Dist x) { return x == 1; })) {
        row.diameter_class = "1";
      } else if (nondecreasing && d.size() >= 2 && d.back() > d.front()) {
        row.diameter_class = "growing";
      } else {
        row.diameter_class = "bounded";
      }
      row.divergence_class = all_linear ? "linear" : any_infinite ? "infinite" : "superlinear";
      row.contracting_present = all_contracting;

      auto flag = [&](const std::string& msg) {
        row.deviation = true;
        row.flags.push_back(msg);
      };
      if (row.diameter_class == "1") {
        row.prediction = "complete X-hat with linear divergence";
        if (row.divergence_class != "linear") flag("X-hat is complete but divergence is " + row.divergence_class);
      } else if (row.diameter_class == "growing") {
        row.prediction = "growing X-hat with superlinear divergence and contracting geodesics";
        if (row.divergence_class == "linear") flag("X-hat diameter grows but divergence is linear");
        if (!row.contracting_present) flag("X-hat diameter grows but the diameter geodesic is not weakly polygonally Morse");
      } else {
        row.prediction = "none";
        flag("X-hat diameter is neither 1 nor growing with size");
      }
      if (!all_complete) row.flags.push_back("X-hat built from a capped enumeration");

      if (report.instances.size() > first && report.instances.back().staircase) {
        const auto& sig = *report.instances.back().staircase;
        row.signature = "thin2=" + verdict_word(sig.thin_two.verdict) + " thin3=" +
                        verdict_word(sig.thin_three.verdict) + " axis=" +
                        (sig.axis_morse ? "morse" : "not-morse");
        if (!sig.thin_two.verdict || sig.thin_three.verdict || sig.axis_morse) {
          flag("staircase signature differs from thin2=pass thin3=fail axis=not-morse");
        }
      }
      report.deviation = report.deviation || row.deviation;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

Json report_to_json(const DichotomyReport& r) {
  Json instances = Json::array();
  for (const auto& rec : r.instances) {
    Json hats = Json::array();
    for (const auto& h : rec.hats) {
      hats.push_back({{"triple", h.triple},
                      {"allowed", h.allowed},
                      {"complete", h.complete},
                      {"diameter", h.diameter},
                      {"delta", rational_to_json(h.delta.delta)},
                      {"delta_exact", h.delta.exact}});
    }
    Json j{{"family", rec.family},
           {"name", rec.name},
           {"size", rec.size},
           {"vertices", rec.vertices},
           {"diameter", rec.diameter},
           {"hats", hats},
           {"divergence", divergence_to_json(rec.divergence)},
           {"divergence_scope", rec.divergence_scope},
           {"diameter_geodesic", rec.diameter_geodesic},
           {"wpm", morse_report_to_json(rec.wpm)}};
    if (rec.staircase) {
      const auto& s = *rec.staircase;
      j["staircase"] = {{"axis_length", s.length},
                        {"thin_two", morse_report_to_json(s.thin_two)},
                        {"thin_three", morse_report_to_json(s.thin_three)},
                        {"rectangle_gauge", s.rectangle_gauge},
                        {"axis_morse", s.axis_morse}};
    }
    instances.push_back(std::move(j));
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"family", row.family},
                    {"triple", row.triple},
                    {"sizes", row.sizes},
                    {"hat_diameters", row.hat_diameters},
                    {"diameter_class", row.diameter_class},
                    {"divergence_class", row.divergence_class},
                    {"contracting_present", row.contracting_present},
                    {"prediction", row.prediction},
                    {"deviation", row.deviation},
                    {"flags", row.flags},
                    {"signature", row.signature ? Json(*row.signature) : Json(nullptr)}});
  }
  return Json{{"schema", "coarse.dichotomy_report/1"},
              {"config", config_to_json(r.config)},
              {"deviation", r.deviation},
              {"rows", rows},
              {"instances", instances}};
}

std::string report_table_csv(const DichotomyReport& r) {
  std::ostringstream out;
  out << "family,triple,sizes,hat_diameters,diameter_class,divergence_class,contracting_present,"
         "signature,deviation,flags\n";
  auto joined = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
    return s;
  };
  for (const auto& row : r.rows) {
    std::string flags;
    for (std::size_t i = 0; i < row.flags.size(); ++i) flags += (i ? "; " : "") + row.flags[i];
    out << csv_field(row.family) << ',' << csv_field(row.triple) << ',' << joined(row.sizes) << ','
        << joined(row.hat_diameters) << ',' << row.diameter_class << ',' << row.divergence_class << ','
        << (row.contracting_present ? "true" : "false") << ',' << csv_field(row.signature.value_or(""))
        << ',' << (row.deviation ? "true" : "false") << ',' << csv_field(flags) << '\n';
  }
  return out.str();
}

std::string report_divergence_csv(const DichotomyReport& r) {
  std::string out;
  bool header = true;
  for (const auto& rec : r.instances) {
    out += divergence_csv(rec.family, rec.size, rec.divergence, header);
    header = false;
  }
  if (header) out = divergence_csv("", 0, DivergenceProfile{}, true);
  return out;
}

void write_report(const DichotomyReport& r, const std::filesystem::path& dir) {
  write_text_file(dir / "report.json", dump(report_to_json(r)));
  write_text_file(dir / "table.csv", report_table_csv(r));
  write_text_file(dir / "divergence.csv", report_divergence_csv(r));
}

}  // namespace coarse
