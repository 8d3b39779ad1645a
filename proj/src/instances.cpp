#include "coarse/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <complex>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace coarse {

namespace {

constexpr int kMaxGridVertices = 301 * 301;

char inverse_letter(char c) {
  return static_cast<char>(std::islower(static_cast<unsigned char>(c)) ? std::toupper(c) : std::tolower(c));
}

struct Built {
  std::vector<std::string> labels;
  std::vector<std::pair<Vertex, Vertex>> edges;
  Vertex basepoint = 0;
  std::optional<int> radius;
  std::int64_t checks = 0;
};

// Breadth-first Cayley ball where elements have canonical string forms.
template <class Canon>
Built cayley_ball(const std::string& letters, int radius, Canon&& canon) {
  Built b;
  std::unordered_map<std::string, Vertex> index;
  b.labels.push_back("");
  index.emplace("", 0);
  std::size_t begin = 0;
  for (int r = 0; r < radius; ++r) {
    const std::size_t end = b.labels.size();
    for (std::size_t i = begin; i < end; ++i) {
      const std::string w = b.labels[i];
      for (char s : letters) {
        std::string x = canon(w + s);
        ++b.checks;
        auto it = index.find(x);
        if (it == index.end()) {
          if (static_cast<int>(x.size()) > r + 1) {
            throw InternalError("normal form of length " + std::to_string(x.size()) + " at distance " +
                                std::to_string(r + 1) + ": '" + x + "'");
          }
          it = index.emplace(x, static_cast<Vertex>(b.labels.size())).first;
          b.labels.push_back(x);
        }
        if (static_cast<Vertex>(i) < it->second) b.edges.emplace_back(static_cast<Vertex>(i), it->second);
      }
    }
    begin = end;
  }
  // Edges between vertices of the outer sphere.
  const std::size_t end = b.labels.size();
  for (std::size_t i = begin; i < end; ++i) {
    for (char s : letters) {
      auto it = index.find(canon(b.labels[i] + s));
      ++b.checks;
      if (it != index.end() && static_cast<Vertex>(i) < it->second) {
        b.edges.emplace_back(static_cast<Vertex>(i), it->second);
      }
    }
  }
  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  b.radius = radius;
  return b;
}

// ---- surface group: Dehn's algorithm plus a Fuchsian representation used only
// to find candidate equal elements quickly.

const std::string kRelator = "abABcdCD";

const std::vector<std::string>& relator_cycles() {
  static const std::vector<std::string> cycles = [] {
    std::vector<std::string> out;
    for (const std::string& r : {kRelator, invert_word(kRelator)}) {
      for (std::size_t i = 0; i < r.size(); ++i) out.push_back(r.substr(i) + r.substr(0, i));
    }
    return out;
  }();
  return cycles;
}

using Cx = std::complex<long double>;

struct Mobius {
  Cx a{1}, b{0}, c{0}, d{1};
  Mobius operator*(const Mobius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mobius inverse() const { return {d, -b, -c, a}; }
};

Mobius rotation(long double t) {
  return {std::polar(1.0L, t / 2), 0, 0, std::polar(1.0L, -t / 2)};
}

Mobius translation(long double dir, long double len) {
  Mobius t{std::cosh(len / 2), std::sinh(len / 2), std::sinh(len / 2), std::cosh(len / 2)};
  return rotation(dir) * t * rotation(-dir);
}

bool near_identity(const Mobius& m) {
  const long double tol = 1e-12L;
  for (long double s : {1.0L, -1.0L}) {
    if (std::abs(m.a - s) < tol && std::abs(m.d - s) < tol && std::abs(m.b) < tol && std::abs(m.c) < tol) {
      return true;
    }
  }
  return false;
}

// Side pairings of the regular octagon with angles pi/4, labelled abABcdCD.
std::map<char, Mobius> surface_generators() {
  const long double pi = std::acos(-1.0L);
  const long double rho = std::acosh(1 + std::sqrt(2.0L));
  std::map<char, Mobius> g;
  for (char x : std::string("abcd")) {
    const auto i = kRelator.find(x), j = kRelator.find(inverse_letter(x));
    const long double ti = i * pi / 4, tj = j * pi / 4;
    g[x] = translation(ti, 2 * rho) * rotation(ti - tj + pi);
  }
  auto product = [&](const std::map<char, Mobius>& m) {
    Mobius p;
    for (char c : kRelator) p = p * m.at(c);
    return p;
  };
  // The pairing of side x may enter the presentation as itself or its inverse.
  for (int flips = 0; flips < 16; ++flips) {
    std::map<char, Mobius> full;
    for (int k = 0; k < 4; ++k) {
      const char x = static_cast<char>('a' + k);
      full[x] = flips >> k & 1 ? g[x].inverse() : g[x];
      full[inverse_letter(x)] = full[x].inverse();
    }
    if (near_identity(product(full))) return full;
  }
  throw InternalError("octagon side pairings do not satisfy the surface relator");
}

Built surface_ball(int radius) {
  const std::string letters = "aAbBcCdD";
  const auto gens = surface_generators();
  Built b;
  std::vector<Mobius> mats{Mobius{}};
  b.labels.push_back("");
  // Candidate lookup on Re(a^2), which is invariant under the sign ambiguity.
  std::multimap<long double, Vertex> by_key;
  auto key = [](const Mobius& m) { return std::real(m.a * m.a); };
  auto close = [](const Mobius& x, const Mobius& y) {
    auto rel = [](Cx u, Cx v) { return std::abs(u - v) <= 1e-9L * std::max(1.0L, std::abs(u)); };
    return rel(x.a * x.a, y.a * y.a) && rel(x.a * std::conj(x.b), y.a * std::conj(y.b));
  };
  by_key.emplace(key(mats[0]), 0);
  auto find = [&](const std::string& w, const Mobius& m) -> std::optional<Vertex> {
    const long double k = key(m);
    const long double tol = 1e-9L * std::max(1.0L, std::abs(k));
    for (auto it = by_key.lower_bound(k - tol); it != by_key.end() && it->first <= k + tol; ++it) {
      if (!close(m, mats[it->second])) continue;
      ++b.checks;
      if (surface_word_is_trivial(w + invert_word(b.labels[it->second]))) return it->second;
    }
    return std::nullopt;
  };
  std::size_t begin = 0;
  for (int r = 0; r <= radius; ++r) {
    const std::size_t end = b.labels.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char s : letters) {
        const std::string w = b.labels[i] + s;
        const Mobius m = mats[i] * gens.at(s);
        auto hit = find(w, m);
        if (!hit) {
          if (r == radius) continue;
          hit = static_cast<Vertex>(b.labels.size());
          b.labels.push_back(dehn_reduce(w));
          mats.push_back(m);
          by_key.emplace(key(m), *hit);
        }
        if (static_cast<Vertex>(i) < *hit) b.edges.emplace_back(static_cast<Vertex>(i), *hit);
      }
    }
    begin = end;
  }
  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  b.radius = radius;
  return b;
}

Built tree_ball(int degree, int radius) {
  Built b;
  b.labels.push_back("");
  std::vector<Vertex> frontier{0};
  for (int r = 0; r < radius; ++r) {
    std::vector<Vertex> next;
    for (Vertex v : frontier) {
      const int children = v == 0 ? degree : degree - 1;
      for (int c = 0; c < children; ++c) {
        const Vertex w = static_cast<Vertex>(b.labels.size());
        b.labels.push_back(b.labels[v].empty() ? std::to_string(c) : b.labels[v] + "." + std::to_string(c));
        b.edges.emplace_back(v, w);
        next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  b.radius = radius;
  return b;
}

Built grid_box(int size, int dim) {
  std::int64_t total = 1;
  for (int i = 0; i < dim; ++i) total *= size;
  if (total > kMaxGridVertices) {
    throw PreconditionError("grid has " + std::to_string(total) + " vertices, above the cap of 301^2");
  }
  Built b;
  const int V = static_cast<int>(total);
  std::vector<int> coord(dim, 0);
  for (Vertex v = 0; v < V; ++v) {
    int rest = v;
    std::string label;
    for (int i = 0; i < dim; ++i) {
      coord[i] = rest % size;
      rest /= size;
      label += (i ? "," : "") + std::to_string(coord[i]);
    }
    b.labels.push_back(label);
    int stride = 1;
    for (int i = 0; i < dim; ++i) {
      if (coord[i] + 1 < size) b.edges.emplace_back(v, v + stride);
      stride *= size;
    }
  }
  Vertex centre = 0;
  int stride = 1;
  for (int i = 0; i < dim; ++i) {
    centre += (size / 2) * stride;
    stride *= size;
  }
  b.basepoint = centre;
  b.radius = (size - 1) / 2;
  return b;
}

Built build(const FamilySpec& spec);

Built product_of(const FamilySpec& spec) {
  if (spec.factors.size() != 2) throw InputError("product needs exactly two factors");
  Built l = build(spec.factors[0]), r = build(spec.factors[1]);
  const int n2 = static_cast<int>(r.labels.size());
  Built b;
  for (const auto& a : l.labels) {
    for (const auto& c : r.labels) b.labels.push_back("(" + a + "|" + c + ")");
  }
  for (auto [u, v] : l.edges) {
    for (int j = 0; j < n2; ++j) b.edges.emplace_back(u * n2 + j, v * n2 + j);
  }
  for (int i = 0; i < static_cast<int>(l.labels.size()); ++i) {
    for (auto [u, v] : r.edges) b.edges.emplace_back(i * n2 + u, i * n2 + v);
  }
  b.basepoint = l.basepoint * n2 + r.basepoint;
  if (l.radius && r.radius) b.radius = std::min(*l.radius, *r.radius);
  b.checks = l.checks + r.checks;
  return b;
}

Built build(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::kGridZd:
      if (spec.dim < 1 || spec.size < 1) throw InputError("grid needs positive dimension and size");
      return grid_box(spec.size, spec.dim);
    case Family::kFreeGroupBall: {
      if (spec.rank < 1 || spec.rank > 4) throw InputError("free group rank must be 1..4");
      if (spec.radius < 0 || spec.radius > 9) throw PreconditionError("free group radius must be 0..9");
      std::string letters;
      for (int i = 0; i < spec.rank; ++i) {
        letters += static_cast<char>('a' + i);
        letters += static_cast<char>('A' + i);
      }
      return cayley_ball(letters, spec.radius, [](const std::string& w) { return free_reduce(w); });
    }
    case Family::kTree:
      if (spec.degree < 2) throw InputError("tree degree must be >= 2");
      if (spec.radius < 0) throw InputError("tree radius must be nonnegative");
      if (std::pow(spec.degree - 1.0, spec.radius) > 2e6) throw PreconditionError("tree ball too large");
      return tree_ball(spec.degree, spec.radius);
    case Family::kCycle: {
      if (spec.size < 3) throw InputError("cycle length must be >= 3");
      Built b;
      for (int i = 0; i < spec.size; ++i) {
        b.labels.push_back(std::to_string(i));
        b.edges.emplace_back(std::min(i, (i + 1) % spec.size), std::max(i, (i + 1) % spec.size));
      }
      return b;
    }
    case Family::kRacgBall: {
      if (spec.generators < 1 || spec.generators > 26) throw InputError("RACG needs 1..26 generators");
      if (spec.radius < 0 || spec.radius > 6) throw PreconditionError("RACG radius must be 0..6");
      std::string letters;
      for (int i = 0; i < spec.generators; ++i) letters += static_cast<char>('a' + i);
      return cayley_ball(letters, spec.radius, [&](const std::string& w) {
        return racg_normal_form(w, spec.generators, spec.commuting);
      });
    }
    case Family::kSurfaceGroupBall:
      if (spec.radius < 0 || spec.radius > 6) throw PreconditionError("surface group radius must be 0..6");
      return surface_ball(spec.radius);
    case Family::kProduct:
      return product_of(spec);
    case Family::kStaircaseZ2: {
      if (spec.size < 1 || spec.size > 150) throw PreconditionError("staircase half-width must be 1..150");
      const int half = spec.size, w = 2 * half + 1;
      Built b = grid_box(w, 2);
      for (Vertex v = 0; v < w * w; ++v) {
        b.labels[v] = std::to_string(v % w - half) + "," + std::to_string(v / w - half);
      }
      b.radius = half;
      return b;
    }
  }
  throw InputError("unknown family");
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::kGridZd: return "grid_zd";
    case Family::kFreeGroupBall: return "free_group_ball";
    case Family::kTree: return "tree";
    case Family::kCycle: return "cycle";
    case Family::kRacgBall: return "racg_ball";
    case Family::kSurfaceGroupBall: return "surface_group_ball";
    case Family::kProduct: return "product";
    case Family::kStaircaseZ2: return "staircase_z2";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::kGridZd, Family::kFreeGroupBall, Family::kTree, Family::kCycle,
                   Family::kRacgBall, Family::kSurfaceGroupBall, Family::kProduct, Family::kStaircaseZ2}) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown family '" + name + "'");
}

FamilySpec FamilySpec::grid(int size, int dim) {
  FamilySpec s;
  s.family = Family::kGridZd;
  s.size = size;
  s.dim = dim;
  return s;
}

FamilySpec FamilySpec::free_group(int radius, int rank) {
  FamilySpec s;
  s.family = Family::kFreeGroupBall;
  s.radius = radius;
  s.rank = rank;
  return s;
}

FamilySpec FamilySpec::tree(int degree, int radius) {
  FamilySpec s;
  s.family = Family::kTree;
  s.degree = degree;
  s.radius = radius;
  return s;
}

FamilySpec FamilySpec::cycle(int n) {
  FamilySpec s;
  s.family = Family::kCycle;
  s.size = n;
  return s;
}

FamilySpec FamilySpec::racg(int radius) {
  FamilySpec s;
  s.family = Family::kRacgBall;
  s.radius = radius;
  return s;
}

FamilySpec FamilySpec::surface(int radius) {
  FamilySpec s;
  s.family = Family::kSurfaceGroupBall;
  s.radius = radius;
  return s;
}

FamilySpec FamilySpec::product(FamilySpec a, FamilySpec b) {
  FamilySpec s;
  s.family = Family::kProduct;
  s.factors = {std::move(a), std::move(b)};
  return s;
}

FamilySpec FamilySpec::staircase(int half) {
  FamilySpec s;
  s.family = Family::kStaircaseZ2;
  s.size = half;
  return s;
}

std::string FamilySpec::describe() const {
  std::ostringstream os;
  os << family_name(family);
  switch (family) {
    case Family::kGridZd: os << " dim=" << dim << " size=" << size; break;
    case Family::kFreeGroupBall: os << " rank=" << rank << " radius=" << radius; break;
    case Family::kTree: os << " degree=" << degree << " radius=" << radius; break;
    case Family::kCycle: os << " n=" << size; break;
    case Family::kRacgBall: os << " generators=" << generators << " radius=" << radius; break;
    case Family::kSurfaceGroupBall: os << " genus=2 radius=" << radius; break;
    case Family::kProduct: os << " [" << factors.at(0).describe() << "] x [" << factors.at(1).describe() << "]"; break;
    case Family::kStaircaseZ2: os << " half=" << size; break;
  }
  return os.str();
}

Instance generate(const FamilySpec& spec) {
  Built b = build(spec);
  const int V = static_cast<int>(b.labels.size());
  std::vector<std::string> labels = b.labels;
  for (auto& l : labels) {
    if (l.empty()) l = "e";
  }
  auto g = std::make_shared<const MetricGraph>(MetricGraph::from_edges(V, b.edges, std::move(labels)));
  InstanceMeta meta;
  meta.name = spec.describe();
  meta.basepoint = b.basepoint;
  meta.truncation_radius = b.radius;
  meta.word_checks = b.checks;
  if (b.radius) {
    meta.inner_safe_radius = *b.radius / 2;
    const auto& from = g->distances_from(b.basepoint);
    for (Vertex v = 0; v < V; ++v) {
      if (from[v] <= *meta.inner_safe_radius) meta.inner_safe.push_back(v);
    }
  }
  PathSystem ps = spec.family == Family::kStaircaseZ2 ? PathSystem::staircase_z2(g, spec.size)
                                                      : PathSystem::all_geodesics(g);
  return Instance{g, std::move(ps), std::move(meta)};
}

bool is_graph_automorphism(const MetricGraph& g, const std::vector<Vertex>& p) {
  const int V = g.vertex_count();
  if (static_cast<int>(p.size()) != V) return false;
  std::vector<char> seen(V, 0);
  for (Vertex v : p) {
    if (v < 0 || v >= V || seen[v]) return false;
    seen[v] = 1;
  }
  for (Vertex u = 0; u < V; ++u) {
    if (g.degree(u) != g.degree(p[u])) return false;
    for (Vertex w : g.neighbors(u)) {
      if (!g.adjacent(p[u], p[w])) return false;
    }
  }
  return true;
}

namespace {

std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Relabel words letterwise and renormalise; returns the induced vertex map.
template <class Canon>
std::optional<std::vector<Vertex>> word_map(const MetricGraph& g, const std::map<char, std::string>& sub,
                                            Canon&& canon) {
  std::unordered_map<std::string, Vertex> index;
  for (Vertex v = 0; v < g.vertex_count(); ++v) index[g.label(v)] = v;
  std::vector<Vertex> out(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::string w = g.label(v), img;
    if (w == "e") w.clear();
    for (char c : w) img += sub.at(c);
    img = canon(img);
    auto it = index.find(img.empty() ? "e" : img);
    if (it == index.end()) return std::nullopt;
    out[v] = it->second;
  }
  return out;
}

std::vector<std::vector<Vertex>> candidate_maps(const FamilySpec& spec, const Instance& inst,
                                                std::vector<std::string>& rejected) {
  const MetricGraph& g = *inst.graph;
  const int V = g.vertex_count();
  std::vector<std::vector<Vertex>> out;
  auto push = [&](std::optional<std::vector<Vertex>> m, const std::string& what) {
    if (m) {
      out.push_back(std::move(*m));
    } else {
      rejected.push_back(what + ": does not preserve the ball");
    }
  };
  switch (spec.family) {
    case Family::kGridZd:
    case Family::kStaircaseZ2: {
      const int dim = spec.family == Family::kGridZd ? spec.dim : 2;
      const int size = spec.family == Family::kGridZd ? spec.size : 2 * spec.size + 1;
      for (const auto& perm : permutations(dim)) {
        for (int flips = 0; flips < (1 << dim); ++flips) {
          std::vector<Vertex> m(V);
          for (Vertex v = 0; v < V; ++v) {
            std::vector<int> c(dim);
            int rest = v;
            for (int i = 0; i < dim; ++i) c[i] = rest % size, rest /= size;
            Vertex img = 0;
            int stride = 1;
            for (int i = 0; i < dim; ++i) {
              int x = c[perm[i]];
              if (flips >> i & 1) x = size - 1 - x;
              img += x * stride;
              stride *= size;
            }
            m[v] = img;
          }
          out.push_back(std::move(m));
        }
      }
      break;
    }
    case Family::kCycle: {
      std::vector<Vertex> rot(V), ref(V);
      for (Vertex v = 0; v < V; ++v) rot[v] = (v + 1) % V, ref[v] = (V - v) % V;
      out = {rot, ref};
      break;
    }
    case Family::kTree: {
      std::unordered_map<std::string, Vertex> index;
      for (Vertex v = 0; v < V; ++v) index[g.label(v)] = v;
      auto branch_map = [&](const std::vector<int>& sigma) {
        std::vector<Vertex> m(V);
        for (Vertex v = 0; v < V; ++v) {
          std::string l = g.label(v);
          if (l == "e") {
            m[v] = v;
            continue;
          }
          auto dot = l.find('.');
          int first = std::stoi(l.substr(0, dot));
          std::string img = std::to_string(sigma[first]) + (dot == std::string::npos ? "" : l.substr(dot));
          m[v] = index.at(img);
        }
        return m;
      };
      std::vector<int> swap(spec.degree), cyc(spec.degree);
      std::iota(swap.begin(), swap.end(), 0);
      std::swap(swap[0], swap[1]);
      for (int i = 0; i < spec.degree; ++i) cyc[i] = (i + 1) % spec.degree;
      out = {branch_map(swap), branch_map(cyc)};
      break;
    }
    case Family::kFreeGroupBall:
    case Family::kSurfaceGroupBall: {
      const int rank = spec.family == Family::kFreeGroupBall ? spec.rank : 4;
      for (const auto& perm : permutations(rank)) {
        for (int flips = 0; flips < (1 << rank); ++flips) {
          std::map<char, std::string> sub;
          for (int i = 0; i < rank; ++i) {
            char img = static_cast<char>('a' + perm[i]);
            if (flips >> i & 1) img = inverse_letter(img);
            sub[static_cast<char>('a' + i)] = std::string(1, img);
            sub[static_cast<char>('A' + i)] = std::string(1, inverse_letter(img));
          }
          std::string name = "letters ";
          for (int i = 0; i < rank; ++i) name += sub[static_cast<char>('a' + i)];
          if (spec.family == Family::kFreeGroupBall) {
            push(word_map(g, sub, [](const std::string& w) { return free_reduce(w); }), name);
            continue;
          }
          // Keep the substitution only if it maps the relator to a relator.
          std::string r;
          for (char c : kRelator) r += sub[c];
          const auto& cyc = relator_cycles();
          if (std::find(cyc.begin(), cyc.end(), r) == cyc.end()) continue;
          // Labels are geodesic words built letter by letter in vertex order,
          // so the image of w s is the sub(s)-neighbour of the image of w.
          std::unordered_map<std::string, Vertex> index;
          for (Vertex v = 0; v < V; ++v) index[g.label(v)] = v;
          auto word = [&](Vertex v) {
            std::string l = g.label(v);
            return l == "e" ? std::string() : l;
          };
          std::vector<Vertex> m(V, -1);
          m[0] = 0;
          bool ok = true;
          for (Vertex v = 1; v < V && ok; ++v) {
            const std::string w = word(v);
            const std::string up = w.substr(0, w.size() - 1);
            const Vertex parent = index.at(up.empty() ? "e" : up);
            const std::string step = word(m[parent]) + sub[w.back()];
            ok = false;
            for (Vertex u : g.neighbors(m[parent])) {
              if (surface_word_is_trivial(step + invert_word(word(u)))) {
                m[v] = u;
                ok = true;
                break;
              }
            }
          }
          push(ok ? std::optional(m) : std::nullopt, name);
        }
      }
      break;
    }
    case Family::kRacgBall: {
      std::vector<std::vector<char>> adj(spec.generators, std::vector<char>(spec.generators, 0));
      for (auto [i, j] : spec.commuting) adj[i][j] = adj[j][i] = 1;
      for (const auto& perm : permutations(spec.generators)) {
        bool graph_aut = true;
        for (int i = 0; i < spec.generators; ++i) {
          for (int j = 0; j < spec.generators; ++j) graph_aut &= adj[i][j] == adj[perm[i]][perm[j]];
        }
        if (!graph_aut) continue;
        std::map<char, std::string> sub;
        std::string name = "generators ";
        for (int i = 0; i < spec.generators; ++i) {
          sub[static_cast<char>('a' + i)] = std::string(1, static_cast<char>('a' + perm[i]));
          name += static_cast<char>('a' + perm[i]);
        }
        push(word_map(g, sub, [&](const std::string& w) {
               return racg_normal_form(w, spec.generators, spec.commuting);
             }),
             name);
      }
      break;
    }
    case Family::kProduct: {
      const auto& fa = spec.factors.at(0);
      const auto& fb = spec.factors.at(1);
      Instance a = generate(fa), b = generate(fb);
      const int n1 = a.graph->vertex_count(), n2 = b.graph->vertex_count();
      auto sa = automorphisms(fa, a), sb = automorphisms(fb, b);
      for (const auto& m : sa.maps) {
        std::vector<Vertex> p(V);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) p[i * n2 + j] = m[i] * n2 + j;
        out.push_back(std::move(p));
      }
      for (const auto& m : sb.maps) {
        std::vector<Vertex> p(V);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) p[i * n2 + j] = i * n2 + m[j];
        out.push_back(std::move(p));
      }
      if (n1 == n2 && fa.describe() == fb.describe()) {
        std::vector<Vertex> p(V);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) p[i * n2 + j] = j * n2 + i;
        out.push_back(std::move(p));
      }
      break;
    }
  }
  return out;
}

}  // namespace

AutomorphismSet automorphisms(const FamilySpec& spec, const Instance& inst) {
  AutomorphismSet out;
  auto cands = candidate_maps(spec, inst, out.rejected);
  const MetricGraph& g = *inst.graph;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!is_graph_automorphism(g, cands[i])) {
      out.rejected.push_back("candidate " + std::to_string(i) + ": not adjacency preserving");
      continue;
    }
    if (inst.system.kind() == SystemKind::kStaircaseCombingZ2) {
      const auto& p = cands[i];
      auto preserved = [&](Vertex a, Vertex b) {
        const auto line = inst.system.combing_line(a, b);
        const auto img = inst.system.combing_line(p[a], p[b]);
        for (int k = 0; k < line.size(); ++k) {
          if (img[k] != p[line[k]]) return false;
        }
        return true;
      };
      bool ok = true;
      const int V = g.vertex_count();
      if (V <= 1000) {
        for (Vertex a = 0; a < V && ok; ++a) {
          for (Vertex b = 0; b < V && ok; ++b) ok = preserved(a, b);
        }
      } else {
        std::mt19937_64 rng(spec.seed);
        for (int t = 0; t < 200000 && ok; ++t) ok = preserved(rng() % V, rng() % V);
      }
      if (!ok) {
        out.rejected.push_back("candidate " + std::to_string(i) + ": does not preserve the combing");
        continue;
      }
    }
    out.maps.push_back(cands[i]);
  }
  return out;
}

std::string free_reduce(const std::string& w) {
  std::string out;
  for (char c : w) {
    if (!out.empty() && out.back() == inverse_letter(c)) {
      out.pop_back();
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string invert_word(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out) c = inverse_letter(c);
  return out;
}

std::string dehn_reduce(const std::string& input) {
  for (char c : input) {
    if (std::string("aAbBcCdD").find(c) == std::string::npos) {
      throw InputError(std::string("letter '") + c + "' is not a surface group generator");
    }
  }
  std::string w = free_reduce(input);
  const auto& cycles = relator_cycles();
  const std::size_t half = kRelator.size() / 2;
  bool changed = true;
  while (changed) {
    changed = false;
    // Longest match first: a piece of length k > half is replaced by the
    // inverse of the remaining 8 - k letters.
    for (std::size_t k = kRelator.size(); k > half && !changed; --k) {
      if (w.size() < k) continue;
      for (std::size_t i = 0; i + k <= w.size() && !changed; ++i) {
        for (const auto& r : cycles) {
          if (w.compare(i, k, r, 0, k) != 0) continue;
          const std::string rest = invert_word(r.substr(k));
          w = free_reduce(w.substr(0, i) + rest + w.substr(i + k));
          changed = true;
          break;
        }
      }
    }
  }
  return w;
}

bool surface_word_is_trivial(const std::string& w) { return dehn_reduce(w).empty(); }

std::string racg_normal_form(const std::string& input, int generators,
                             const std::vector<std::pair<int, int>>& commuting) {
  std::vector<std::vector<char>> comm(generators, std::vector<char>(generators, 0));
  for (auto [i, j] : commuting) {
    if (i < 0 || j < 0 || i >= generators || j >= generators || i == j) {
      throw InputError("invalid commuting pair in the defining graph");
    }
    comm[i][j] = comm[j][i] = 1;
  }
  std::vector<int> w;
  for (char c : input) {
    const int g = c - 'a';
    if (g < 0 || g >= generators) throw InputError(std::string("letter '") + c + "' is not a generator");
    w.push_back(g);
  }
  // Deletion: s u s with u commuting with s collapses to u.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        if (w[j] == w[i]) {
          w.erase(w.begin() + j);
          w.erase(w.begin() + i);
          changed = true;
          break;
        }
        if (!comm[w[i]][w[j]]) break;
      }
    }
  }
  // Lexicographic representative of the commutation class.
  std::string out;
  while (!w.empty()) {
    std::size_t best = 0;
    for (std::size_t p = 0; p < w.size(); ++p) {
      bool movable = true;
      for (std::size_t q = 0; q < p && movable; ++q) movable = comm[w[q]][w[p]];
      if (movable && w[p] < w[best]) best = p;
    }
    out.push_back(static_cast<char>('a' + w[best]));
    w.erase(w.begin() + best);
  }
  return out;
}

}  // namespace coarse
