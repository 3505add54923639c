#include "logsymp/json_io.hpp"

#include <sstream>

namespace logsymp {

namespace {

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  if (!j.contains(key)) throw SchemaError(path + "/" + key, "missing field");
  return j.at(key);
}

std::string string_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

Int int_value(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<Int>();
}

IntVector int_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of integers");
  IntVector out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(int_value(v[i], path + "/" + std::to_string(i)));
  return out;
}

IntMatrix int_matrix(const Json& v, const std::string& path, std::optional<std::size_t> ncols = std::nullopt) {
  if (!v.is_array()) throw SchemaError(path, "expected a matrix (array of rows)");
  IntMatrix out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    IntVector row = int_vector(v[i], path + "/" + std::to_string(i));
    if (ncols && row.size() != *ncols)
      throw SchemaError(path + "/" + std::to_string(i), "row has " + std::to_string(row.size()) + " entries, expected " +
                                                           std::to_string(*ncols));
    out.push_back(std::move(row));
  }
  return out;
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path.empty() ? "/" : path, e.what());
  }
}

std::optional<Leaf> leaf_from_json(const Json& j, const std::string& key, const FgGroup& component,
                                   const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const std::string p = path + "/" + key;
  const Json& l = j.at(key);
  FgGroup g = group_from_json(field(l, "group", p), p + "/group");
  return Leaf{g, hom_from_json(field(l, "iota", p), g, carrier(component), p + "/iota")};
}

Json leaf_to_json(const std::optional<Leaf>& l) {
  if (!l) return nullptr;
  return {{"group", group_to_json(l->group)}, {"iota", hom_to_json(l->iota)}};
}

}  // namespace

FgGroup group_from_json(const Json& j, const std::string& path) {
  const std::string kind = string_field(j, "kind", path);
  return wrap(path, [&] {
    if (kind == "trivial") return FgGroup::trivial();
    if (kind == "free") return FgGroup::free_abelian(static_cast<std::size_t>(int_value(field(j, "rank", path), path + "/rank")));
    if (kind == "abelian") {
      Int rank = int_value(field(j, "rank", path), path + "/rank");
      if (rank < 0) throw SchemaError(path + "/rank", "must be non-negative");
      IntVector torsion = j.contains("torsion") ? int_vector(j.at("torsion"), path + "/torsion") : IntVector{};
      return FgGroup::abelian(static_cast<std::size_t>(rank), torsion);
    }
    if (kind == "mapping_torus") {
      Int n = int_value(field(j, "n", path), path + "/n");
      if (n < 1) throw SchemaError(path + "/n", "must be positive");
      IntMatrix a = int_matrix(field(j, "A", path), path + "/A", static_cast<std::size_t>(n));
      if (a.size() != static_cast<std::size_t>(n)) throw SchemaError(path + "/A", "expected an n x n matrix");
      return FgGroup::mapping_torus(a);
    }
    throw SchemaError(path + "/kind", "unknown group kind '" + kind + "'");
  });
}

Json group_to_json(const FgGroup& g) {
  if (g.is_mapping_torus()) return {{"kind", "mapping_torus"}, {"n", g.fiber_rank()}, {"A", g.monodromy()}};
  return {{"kind", "abelian"}, {"rank", g.rank()}, {"torsion", g.torsion()}};
}

Homomorphism hom_from_json(const Json& j, const FgGroup& source, const FgGroup& target, const std::string& path) {
  const Json& m = j.is_object() ? field(j, "matrix", path) : j;
  const std::string mp = j.is_object() ? path + "/matrix" : path;
  IntMatrix a = int_matrix(m, mp, carrier(target).generator_count());
  return wrap(mp, [&] { return Homomorphism(carrier(source), carrier(target), a); });
}

Json hom_to_json(const Homomorphism& f) { return {{"matrix", f.matrix()}}; }

Subgroup subgroup_from_json(const Json& j, const FgGroup& ambient, const std::string& path) {
  const std::size_t n = ambient.generator_count();
  if (j.is_object() && j.contains("hnf")) {
    IntMatrix rows = int_matrix(j.at("hnf"), path + "/hnf", n);
    Subgroup s = wrap(path, [&] { return canonicalize(ambient, rows); });
    if (s.hnf() != rows)
      throw SchemaError(path + "/hnf", "rows are not a canonical Hermite normal form");
    return s;
  }
  IntMatrix rows = int_matrix(field(j, "generators", path), path + "/generators", n);
  return wrap(path, [&] { return canonicalize(ambient, rows); });
}

Json subgroup_to_json(const Subgroup& h) { return {{"hnf", h.hnf()}}; }

MappingTorusSubgroup mt_subgroup_from_json(const Json& j, const FgGroup& ambient, const std::string& path) {
  if (!ambient.is_mapping_torus()) throw SchemaError(path, "ambient group is not a mapping torus");
  const std::size_t n = ambient.fiber_rank();
  Int m = int_value(field(j, "m", path), path + "/m");
  IntVector w = j.contains("w") ? int_vector(j.at("w"), path + "/w") : IntVector(n, 0);
  if (w.size() != n) throw SchemaError(path + "/w", "expected " + std::to_string(n) + " entries");
  IntMatrix lambda = int_matrix(field(j, "lambda", path), path + "/lambda", n);
  return wrap(path, [&] { return mt_subgroup(ambient, m, w, lambda); });
}

Json mt_subgroup_to_json(const MappingTorusSubgroup& h) {
  return {{"m", h.shift()}, {"w", h.shift_vector()}, {"lambda", h.fiber_lattice()}};
}

GraphOfGroups graph_from_json(const Json& j, const std::string& path) {
  GraphOfGroups g;
  const Json& vs = field(j, "vertices", path);
  if (!vs.is_array()) throw SchemaError(path + "/vertices", "expected an array");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string p = path + "/vertices/" + std::to_string(i);
    g.vertices.push_back({string_field(vs[i], "id", p), group_from_json(field(vs[i], "group", p), p + "/group")});
  }
  auto vertex_group = [&](const std::string& id, const std::string& p) {
    for (const auto& v : g.vertices)
      if (v.id == id) return v.group;
    throw SchemaError(p, "unknown vertex '" + id + "'");
  };
  const Json empty = Json::array();
  const Json& es = j.contains("edges") ? j.at("edges") : empty;
  if (!es.is_array()) throw SchemaError(path + "/edges", "expected an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string p = path + "/edges/" + std::to_string(i);
    GraphEdge e;
    e.id = string_field(es[i], "id", p);
    e.source = string_field(es[i], "source", p);
    e.target = string_field(es[i], "target", p);
    e.group = group_from_json(field(es[i], "group", p), p + "/group");
    e.delta_source = hom_from_json(field(es[i], "deltaSource", p), e.group, vertex_group(e.source, p + "/source"),
                                   p + "/deltaSource");
    e.delta_target = hom_from_json(field(es[i], "deltaTarget", p), e.group, vertex_group(e.target, p + "/target"),
                                   p + "/deltaTarget");
    e.leaf = leaf_from_json(es[i], "leaf", e.group, p);
    g.edges.push_back(std::move(e));
  }
  const Json& hs = j.contains("halfEdges") ? j.at("halfEdges") : empty;
  if (!hs.is_array()) throw SchemaError(path + "/halfEdges", "expected an array");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const std::string p = path + "/halfEdges/" + std::to_string(i);
    GraphHalfEdge h;
    h.id = string_field(hs[i], "id", p);
    h.vertex = string_field(hs[i], "vertex", p);
    h.group = group_from_json(field(hs[i], "group", p), p + "/group");
    if (!h.group.is_abelian()) throw SchemaError(p + "/group", "half-edge groups must be abelian");
    h.w = subgroup_from_json(field(hs[i], "w", p), h.group, p + "/w");
    h.delta = hom_from_json(field(hs[i], "delta", p), w_group(h), vertex_group(h.vertex, p + "/vertex"), p + "/delta");
    h.leaf = leaf_from_json(hs[i], "leaf", h.group, p);
    g.half_edges.push_back(std::move(h));
  }
  return g;
}

Json graph_to_json(const GraphOfGroups& g) {
  Json vs = Json::array(), es = Json::array(), hs = Json::array();
  for (const auto& v : g.vertices) vs.push_back({{"id", v.id}, {"group", group_to_json(v.group)}});
  for (const auto& e : g.edges)
    es.push_back({{"id", e.id},
                  {"source", e.source},
                  {"target", e.target},
                  {"group", group_to_json(e.group)},
                  {"deltaSource", hom_to_json(e.delta_source)},
                  {"deltaTarget", hom_to_json(e.delta_target)},
                  {"leaf", leaf_to_json(e.leaf)}});
  for (const auto& h : g.half_edges)
    hs.push_back({{"id", h.id},
                  {"vertex", h.vertex},
                  {"group", group_to_json(h.group)},
                  {"w", subgroup_to_json(h.w)},
                  {"delta", hom_to_json(h.delta)},
                  {"leaf", leaf_to_json(h.leaf)}});
  return {{"vertices", vs}, {"edges", es}, {"halfEdges", hs}};
}

LocalModel local_model_from_json(const Json& j, const std::string& path) {
  LocalModel m;
  const std::string c = string_field(j, "case", path);
  m.local_case = wrap(path + "/case", [&] { return local_case_from_string(c); });
  m.divisor_group = group_from_json(field(j, "divisorGroup", path), path + "/divisorGroup");
  const Json& sides = field(j, "sideGroups", path);
  const Json& projs = field(j, "projections", path);
  if (!sides.is_array()) throw SchemaError(path + "/sideGroups", "expected an array");
  if (!projs.is_array() || projs.size() != sides.size())
    throw SchemaError(path + "/projections", "expected one projection per side group");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    const std::string sp = path + "/sideGroups/" + std::to_string(i);
    m.side_groups.push_back(group_from_json(sides[i], sp));
    m.projections.push_back(
        hom_from_json(projs[i], m.side_groups.back(), m.divisor_group, path + "/projections/" + std::to_string(i)));
  }
  if (j.contains("leaf") && !j.at("leaf").is_null()) {
    const std::string lp = path + "/leaf";
    FgGroup f = group_from_json(field(j.at("leaf"), "group", lp), lp + "/group");
    m.leaf_inclusion = hom_from_json(field(j.at("leaf"), "iota", lp), f, m.divisor_group, lp + "/iota");
  }
  if (j.contains("bound")) m.bound = int_value(j.at("bound"), path + "/bound");
  return m;
}

Json integration_to_json(const Integration& x) {
  Json subs = Json::object(), fibers = Json::object(), restrictions = Json::array();
  for (std::size_t i = 0; i < x.labels.size(); ++i) subs[x.labels[i]] = subgroup_to_json(x.subgroups[i]);
  for (const auto& [c, s] : x.source_fibers) fibers[c] = subgroup_to_json(s);
  for (const auto& r : x.restrictions)
    restrictions.push_back({{"component", r.component}, {"vertex", r.vertex}, {"subgroup", subgroup_to_json(r.subgroup)}});
  Json out = {{"key", x.key}, {"subgroups", subs}, {"hausdorff", x.hausdorff}, {"sourceFibers", fibers},
              {"restrictions", restrictions}};
  if (!x.hausdorff_failure.empty()) out["hausdorffFailure"] = x.hausdorff_failure;
  return out;
}

Json poset_to_json(const IntegrationPoset& p) {
  Json elements = Json::array(), covers = Json::array();
  for (const auto& x : p.elements) elements.push_back(integration_to_json(x));
  for (auto [a, b] : p.covers) covers.push_back({a, b});
  return {{"mode", p.mode},
          {"bound", p.bound},
          {"elementCount", p.elements.size()},
          {"hausdorffCount", p.hausdorff_count()},
          {"elements", elements},
          {"covers", covers},
          {"minimum", p.minimum ? Json(*p.minimum) : Json(nullptr)},
          {"maximum", p.maximum ? Json(*p.maximum) : Json(nullptr)}};
}

std::string poset_to_dot(const std::vector<std::string>& keys,
                         const std::vector<std::pair<std::size_t, std::size_t>>& covers) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  os << "digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n";
  for (const auto& k : keys) os << "  " << quote(k) << ";\n";
  for (auto [a, b] : covers) os << "  " << quote(keys.at(a)) << " -> " << quote(keys.at(b)) << ";\n";
  os << "}\n";
  return os.str();
}

std::string poset_to_dot(const IntegrationPoset& p) {
  std::vector<std::string> keys;
  for (const auto& x : p.elements) keys.push_back(x.key);
  return poset_to_dot(keys, p.covers);
}

Polynomial polynomial_from_json(const Json& j, const std::vector<std::string>& default_vars, const std::string& path) {
  if (j.is_string())
    return wrap(path, [&] { return parse_polynomial(j.get<std::string>(), default_vars); });
  const Json& vars = field(j, "vars", path);
  if (!vars.is_array()) throw SchemaError(path + "/vars", "expected an array of names");
  const std::size_t n = vars.size();
  if (j.contains("expr")) {
    std::vector<std::string> names;
    for (const auto& v : vars) names.push_back(v.get<std::string>());
    return wrap(path + "/expr", [&] { return parse_polynomial(string_field(j, "expr", path), names); });
  }
  const Json& terms = field(j, "terms", path);
  if (!terms.is_array()) throw SchemaError(path + "/terms", "expected an array");
  Polynomial p(n);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + "/terms/" + std::to_string(i);
    const Json& c = field(terms[i], "coef", tp);
    Rational q = c.is_string() ? wrap(tp + "/coef", [&] { return parse_rational(c.get<std::string>()); })
                               : Rational(int_value(c, tp + "/coef"));
    IntVector e = int_vector(field(terms[i], "exps", tp), tp + "/exps");
    if (e.size() != n) throw SchemaError(tp + "/exps", "expected " + std::to_string(n) + " exponents");
    Exponents ex;
    for (Int k : e) {
      if (k < 0) throw SchemaError(tp + "/exps", "exponents must be non-negative");
      ex.push_back(static_cast<unsigned>(k));
    }
    p = p + Polynomial::monomial(n, ex, q);
  }
  return p;
}

Json polynomial_to_json(const Polynomial& p, const std::vector<std::string>& vars) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"coef", format_rational(c)}, {"exps", e}});
  return {{"vars", vars}, {"terms", terms}, {"text", p.to_string(vars)}};
}

Json multivector_to_json(const Multivector& m, const std::vector<std::string>& vars) {
  Json comps = Json::array();
  for (const auto& [idx, c] : m.components()) comps.push_back({{"indices", idx}, {"coef", polynomial_to_json(c, vars)}});
  return {{"nvars", m.nvars()}, {"degree", m.degree()}, {"components", comps}};
}

SurfaceModel surface_from_json(const Json& j, const std::string& path) {
  SurfaceModel m;
  const std::string mode = string_field(j, "mode", path);
  if (mode == "rp2")
    m.mode = SurfaceMode::RP2Homogeneous;
  else if (mode == "affine")
    m.mode = SurfaceMode::R2Affine;
  else
    throw SchemaError(path + "/mode", "expected \"rp2\" or \"affine\"");
  const std::vector<std::string> vars = m.mode == SurfaceMode::RP2Homogeneous ? std::vector<std::string>{"X", "Y", "Z"}
                                                                              : std::vector<std::string>{"x", "y"};
  m.f = polynomial_from_json(field(j, "f", path), vars, path + "/f");
  if (m.f.nvars() != vars.size())
    throw SchemaError(path + "/f", "expected a polynomial in " + std::to_string(vars.size()) + " variables");
  if (j.contains("resolution")) {
    Int r = int_value(j.at("resolution"), path + "/resolution");
    if (r < 0) throw SchemaError(path + "/resolution", "must be non-negative");
    m.resolution = static_cast<unsigned>(r);
  }
  if (j.contains("box")) {
    const Json& b = j.at("box");
    if (!b.is_array() || b.size() != 4) throw SchemaError(path + "/box", "expected [xmin, xmax, ymin, ymax]");
    for (std::size_t i = 0; i < 4; ++i)
      if (!b[i].is_number()) throw SchemaError(path + "/box/" + std::to_string(i), "expected a number");
    m.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  }
  wrap(path, [&] {
    validate_surface_model(m);
    return 0;
  });
  return m;
}

}  // namespace logsymp
