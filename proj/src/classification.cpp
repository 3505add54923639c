#include "logsymp/classification.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace logsymp {

FgGroup carrier(const FgGroup& g) {
  return g.is_mapping_torus() ? FgGroup::free_abelian(g.fiber_rank()) : g;
}

const GraphVertex& GraphOfGroups::vertex(const std::string& id) const { return vertices[vertex_index(id)]; }

std::size_t GraphOfGroups::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return i;
  throw std::invalid_argument("unknown vertex id '" + id + "'");
}

bool GraphOfGroups::has_mapping_torus() const {
  auto mt = [](const FgGroup& g) { return g.is_mapping_torus(); };
  return std::any_of(vertices.begin(), vertices.end(), [&](const auto& v) { return mt(v.group); }) ||
         std::any_of(edges.begin(), edges.end(), [&](const auto& e) { return mt(e.group); }) ||
         std::any_of(half_edges.begin(), half_edges.end(), [&](const auto& h) { return mt(h.group); });
}

FgGroup w_group(const GraphHalfEdge& h) { return FgGroup::free_abelian(h.w.hnf().size()); }

Homomorphism w_inclusion(const GraphHalfEdge& h) { return Homomorphism(w_group(h), h.group, h.w.hnf()); }

const Subgroup& Integration::at(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return subgroups[i];
  throw std::invalid_argument("integration has no component '" + label + "'");
}

std::size_t IntegrationPoset::hausdorff_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const Integration& x) { return x.hausdorff; }));
}

ValidationReport validate_graph(const GraphOfGroups& g, GraphMode mode) {
  ValidationReport r;
  auto bad = [&](const std::string& msg) { r.violations.push_back(msg); };

  std::set<std::string> vertex_ids, component_ids;
  for (const auto& v : g.vertices) {
    if (v.id.empty()) bad("vertex with empty id");
    if (!vertex_ids.insert(v.id).second) bad("duplicate vertex id '" + v.id + "'");
  }
  auto check_hom = [&](const std::string& where, const Homomorphism& f, const FgGroup& src, const FgGroup& dst) {
    if (!(f.source() == carrier(src))) bad(where + ": source does not match " + src.describe());
    if (!(f.target() == carrier(dst))) bad(where + ": target does not match " + dst.describe());
  };
  auto check_leaf = [&](const std::string& where, const std::optional<Leaf>& leaf, const FgGroup& group) {
    if (!leaf) {
      if (mode == GraphMode::LogSymplectic) bad(where + ": missing leaf data (iota)");
      return;
    }
    if (!(leaf->iota.source() == leaf->group)) bad(where + ": iota source does not match leaf group");
    if (!(leaf->iota.target() == carrier(group))) bad(where + ": iota target does not match component group");
  };

  for (const auto& e : g.edges) {
    const std::string where = "edge '" + e.id + "'";
    if (!component_ids.insert(e.id).second) bad("duplicate component id '" + e.id + "'");
    bool ends_ok = true;
    for (const auto* end : {&e.source, &e.target}) {
      if (!vertex_ids.count(*end)) {
        bad(where + ": unknown endpoint '" + *end + "'");
        ends_ok = false;
      }
    }
    if (ends_ok) {
      check_hom(where + " delta to '" + e.source + "'", e.delta_source, e.group, g.vertex(e.source).group);
      check_hom(where + " delta to '" + e.target + "'", e.delta_target, e.group, g.vertex(e.target).group);
    }
    check_leaf(where, e.leaf, e.group);
  }

  for (const auto& h : g.half_edges) {
    const std::string where = "half-edge '" + h.id + "'";
    if (!component_ids.insert(h.id).second) bad("duplicate component id '" + h.id + "'");
    if (!h.group.is_abelian() || !h.group.is_torsion_free()) {
      bad(where + ": half-edge group must be free abelian");
      continue;
    }
    if (!(h.w.ambient() == h.group)) {
      bad(where + ": W is not a subgroup of the half-edge group");
      continue;
    }
    auto idx = index(h.w);
    if (!idx || *idx != 2) bad(where + ": W must have index 2, found " + (idx ? std::to_string(*idx) : "infinite"));
    if (!vertex_ids.count(h.vertex)) {
      bad(where + ": unknown vertex '" + h.vertex + "'");
    } else {
      if (!(h.delta.source() == w_group(h))) bad(where + ": delta must be defined on W");
      if (!(h.delta.target() == carrier(g.vertex(h.vertex).group)))
        bad(where + ": delta target does not match vertex group");
    }
    check_leaf(where, h.leaf, h.group);
  }
  return r;
}

bool integration_leq(const Integration& a, const Integration& b) {
  if (a.labels != b.labels) return false;
  for (std::size_t i = 0; i < a.subgroups.size(); ++i)
    if (!is_subset(a.subgroups[i], b.subgroups[i])) return false;
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> poset_hasse(
    std::size_t n, const std::function<bool(std::size_t, std::size_t)>& leq) {
  std::vector<std::vector<char>> lt(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) lt[a][b] = a != b && leq(a, b) && !leq(b, a);
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (!lt[a][b]) continue;
      bool direct = true;
      for (std::size_t c = 0; c < n && direct; ++c)
        if (lt[a][c] && lt[c][b]) direct = false;
      if (direct) covers.emplace_back(a, b);
    }
  }
  return covers;
}

void finalize_poset(IntegrationPoset& p) {
  for (auto& x : p.elements) {
    std::ostringstream key;
    for (std::size_t i = 0; i < x.labels.size(); ++i)
      key << (i ? ";" : "") << x.labels[i] << '=' << format_subgroup(x.subgroups[i]);
    x.key = key.str();
  }
  auto canon = [](const Integration& x) {
    std::vector<IntMatrix> v;
    for (const auto& s : x.subgroups) v.push_back(s.hnf());
    return v;
  };
  std::sort(p.elements.begin(), p.elements.end(),
            [&](const Integration& a, const Integration& b) { return canon(a) < canon(b); });
  const std::size_t n = p.elements.size();
  std::vector<std::vector<char>> leq(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) leq[a][b] = integration_leq(p.elements[a], p.elements[b]);
  p.covers = poset_hasse(n, [&](std::size_t a, std::size_t b) { return leq[a][b] != 0; });
  p.minimum.reset();
  p.maximum.reset();
  for (std::size_t a = 0; a < n; ++a) {
    bool lo = true, hi = true;
    for (std::size_t b = 0; b < n; ++b) {
      lo = lo && leq[a][b];
      hi = hi && leq[b][a];
    }
    if (lo) p.minimum = a;
    if (hi) p.maximum = a;
  }
}

namespace {

void require_valid(const GraphOfGroups& g, GraphMode mode) {
  auto r = validate_graph(g, mode);
  if (!r.valid()) {
    std::string msg = "invalid graph of groups:";
    for (const auto& v : r.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
}

void require_abelian_graph(const GraphOfGroups& g) {
  if (g.has_mapping_torus())
    throw std::invalid_argument("graph contains mapping-torus groups; use verify_integration_mt");
}

// Odometer over the cartesian product of candidate lists.
void for_each_choice(const std::vector<std::vector<Subgroup>>& lists,
                     const std::function<void(const std::vector<Subgroup>&)>& fn) {
  for (const auto& l : lists)
    if (l.empty()) return;
  std::vector<std::size_t> idx(lists.size(), 0);
  std::vector<Subgroup> pick(lists.size());
  while (true) {
    for (std::size_t k = 0; k < lists.size(); ++k) pick[k] = lists[k][idx[k]];
    fn(pick);
    std::size_t k = 0;
    while (k < lists.size() && ++idx[k] == lists[k].size()) idx[k++] = 0;
    if (k == lists.size()) return;
  }
}

std::vector<Subgroup> half_edge_candidates(const GraphHalfEdge& h, Int bound) {
  const Homomorphism inc = w_inclusion(h);
  std::vector<Subgroup> out;
  for (const auto& s : enumerate_subgroups(w_group(h), bound, true)) out.push_back(image(inc, s));
  return out;
}

using VertexChoice = std::map<std::string, Subgroup>;

// preimage of K_i under the edge map on one side.
Subgroup edge_pull(const GraphEdge& e, bool target_side, const Subgroup& k) {
  return preimage(target_side ? e.delta_target : e.delta_source, k);
}

// delta^{-1}(K_i) inside W, pushed into the half-edge group.
Subgroup half_edge_pull(const GraphHalfEdge& h, const Subgroup& k) {
  return image(w_inclusion(h), preimage(h.delta, k));
}

Subgroup leaf_restriction(const Leaf& leaf, const Subgroup& in_component) {
  return preimage(leaf.iota, in_component);
}

std::optional<std::string> logtan_hausdorff_failure(const GraphOfGroups& g, const VertexChoice& kv,
                                                    const Integration& x) {
  for (const auto& e : g.edges) {
    const Subgroup& k = x.at("E:" + e.id);
    if (!(k == edge_pull(e, false, kv.at(e.source))))
      return "E:" + e.id + " differs from the pullback of V:" + e.source;
    if (!(k == edge_pull(e, true, kv.at(e.target))))
      return "E:" + e.id + " differs from the pullback of V:" + e.target;
  }
  for (const auto& h : g.half_edges) {
    if (!(x.at("H:" + h.id) == half_edge_pull(h, kv.at(h.vertex))))
      return "H:" + h.id + " differs from the pullback of V:" + h.vertex + " in W";
  }
  return std::nullopt;
}

VertexChoice vertex_choice(const GraphOfGroups& g, const Integration& x) {
  VertexChoice kv;
  for (const auto& v : g.vertices) kv.emplace(v.id, x.at("V:" + v.id));
  return kv;
}

void add_restrictions(const GraphOfGroups& g, const VertexChoice& kv, Integration& x) {
  for (const auto& e : g.edges) {
    x.restrictions.push_back({e.id, e.source, edge_pull(e, false, kv.at(e.source))});
    x.restrictions.push_back({e.id, e.target, edge_pull(e, true, kv.at(e.target))});
  }
  for (const auto& h : g.half_edges) x.restrictions.push_back({h.id, h.vertex, half_edge_pull(h, kv.at(h.vertex))});
}

void add_source_fibers(const GraphOfGroups& g, GraphMode mode, Integration& x) {
  for (const auto& e : g.edges) x.source_fibers.emplace_back(e.id, source_fiber_group(g, mode, x, e.id));
  for (const auto& h : g.half_edges) x.source_fibers.emplace_back(h.id, source_fiber_group(g, mode, x, h.id));
}

std::vector<std::vector<Subgroup>> vertex_candidates(const GraphOfGroups& g, Int bound) {
  std::vector<std::vector<Subgroup>> lists;
  for (const auto& v : g.vertices) lists.push_back(enumerate_subgroups(v.group, bound, true));
  return lists;
}

}  // namespace

IntegrationPoset classify_logtan(const GraphOfGroups& g, Int bound) {
  require_valid(g, GraphMode::LogTangent);
  require_abelian_graph(g);
  IntegrationPoset p;
  p.mode = "logtan";
  p.bound = bound;

  std::vector<std::vector<Subgroup>> edge_cands, half_cands;
  for (const auto& e : g.edges) edge_cands.push_back(enumerate_subgroups(e.group, bound, true));
  for (const auto& h : g.half_edges) half_cands.push_back(half_edge_candidates(h, bound));

  for_each_choice(vertex_candidates(g, bound), [&](const std::vector<Subgroup>& vs) {
    VertexChoice kv;
    for (std::size_t i = 0; i < vs.size(); ++i) kv.emplace(g.vertices[i].id, vs[i]);

    std::vector<std::vector<Subgroup>> allowed;
    for (std::size_t j = 0; j < g.edges.size(); ++j) {
      const auto& e = g.edges[j];
      Subgroup bound_set = intersect(edge_pull(e, false, kv.at(e.source)), edge_pull(e, true, kv.at(e.target)));
      std::vector<Subgroup> ok;
      for (const auto& k : edge_cands[j])
        if (is_subset(k, bound_set)) ok.push_back(k);
      allowed.push_back(std::move(ok));
    }
    for (std::size_t j = 0; j < g.half_edges.size(); ++j) {
      const auto& h = g.half_edges[j];
      Subgroup bound_set = half_edge_pull(h, kv.at(h.vertex));
      std::vector<Subgroup> ok;
      for (const auto& k : half_cands[j])
        if (is_subset(k, bound_set)) ok.push_back(k);
      allowed.push_back(std::move(ok));
    }

    auto emit = [&](const std::vector<Subgroup>& comps) {
      Integration x;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        x.labels.push_back("V:" + g.vertices[i].id);
        x.subgroups.push_back(vs[i]);
      }
      for (std::size_t j = 0; j < g.edges.size(); ++j) {
        x.labels.push_back("E:" + g.edges[j].id);
        x.subgroups.push_back(comps[j]);
      }
      for (std::size_t j = 0; j < g.half_edges.size(); ++j) {
        x.labels.push_back("H:" + g.half_edges[j].id);
        x.subgroups.push_back(comps[g.edges.size() + j]);
      }
      auto fail = logtan_hausdorff_failure(g, kv, x);
      x.hausdorff = !fail;
      x.hausdorff_failure = fail.value_or("");
      add_restrictions(g, kv, x);
      add_source_fibers(g, GraphMode::LogTangent, x);
      p.elements.push_back(std::move(x));
    };
    if (allowed.empty()) {
      emit({});
    } else {
      for_each_choice(allowed, emit);
    }
  });
  finalize_poset(p);
  return p;
}

IntegrationPoset hausdorff_filter_logtan(const IntegrationPoset& p, const GraphOfGroups& g) {
  if (p.mode != "logtan") throw std::invalid_argument("hausdorff_filter_logtan: poset was not produced in logtan mode");
  IntegrationPoset out;
  out.mode = "logtan-hausdorff";
  out.bound = p.bound;
  for (const auto& x : p.elements) {
    auto fail = logtan_hausdorff_failure(g, vertex_choice(g, x), x);
    if (!fail) out.elements.push_back(x);
  }
  finalize_poset(out);
  return out;
}

IntegrationPoset classify_logsymp_hausdorff(const GraphOfGroups& g, Int bound) {
  require_valid(g, GraphMode::LogSymplectic);
  require_abelian_graph(g);
  IntegrationPoset p;
  p.mode = "logsymp-hausdorff";
  p.bound = bound;
  for_each_choice(vertex_candidates(g, bound), [&](const std::vector<Subgroup>& vs) {
    VertexChoice kv;
    for (std::size_t i = 0; i < vs.size(); ++i) kv.emplace(g.vertices[i].id, vs[i]);
    for (const auto& e : g.edges) {
      if (!(leaf_restriction(*e.leaf, edge_pull(e, false, kv.at(e.source))) ==
            leaf_restriction(*e.leaf, edge_pull(e, true, kv.at(e.target)))))
        return;
    }
    Integration x;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      x.labels.push_back("V:" + g.vertices[i].id);
      x.subgroups.push_back(vs[i]);
    }
    x.hausdorff = true;
    add_restrictions(g, kv, x);
    add_source_fibers(g, GraphMode::LogSymplectic, x);
    p.elements.push_back(std::move(x));
  });
  finalize_poset(p);
  return p;
}

Subgroup source_fiber_group(const GraphOfGroups& g, GraphMode mode, const Integration& x,
                            const std::string& component) {
  for (const auto& e : g.edges) {
    if (e.id != component) continue;
    if (mode == GraphMode::LogTangent) return x.at("E:" + e.id);
    if (!e.leaf) throw std::invalid_argument("edge '" + e.id + "' has no leaf data");
    Subgroup a = leaf_restriction(*e.leaf, edge_pull(e, false, x.at("V:" + e.source)));
    Subgroup b = leaf_restriction(*e.leaf, edge_pull(e, true, x.at("V:" + e.target)));
    if (!(a == b))
      throw std::logic_error("source fiber over '" + e.id + "' differs between its two sides: " +
                             format_subgroup(a) + " vs " + format_subgroup(b));
    return a;
  }
  for (const auto& h : g.half_edges) {
    if (h.id != component) continue;
    if (mode == GraphMode::LogTangent) return x.at("H:" + h.id);
    if (!h.leaf) throw std::invalid_argument("half-edge '" + h.id + "' has no leaf data");
    return leaf_restriction(*h.leaf, half_edge_pull(h, x.at("V:" + h.vertex)));
  }
  throw std::invalid_argument("unknown component '" + component + "'");
}

SscReport ssc_hausdorff_check(const GraphOfGroups& g) {
  require_valid(g, GraphMode::LogSymplectic);
  SscReport r;
  auto record = [&](const std::string& comp, const std::string& vertex, const Subgroup& ker) {
    IntMatrix gens = nontrivial_generators(ker);
    if (gens.empty()) return;
    r.hausdorff = false;
    r.witnesses.push_back({comp, vertex, gens});
  };
  for (const auto& e : g.edges) {
    record(e.id, e.source, kernel(e.leaf->iota.then(e.delta_source)));
    record(e.id, e.target, kernel(e.leaf->iota.then(e.delta_target)));
  }
  for (const auto& h : g.half_edges) {
    Subgroup ker_in_group = image(w_inclusion(h), kernel(h.delta));
    record(h.id, h.vertex, preimage(h.leaf->iota, ker_in_group));
  }
  return r;
}

MtVerification verify_integration_mt(const GraphOfGroups& g,
                                     const std::map<std::string, MappingTorusSubgroup>& family) {
  require_valid(g, GraphMode::LogSymplectic);
  MtVerification out;
  bool ok = true;
  for (const auto& v : g.vertices) {
    auto it = family.find(v.id);
    if (it == family.end()) throw std::invalid_argument("no candidate subgroup for vertex '" + v.id + "'");
    if (!(it->second.ambient() == v.group))
      throw std::invalid_argument("candidate for vertex '" + v.id + "' lives in a different group");
    if (auto fail = mt_normality_failure(it->second))
      throw std::invalid_argument("candidate for vertex '" + v.id + "' is not normal: " + *fail);
    out.report.push_back("V:" + v.id + " fiber " + format_subgroup(mt_fiber(it->second)));
  }
  for (const auto& e : g.edges) {
    Subgroup a = leaf_restriction(*e.leaf, edge_pull(e, false, mt_fiber(family.at(e.source))));
    Subgroup b = leaf_restriction(*e.leaf, edge_pull(e, true, mt_fiber(family.at(e.target))));
    bool same = a == b;
    ok = ok && same;
    out.report.push_back("E:" + e.id + " " + e.source + "->" + format_subgroup(a) + " " + e.target + "->" +
                         format_subgroup(b) + (same ? " agree" : " differ"));
  }
  out.accepted = ok;
  return out;
}

std::vector<std::string> audit_integration(const GraphOfGroups& g, GraphMode mode, const Integration& x) {
  std::vector<std::string> fails;
  std::vector<std::string> expected;
  for (const auto& v : g.vertices) expected.push_back("V:" + v.id);
  if (mode == GraphMode::LogTangent) {
    for (const auto& e : g.edges) expected.push_back("E:" + e.id);
    for (const auto& h : g.half_edges) expected.push_back("H:" + h.id);
  }
  if (x.labels != expected || x.subgroups.size() != expected.size()) {
    fails.push_back("component labels do not match the graph");
    return fails;
  }
  for (const auto& v : g.vertices)
    if (!(x.at("V:" + v.id).ambient() == v.group)) fails.push_back("V:" + v.id + " lives in the wrong group");
  if (!fails.empty()) return fails;

  if (mode == GraphMode::LogTangent) {
    bool hausdorff = true;
    for (const auto& e : g.edges) {
      const Subgroup& k = x.at("E:" + e.id);
      if (!(k.ambient() == e.group)) {
        fails.push_back("E:" + e.id + " lives in the wrong group");
        continue;
      }
      for (bool side : {false, true}) {
        const std::string& vid = side ? e.target : e.source;
        Subgroup pull = edge_pull(e, side, x.at("V:" + vid));
        if (!is_subset(k, pull)) fails.push_back("E:" + e.id + " is not inside the pullback of V:" + vid);
        hausdorff = hausdorff && k == pull;
      }
    }
    for (const auto& h : g.half_edges) {
      const Subgroup& k = x.at("H:" + h.id);
      if (!(k.ambient() == h.group)) {
        fails.push_back("H:" + h.id + " lives in the wrong group");
        continue;
      }
      if (!is_subset(k, h.w)) fails.push_back("H:" + h.id + " is not inside W");
      Subgroup pull = half_edge_pull(h, x.at("V:" + h.vertex));
      if (!is_subset(k, pull)) fails.push_back("H:" + h.id + " is not inside the pullback of V:" + h.vertex);
      hausdorff = hausdorff && k == pull;
    }
    if (fails.empty() && hausdorff != x.hausdorff) fails.push_back("hausdorff flag disagrees with the equality test");
  } else {
    for (const auto& e : g.edges) {
      Subgroup a = leaf_restriction(*e.leaf, edge_pull(e, false, x.at("V:" + e.source)));
      Subgroup b = leaf_restriction(*e.leaf, edge_pull(e, true, x.at("V:" + e.target)));
      if (!(a == b)) fails.push_back("E:" + e.id + " leaf restrictions differ");
    }
    if (!x.hausdorff) fails.push_back("log symplectic elements must be Hausdorff");
  }
  if (!fails.empty()) return fails;
  for (const auto& [comp, fiber] : x.source_fibers) {
    if (!(source_fiber_group(g, mode, x, comp) == fiber)) fails.push_back("source fiber over " + comp + " is stale");
  }
  return fails;
}

std::string to_string(LocalCase c) {
  switch (c) {
    case LocalCase::LogTanOrientable: return "logtan-or";
    case LocalCase::LogTanNonOrientable: return "logtan-nonor";
    case LocalCase::LogSympOrientable: return "logsymp-or";
    case LocalCase::LogSympNonOrientable: return "logsymp-nonor";
  }
  return "logtan-or";
}

LocalCase local_case_from_string(const std::string& s) {
  for (auto c : {LocalCase::LogTanOrientable, LocalCase::LogTanNonOrientable, LocalCase::LogSympOrientable,
                 LocalCase::LogSympNonOrientable})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown local case '" + s + "'");
}

namespace {

bool orientable(LocalCase c) { return c == LocalCase::LogTanOrientable || c == LocalCase::LogSympOrientable; }
bool symplectic(LocalCase c) { return c == LocalCase::LogSympOrientable || c == LocalCase::LogSympNonOrientable; }

std::vector<std::string> local_labels(LocalCase c) {
  switch (c) {
    case LocalCase::LogTanOrientable: return {"K+", "K", "K-"};
    case LocalCase::LogTanNonOrientable: return {"K'", "K"};
    case LocalCase::LogSympOrientable: return {"K+", "K-"};
    case LocalCase::LogSympNonOrientable: return {"K'"};
  }
  return {};
}

struct LocalVerdict {
  bool admissible = true;
  std::optional<std::string> hausdorff_failure;
  Subgroup fiber;
};

LocalVerdict judge_local(const LocalModel& m, const std::vector<Subgroup>& k) {
  LocalVerdict v;
  auto push = [&](std::size_t side, const Subgroup& s) { return image(m.projections[side], s); };
  switch (m.local_case) {
    case LocalCase::LogTanOrientable: {
      Subgroup up = push(0, k[0]), down = push(1, k[2]);
      v.admissible = is_subset(k[1], up) && is_subset(k[1], down);
      if (!(k[1] == up)) v.hausdorff_failure = "K differs from r_*K+";
      else if (!(k[1] == down)) v.hausdorff_failure = "K differs from r_*K-";
      v.fiber = k[1];
      break;
    }
    case LocalCase::LogTanNonOrientable: {
      Subgroup up = push(0, k[0]);
      v.admissible = is_subset(k[1], up);
      if (!(k[1] == up)) v.hausdorff_failure = "K differs from r_*K'";
      v.fiber = k[1];
      break;
    }
    case LocalCase::LogSympOrientable: {
      Subgroup a = preimage(*m.leaf_inclusion, push(0, k[0]));
      Subgroup b = preimage(*m.leaf_inclusion, push(1, k[1]));
      v.admissible = a == b;
      v.fiber = a;
      break;
    }
    case LocalCase::LogSympNonOrientable:
      v.fiber = preimage(*m.leaf_inclusion, push(0, k[0]));
      break;
  }
  return v;
}

}  // namespace

std::vector<std::string> validate_local(const LocalModel& m) {
  std::vector<std::string> bad;
  const std::size_t sides = orientable(m.local_case) ? 2 : 1;
  if (!m.divisor_group.is_abelian()) bad.push_back("divisor group must be abelian");
  if (m.side_groups.size() != sides) bad.push_back("expected " + std::to_string(sides) + " side group(s)");
  if (m.projections.size() != sides) bad.push_back("expected " + std::to_string(sides) + " projection(s)");
  for (std::size_t i = 0; i < std::min(m.side_groups.size(), m.projections.size()); ++i) {
    if (!(m.projections[i].source() == m.side_groups[i])) bad.push_back("projection source does not match side group");
    if (!(m.projections[i].target() == m.divisor_group)) bad.push_back("projection target must be the divisor group");
  }
  if (symplectic(m.local_case)) {
    if (!m.leaf_inclusion) bad.push_back("log symplectic case needs the leaf inclusion");
    else if (!(m.leaf_inclusion->target() == m.divisor_group))
      bad.push_back("leaf inclusion must land in the divisor group");
  }
  if (m.bound < 1) bad.push_back("bound must be at least 1");
  return bad;
}

IntegrationPoset classify_local(const LocalModel& m) {
  auto bad = validate_local(m);
  if (!bad.empty()) {
    std::string msg = "invalid local model:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw std::invalid_argument(msg);
  }
  std::vector<std::vector<Subgroup>> lists;
  switch (m.local_case) {
    case LocalCase::LogTanOrientable:
      lists = {enumerate_subgroups(m.side_groups[0], m.bound, true), enumerate_subgroups(m.divisor_group, m.bound, true),
               enumerate_subgroups(m.side_groups[1], m.bound, true)};
      break;
    case LocalCase::LogTanNonOrientable:
      lists = {enumerate_subgroups(m.side_groups[0], m.bound, true),
               enumerate_subgroups(m.divisor_group, m.bound, true)};
      break;
    case LocalCase::LogSympOrientable:
      lists = {enumerate_subgroups(m.side_groups[0], m.bound, true),
               enumerate_subgroups(m.side_groups[1], m.bound, true)};
      break;
    case LocalCase::LogSympNonOrientable:
      lists = {enumerate_subgroups(m.side_groups[0], m.bound, true)};
      break;
  }
  IntegrationPoset p;
  p.mode = "local:" + to_string(m.local_case);
  p.bound = m.bound;
  const auto labels = local_labels(m.local_case);
  for_each_choice(lists, [&](const std::vector<Subgroup>& k) {
    LocalVerdict v = judge_local(m, k);
    if (!v.admissible) return;
    Integration x;
    x.labels = labels;
    x.subgroups = k;
    x.hausdorff = !v.hausdorff_failure;
    x.hausdorff_failure = v.hausdorff_failure.value_or("");
    x.source_fibers.emplace_back("D", v.fiber);
    p.elements.push_back(std::move(x));
  });
  finalize_poset(p);
  return p;
}

std::vector<std::string> audit_local(const LocalModel& m, const Integration& x) {
  std::vector<std::string> fails;
  if (x.labels != local_labels(m.local_case)) return {"component labels do not match the local case"};
  LocalVerdict v = judge_local(m, x.subgroups);
  if (!v.admissible) fails.push_back("local conditions fail");
  if (x.hausdorff != !v.hausdorff_failure) fails.push_back("hausdorff flag disagrees with the equality test");
  if (x.source_fibers.size() != 1 || !(x.source_fibers[0].second == v.fiber)) fails.push_back("source fiber is stale");
  return fails;
}

}  // namespace logsymp
