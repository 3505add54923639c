#include "logsymp/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace logsymp {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Dense labels 0..k-1 in order of first appearance.
std::vector<std::size_t> relabel(const std::vector<std::size_t>& roots, std::size_t& count) {
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto [it, inserted] = ids.emplace(roots[i], ids.size());
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

bool is_homogeneous(const Polynomial& f) {
  int d = -1;
  for (const auto& [e, c] : f.terms()) {
    int s = 0;
    for (unsigned k : e) s += static_cast<int>(k);
    if (d >= 0 && s != d) return false;
    d = s;
  }
  return true;
}

const std::array<double, 3> kPerturbDirection = [] {
  std::array<double, 3> d{0.5377, 0.3183, 0.7812};
  double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  for (auto& v : d) v /= n;
  return d;
}();

std::pair<std::size_t, std::size_t> edge_key(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_surface_model(const SurfaceModel& m) {
  if (m.f.is_zero()) throw std::invalid_argument("surface polynomial is zero");
  if (m.mode == SurfaceMode::RP2Homogeneous) {
    if (m.f.nvars() != 3) throw std::invalid_argument("RP2 mode needs a polynomial in three variables");
    if (!is_homogeneous(m.f)) throw std::invalid_argument("RP2 mode needs a homogeneous polynomial");
    if (m.resolution < 3) throw std::invalid_argument("resolution must be at least 3");
  } else {
    if (m.f.nvars() != 2) throw std::invalid_argument("affine mode needs a polynomial in two variables");
    if (!(m.box.xmax > m.box.xmin && m.box.ymax > m.box.ymin)) throw std::invalid_argument("empty box");
    if (m.resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  }
  if (m.resolution > 10) throw std::invalid_argument("resolution above 10 is not supported");
}

Mesh octahedral_mesh(unsigned level) {
  const int n = 1 << level;
  Mesh mesh;
  std::map<std::array<int, 3>, std::size_t> index;
  std::vector<std::array<int, 3>> keys;
  auto vertex = [&](std::array<int, 3> k) {
    auto [it, inserted] = index.emplace(k, keys.size());
    if (inserted) keys.push_back(k);
    return it->second;
  };
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) {
        auto at = [&](int i, int j) { return vertex({sx * i, sy * j, sz * (n - i - j)}); };
        for (int i = 0; i < n; ++i)
          for (int j = 0; i + j < n; ++j) {
            mesh.triangles.push_back({at(i, j), at(i + 1, j), at(i, j + 1)});
            if (i + j < n - 1) mesh.triangles.push_back({at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
          }
      }
  for (const auto& k : keys) {
    double x = k[0], y = k[1], z = k[2];
    double r = std::sqrt(x * x + y * y + z * z);
    mesh.points.push_back({x / r, y / r, z / r});
  }
  mesh.antipode.resize(keys.size());
  for (std::size_t v = 0; v < keys.size(); ++v) mesh.antipode[v] = index.at({-keys[v][0], -keys[v][1], -keys[v][2]});
  return mesh;
}

Mesh grid_mesh(const Box& box, unsigned level) {
  const std::size_t n = std::size_t{1} << level;
  Mesh mesh;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      mesh.points.push_back({box.xmin + (box.xmax - box.xmin) * static_cast<double>(i) / static_cast<double>(n),
                             box.ymin + (box.ymax - box.ymin) * static_cast<double>(j) / static_cast<double>(n), 0.0});
  auto at = [&](std::size_t i, std::size_t j) { return i * (n + 1) + j; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      mesh.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      mesh.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  return mesh;
}

MeshDecomposition decompose(const SurfaceModel& model) {
  validate_surface_model(model);
  MeshDecomposition d;
  d.mode = model.mode;
  d.level = model.resolution;
  const bool rp2 = model.mode == SurfaceMode::RP2Homogeneous;
  d.mesh = rp2 ? octahedral_mesh(model.resolution) : grid_mesh(model.box, model.resolution);
  const Mesh& mesh = d.mesh;
  const std::size_t nv = mesh.points.size();

  const double scale = rp2 ? 1.0 : std::hypot(model.box.xmax - model.box.xmin, model.box.ymax - model.box.ymin);
  d.perturbation = 1e-9 * scale;
  const bool odd = model.f.total_degree() % 2 == 1;
  auto eval = [&](const std::array<double, 3>& p) {
    return rp2 ? model.f.evaluate({p[0], p[1], p[2]}) : model.f.evaluate({p[0], p[1]});
  };

  d.vertex_sign.assign(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (d.vertex_sign[v] != 0) continue;
    std::array<double, 3> p = mesh.points[v];
    double val = eval(p);
    for (int attempt = 1; val == 0 && attempt <= 4; ++attempt) {
      std::array<double, 3> q = p;
      for (int k = 0; k < 3; ++k) q[k] += attempt * d.perturbation * kPerturbDirection[k];
      val = eval(q);
      if (attempt == 1) ++d.perturbed_vertices;
    }
    if (val == 0) throw std::runtime_error("could not perturb a mesh vertex off the zero set");
    d.vertex_sign[v] = val > 0 ? 1 : -1;
    if (rp2) {
      std::size_t a = mesh.antipode[v];
      d.vertex_sign[a] = odd ? -d.vertex_sign[v] : d.vertex_sign[v];
    }
  }

  // regions: same-sign vertices joined along mesh edges, and across the antipodal map
  UnionFind regions(nv);
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      std::size_t a = t[k], b = t[(k + 1) % 3];
      if (d.vertex_sign[a] == d.vertex_sign[b]) regions.unite(a, b);
    }
  if (rp2)
    for (std::size_t v = 0; v < nv; ++v) regions.unite(v, mesh.antipode[v]);
  std::vector<std::size_t> roots(nv);
  for (std::size_t v = 0; v < nv; ++v) roots[v] = regions.find(v);
  d.vertex_region = relabel(roots, d.region_count);

  // curve lifts: mixed triangles joined across sign-changing edges
  const std::size_t nt = mesh.triangles.size();
  std::vector<std::size_t> mixed;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> changing_edges;
  d.triangle_region.assign(nt, std::nullopt);
  d.triangle_curve.assign(nt, std::nullopt);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const auto& t = mesh.triangles[ti];
    int s0 = d.vertex_sign[t[0]], s1 = d.vertex_sign[t[1]], s2 = d.vertex_sign[t[2]];
    if (s0 == s1 && s1 == s2) {
      d.triangle_region[ti] = d.vertex_region[t[0]];
      continue;
    }
    mixed.push_back(ti);
    for (int k = 0; k < 3; ++k) {
      std::size_t a = t[k], b = t[(k + 1) % 3];
      if (d.vertex_sign[a] != d.vertex_sign[b]) changing_edges[edge_key(a, b)].push_back(ti);
    }
  }
  UnionFind lifts(nt);
  for (const auto& [e, ts] : changing_edges)
    for (std::size_t k = 1; k < ts.size(); ++k) lifts.unite(ts[0], ts[k]);

  std::vector<std::size_t> lift_roots;
  for (auto ti : mixed) lift_roots.push_back(lifts.find(ti));
  std::size_t lift_count = 0;
  auto lift_ids = relabel(lift_roots, lift_count);
  d.curve_lift_of_triangle.assign(nt, SIZE_MAX);
  for (std::size_t k = 0; k < mixed.size(); ++k) d.curve_lift_of_triangle[mixed[k]] = lift_ids[k];

  d.lift_partner.resize(lift_count);
  std::iota(d.lift_partner.begin(), d.lift_partner.end(), 0);
  if (rp2) {
    std::map<std::array<std::size_t, 3>, std::size_t> tri_index;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      auto t = mesh.triangles[ti];
      std::sort(t.begin(), t.end());
      tri_index[t] = ti;
    }
    for (auto ti : mixed) {
      const auto& t = mesh.triangles[ti];
      std::array<std::size_t, 3> a{mesh.antipode[t[0]], mesh.antipode[t[1]], mesh.antipode[t[2]]};
      std::sort(a.begin(), a.end());
      d.lift_partner[d.curve_lift_of_triangle[ti]] = d.curve_lift_of_triangle[tri_index.at(a)];
    }
  }
  std::vector<std::size_t> curve_roots(lift_count);
  for (std::size_t l = 0; l < lift_count; ++l) curve_roots[l] = std::min(l, d.lift_partner[l]);
  d.lift_curve = relabel(curve_roots, d.curve_count);

  std::vector<std::set<std::size_t>> adjacent(d.curve_count);
  for (auto ti : mixed) {
    std::size_t c = d.lift_curve[d.curve_lift_of_triangle[ti]];
    d.triangle_curve[ti] = c;
    for (auto v : mesh.triangles[ti]) adjacent[c].insert(d.vertex_region[v]);
  }
  d.curve_regions.clear();
  for (const auto& s : adjacent) d.curve_regions.emplace_back(s.begin(), s.end());
  return d;
}

bool orientability(const MeshDecomposition& d, std::size_t curve) {
  if (curve >= d.curve_count) throw std::invalid_argument("curve id out of range");
  if (d.mode == SurfaceMode::R2Affine) return true;
  for (std::size_t l = 0; l < d.lift_curve.size(); ++l)
    if (d.lift_curve[l] == curve) return d.lift_partner[l] != l;
  throw std::logic_error("curve without a lift");
}

namespace {

std::string shape_signature(const MeshDecomposition& d) {
  std::vector<std::pair<bool, std::size_t>> shape;
  for (std::size_t c = 0; c < d.curve_count; ++c) shape.emplace_back(orientability(d, c), d.curve_regions[c].size());
  std::sort(shape.begin(), shape.end());
  std::ostringstream os;
  os << "regions=" << d.region_count << " curves=" << d.curve_count << " [";
  for (const auto& [o, k] : shape) os << (o ? "o" : "n") << k << ' ';
  os << ']';
  return os.str();
}

}  // namespace

MeshDecomposition decompose_certified(const SurfaceModel& model) {
  MeshDecomposition d = decompose(model);
  SurfaceModel finer = model;
  finer.resolution = model.resolution + 1;
  MeshDecomposition e = decompose(finer);
  const std::string a = shape_signature(d), b = shape_signature(e);
  d.stability.checked = true;
  d.stability.refined_level = finer.resolution;
  d.stability.stable = a == b;
  d.stability.detail = a == b ? a : a + " vs " + b;
  return d;
}

namespace {

// Regions on the positive and negative side of one lift of a curve.
std::pair<std::set<std::size_t>, std::set<std::size_t>> sides(const MeshDecomposition& d, std::size_t lift) {
  std::set<std::size_t> pos, neg;
  for (std::size_t ti = 0; ti < d.mesh.triangles.size(); ++ti) {
    if (d.curve_lift_of_triangle[ti] != lift) continue;
    for (auto v : d.mesh.triangles[ti]) (d.vertex_sign[v] > 0 ? pos : neg).insert(d.vertex_region[v]);
  }
  return {pos, neg};
}

std::size_t canonical_lift(const MeshDecomposition& d, std::size_t curve) {
  for (std::size_t l = 0; l < d.lift_curve.size(); ++l)
    if (d.lift_curve[l] == curve) return l;
  throw std::logic_error("curve without a lift");
}

}  // namespace

SkeletonGraph extract_graph(const MeshDecomposition& d) {
  SkeletonGraph g;
  for (std::size_t r = 0; r < d.region_count; ++r) g.vertices.push_back("V" + std::to_string(r));
  for (std::size_t c = 0; c < d.curve_count; ++c) {
    if (orientability(d, c)) {
      auto [pos, neg] = sides(d, canonical_lift(d, c));
      if (pos.size() != 1 || neg.size() != 1)
        throw std::runtime_error("curve C" + std::to_string(c) + " touches " + std::to_string(pos.size()) + "+" +
                                 std::to_string(neg.size()) + " regions on its sides; refinement demanded");
      g.edges.push_back({"E" + std::to_string(g.edges.size()), g.vertices[*pos.begin()], g.vertices[*neg.begin()], c});
    } else {
      if (d.curve_regions[c].size() != 1)
        throw std::runtime_error("non-orientable curve C" + std::to_string(c) + " touches " +
                                 std::to_string(d.curve_regions[c].size()) + " regions; refinement demanded");
      g.half_edges.push_back({"H" + std::to_string(g.half_edges.size()), g.vertices[d.curve_regions[c][0]], c});
    }
  }
  return g;
}

namespace {

// A point of the curve: the zero of the linear interpolant on a sign-changing edge.
std::array<double, 3> curve_point(const MeshDecomposition& d, std::size_t lift) {
  for (std::size_t ti = 0; ti < d.mesh.triangles.size(); ++ti) {
    if (d.curve_lift_of_triangle[ti] != lift) continue;
    const auto& t = d.mesh.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      std::size_t a = t[k], b = t[(k + 1) % 3];
      if (d.vertex_sign[a] == d.vertex_sign[b]) continue;
      std::array<double, 3> p;
      for (int i = 0; i < 3; ++i) p[i] = 0.5 * (d.mesh.points[a][i] + d.mesh.points[b][i]);
      return p;
    }
  }
  throw std::logic_error("lift without a sign change");
}

CurveReport curve_report(const SurfaceModel& model, const MeshDecomposition& d, std::size_t c) {
  CurveReport cr;
  cr.id = c;
  cr.orientable = orientability(d, c);
  cr.regions = d.curve_regions[c];
  const std::size_t lift = canonical_lift(d, c);
  if (!cr.orientable) {
    cr.period_note = "one-sided component meets every line, so no affine chart contains it";
    return cr;
  }
  Polynomial g = model.f;
  std::array<double, 2> seed{};
  if (model.mode == SurfaceMode::RP2Homogeneous) {
    // chart X_k = 1 with k maximizing the distance of the lift from that chart's line at infinity
    std::array<double, 3> clearance{1e300, 1e300, 1e300};
    for (std::size_t ti = 0; ti < d.mesh.triangles.size(); ++ti) {
      if (d.curve_lift_of_triangle[ti] != lift) continue;
      for (auto v : d.mesh.triangles[ti])
        for (int k = 0; k < 3; ++k) clearance[k] = std::min(clearance[k], std::abs(d.mesh.points[v][k]));
    }
    const int k = static_cast<int>(std::max_element(clearance.begin(), clearance.end()) - clearance.begin());
    if (clearance[k] < 0.05) {
      cr.period_note = "component meets the line at infinity of every coordinate chart";
      return cr;
    }
    // chart coordinates (X_{k+1}/X_k, X_{k+2}/X_k) keep the orientation of the (x, y) chart
    std::vector<Polynomial> sub(3);
    sub[k] = Polynomial::constant(2, 1);
    sub[(k + 1) % 3] = Polynomial::variable(2, 0);
    sub[(k + 2) % 3] = Polynomial::variable(2, 1);
    g = model.f.substitute(sub);
    auto p = curve_point(d, lift);
    seed = {p[(k + 1) % 3] / p[k], p[(k + 2) % 3] / p[k]};
  } else {
    auto p = curve_point(d, lift);
    seed = {p[0], p[1]};
  }
  try {
    FlowPeriod fp = modular_period_flow(g, seed);
    if (fp.outcome == FlowOutcome::Closed) cr.period = fp.period;
    else cr.period_note = "non-compact component: " + fp.note;
  } catch (const std::exception& e) {
    cr.period_note = std::string("period flow failed: ") + e.what();
  }
  return cr;
}

}  // namespace

PoissonGraphReport analyze_surface(const SurfaceModel& model) {
  PoissonGraphReport r;
  validate_surface_model(model);
  r.transversality = model.mode == SurfaceMode::RP2Homogeneous ? transversality_sample_check_rp2(model.f, 201)
                                                               : transversality_sample_check(model.f, model.box, 201);
  r.decomposition = decompose_certified(model);
  for (std::size_t c = 0; c < r.decomposition.curve_count; ++c) r.curves.push_back(curve_report(model, r.decomposition, c));
  r.graph = extract_graph(r.decomposition);
  return r;
}

nlohmann::json report_to_json(const PoissonGraphReport& r) {
  using nlohmann::json;
  const auto& d = r.decomposition;
  json out;
  out["mode"] = d.mode == SurfaceMode::RP2Homogeneous ? "rp2" : "affine";
  out["resolution"] = d.level;
  json regions = json::array();
  std::vector<std::size_t> size(d.region_count, 0);
  std::vector<std::set<int>> signs(d.region_count);
  for (std::size_t v = 0; v < d.vertex_region.size(); ++v) {
    ++size[d.vertex_region[v]];
    signs[d.vertex_region[v]].insert(d.vertex_sign[v]);
  }
  for (std::size_t i = 0; i < d.region_count; ++i) {
    json reg{{"id", "V" + std::to_string(i)}, {"meshVertices", size[i]}};
    reg["sign"] = signs[i].size() == 1 ? json(*signs[i].begin()) : json(nullptr);
    regions.push_back(reg);
  }
  out["regions"] = regions;
  json curves = json::array();
  for (const auto& c : r.curves) {
    json jc{{"id", "C" + std::to_string(c.id)}, {"orientable", c.orientable}};
    jc["period"] = c.period ? json(*c.period) : json(nullptr);
    if (!c.period_note.empty()) jc["periodNote"] = c.period_note;
    json adj = json::array();
    for (auto reg : c.regions) adj.push_back("V" + std::to_string(reg));
    jc["regions"] = adj;
    curves.push_back(jc);
  }
  out["curves"] = curves;
  json graph;
  graph["vertices"] = r.graph.vertices;
  graph["edges"] = json::array();
  for (const auto& e : r.graph.edges)
    graph["edges"].push_back({{"id", e.id}, {"source", e.source}, {"target", e.target}, {"curve", "C" + std::to_string(e.curve)}});
  graph["halfEdges"] = json::array();
  for (const auto& h : r.graph.half_edges)
    graph["halfEdges"].push_back({{"id", h.id}, {"vertex", h.vertex}, {"curve", "C" + std::to_string(h.curve)}});
  out["graph"] = graph;
  out["stability"] = {{"checked", d.stability.checked},
                      {"stable", d.stability.stable},
                      {"refinedLevel", d.stability.refined_level},
                      {"detail", d.stability.detail}};
  out["perturbation"] = {{"vertices", d.perturbed_vertices}, {"epsilon", d.perturbation}};
  json suspects = json::array();
  for (std::size_t i = 0; i < r.transversality.suspects.size() && i < 20; ++i)
    suspects.push_back({r.transversality.suspects[i][0], r.transversality.suspects[i][1]});
  out["transversality"] = {{"ok", r.transversality.ok},
                           {"certification", r.transversality.certification},
                           {"samples", r.transversality.samples},
                           {"suspects", suspects}};
  return out;
}

std::string mesh_to_obj(const MeshDecomposition& d) {
  std::ostringstream os;
  os << "# regions " << d.region_count << " curves " << d.curve_count << '\n';
  for (const auto& p : d.mesh.points) os << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t ti = 0; ti < d.mesh.triangles.size(); ++ti) {
    std::string g = d.triangle_curve[ti] ? "curve_C" + std::to_string(*d.triangle_curve[ti])
                                         : "region_V" + std::to_string(*d.triangle_region[ti]);
    groups[g].push_back(ti);
  }
  for (const auto& [name, tris] : groups) {
    os << "g " << name << '\n';
    for (auto ti : tris) {
      const auto& t = d.mesh.triangles[ti];
      os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
  }
  return os.str();
}

}  // namespace logsymp
