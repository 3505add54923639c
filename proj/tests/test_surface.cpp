#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "logsymp/periods.hpp"
#include "logsymp/surface.hpp"
#include "oracles.hpp"

using namespace logsymp;

namespace {

const std::vector<std::string> XYZ{"X", "Y", "Z"};
const std::vector<std::string> XY{"x", "y"};

SurfaceModel rp2(const std::string& f, unsigned level = 5) {
  SurfaceModel m;
  m.mode = SurfaceMode::RP2Homogeneous;
  m.f = parse_polynomial(f, XYZ);
  m.resolution = level;
  return m;
}

SurfaceModel affine(const std::string& f, unsigned level = 6) {
  SurfaceModel m;
  m.mode = SurfaceMode::R2Affine;
  m.f = parse_polynomial(f, XY);
  m.resolution = level;
  return m;
}

const std::string kEllipticRP2 = "X*(X-Z)*(X-Z/2) - Y^2*Z";

}  // namespace

TEST_CASE("elliptic period by AGM against the series and quadrature") {
  CHECK(std::abs(modular_period_elliptic(1e-9) - std::numbers::pi) < 1e-6);
  for (double t : {0.05, 0.1, 0.25, 0.4, 0.5}) {
    double s = oracle::hypergeometric_period_series(t);
    CHECK(std::abs(modular_period_elliptic(t) - s) <= 1e-12 * s);
  }
  for (double t : {0.1, 0.5, 0.9}) {
    double q = oracle::oval_period_quadrature(t);
    CHECK(std::abs(modular_period_elliptic(t) - q) <= 1e-6 * q);
    // the standard library's complete elliptic integral: pi F = 2K(sqrt t)
    CHECK(modular_period_elliptic(t) == doctest::Approx(2 * std::comp_ellint_1(std::sqrt(t))).epsilon(1e-12));
  }
  double prev = 0;
  for (int i = 1; i < 100; ++i) {
    double v = modular_period_elliptic(i / 100.0);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(modular_period_elliptic(0), std::invalid_argument);
  CHECK_THROWS_AS(modular_period_elliptic(1), std::invalid_argument);
  CHECK_THROWS_AS(modular_period_elliptic(-0.5), std::invalid_argument);
}

TEST_CASE("period by flowing the modular vector field") {
  auto circle = modular_period_flow(parse_polynomial("x^2 + y^2 - 1", XY), {1.1, 0.05});
  REQUIRE(circle.outcome == FlowOutcome::Closed);
  CHECK(circle.period == doctest::Approx(std::numbers::pi).epsilon(1e-9));

  for (int i = 1; i <= 9; ++i) {
    double t = i / 10.0;
    Polynomial f = parse_polynomial("x*(x-1)*(x-" + std::to_string(i) + "/10) - y^2", XY);
    double x0 = t / 2;
    double y0 = std::sqrt(x0 * (x0 - 1) * (x0 - t));
    auto fp = modular_period_flow(f, {x0, y0 * 1.01});
    REQUIRE(fp.outcome == FlowOutcome::Closed);
    double ref = modular_period_elliptic(t);
    CHECK(std::abs(fp.period - ref) <= 1e-6 * ref);
    CHECK(fp.max_drift < 1e-10);
  }

  auto line = modular_period_flow(parse_polynomial("x", XY), {0.1, 0.3});
  CHECK(line.outcome == FlowOutcome::NonCompact);
  // the unbounded branch of the cubic escapes
  auto branch = modular_period_flow(parse_polynomial("x*(x-1)*(x-1/2) - y^2", XY), {1.5, 0.9});
  CHECK(branch.outcome == FlowOutcome::NonCompact);
}

TEST_CASE("octahedral mesh is an antipodally symmetric sphere") {
  for (unsigned level : {1u, 3u, 5u}) {
    Mesh m = octahedral_mesh(level);
    const std::size_t n = std::size_t{1} << level;
    CHECK(m.points.size() == 4 * n * n + 2);
    CHECK(m.triangles.size() == 8 * n * n);
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& t : m.triangles)
      for (int k = 0; k < 3; ++k) edges.insert({std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
    CHECK(static_cast<long>(m.points.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.triangles.size()) == 2);
    for (std::size_t v = 0; v < m.points.size(); ++v) {
      std::size_t a = m.antipode[v];
      CHECK(a != v);
      CHECK(m.antipode[a] == v);
      for (int k = 0; k < 3; ++k) CHECK(m.points[a][k] == -m.points[v][k]);
    }
  }
}

TEST_CASE("decomposition of the elliptic example on RP2") {
  auto d = decompose_certified(rp2(kEllipticRP2));
  CHECK(d.region_count == 2);
  CHECK(d.curve_count == 2);
  CHECK(d.stability.stable);
  int orientable = 0, one_sided = 0;
  for (std::size_t c = 0; c < d.curve_count; ++c) (orientability(d, c) ? orientable : one_sided)++;
  CHECK(orientable == 1);
  CHECK(one_sided == 1);
  SkeletonGraph g = extract_graph(d);
  CHECK(g.vertices.size() == 2);
  CHECK(g.edges.size() == 1);
  CHECK(g.half_edges.size() == 1);
  CHECK(g.edges[0].source != g.edges[0].target);
  // the one-sided branch bounds the outer region, which is also one side of the oval
  const auto& h = g.half_edges[0];
  CHECK((h.vertex == g.edges[0].source || h.vertex == g.edges[0].target));
}

TEST_CASE("lines and conics on RP2") {
  auto line = decompose_certified(rp2("X"));
  CHECK(line.region_count == 1);
  CHECK(line.curve_count == 1);
  CHECK_FALSE(orientability(line, 0));
  CHECK(line.perturbed_vertices > 0);
  auto gl = extract_graph(line);
  CHECK(gl.vertices.size() == 1);
  CHECK(gl.edges.empty());
  CHECK(gl.half_edges.size() == 1);

  // a conic: disk plus Moebius band, joined by a two-sided curve
  auto conic = decompose_certified(rp2("X^2 + Y^2 - Z^2"));
  CHECK(conic.region_count == 2);
  CHECK(conic.curve_count == 1);
  CHECK(orientability(conic, 0));
  CHECK(conic.stability.stable);

  // three general lines would not be transverse; two disjoint conics give 3 regions
  auto two = decompose_certified(rp2("(X^2 + Y^2 - Z^2)*(X^2 + Y^2 - 4*Z^2)"));
  CHECK(two.region_count == 3);
  CHECK(two.curve_count == 2);
  CHECK(extract_graph(two).edges.size() == 2);

  CHECK_THROWS_AS(decompose(rp2("X^2 + Y")), std::invalid_argument);
  CHECK_THROWS_AS(decompose(rp2("X", 2)), std::invalid_argument);
}

TEST_CASE("affine decompositions") {
  auto d = decompose_certified(affine("x"));
  CHECK(d.region_count == 2);
  CHECK(d.curve_count == 1);
  CHECK(orientability(d, 0));

  auto q = decompose_certified(affine("x*(x-1)"));
  CHECK(q.region_count == 3);
  CHECK(q.curve_count == 2);
  auto g = extract_graph(q);
  CHECK(g.vertices.size() == 3);
  REQUIRE(g.edges.size() == 2);
  std::map<std::string, int> degree;
  for (const auto& e : g.edges) {
    CHECK(e.source != e.target);
    degree[e.source]++;
    degree[e.target]++;
  }
  std::vector<int> degs;
  for (const auto& [v, k] : degree) degs.push_back(k);
  std::sort(degs.begin(), degs.end());
  CHECK(degs == std::vector<int>{1, 1, 2});
}

TEST_CASE("surface report carries periods and the graph") {
  auto report = analyze_surface(rp2(kEllipticRP2));
  CHECK(report.transversality.ok);
  int with_period = 0;
  for (const auto& c : report.curves) {
    if (c.orientable) {
      REQUIRE(c.period.has_value());
      CHECK(std::abs(*c.period - modular_period_elliptic(0.5)) <= 1e-6 * *c.period);
      ++with_period;
    } else {
      CHECK_FALSE(c.period.has_value());
      CHECK_FALSE(c.period_note.empty());
    }
  }
  CHECK(with_period == 1);
  auto j = report_to_json(report);
  CHECK(j["regions"].size() == 2);
  CHECK(j["curves"].size() == 2);
  CHECK(j["graph"]["edges"].size() == 1);
  CHECK(j["graph"]["halfEdges"].size() == 1);
  CHECK(j["stability"]["stable"] == true);
  std::string obj = mesh_to_obj(report.decomposition);
  CHECK(obj.find("g curve_C0") != std::string::npos);
  CHECK(obj.find("g region_V1") != std::string::npos);

  auto circle = analyze_surface(affine("x^2 + y^2 - 1"));
  REQUIRE(circle.curves.size() == 1);
  REQUIRE(circle.curves[0].period.has_value());
  CHECK(*circle.curves[0].period == doctest::Approx(std::numbers::pi).epsilon(1e-9));

  auto line = analyze_surface(affine("x"));
  CHECK_FALSE(line.curves[0].period.has_value());
}
