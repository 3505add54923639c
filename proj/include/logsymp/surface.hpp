#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "logsymp/frames.hpp"
#include "logsymp/periods.hpp"
#include "logsymp/polynomial.hpp"

namespace logsymp {

enum class SurfaceMode { RP2Homogeneous, R2Affine };

struct SurfaceModel {
  SurfaceMode mode = SurfaceMode::RP2Homogeneous;
  Polynomial f;
  unsigned resolution = 5;  // octahedron edges split into 2^resolution segments
  Box box{-4, 4, -4, 4};    // affine mode only
};

void validate_surface_model(const SurfaceModel& m);

struct Mesh {
  std::vector<std::array<double, 3>> points;  // unit vectors (RP2) or (x, y, 0) (affine)
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<std::size_t> antipode;  // vertex involution; empty in affine mode
};

Mesh octahedral_mesh(unsigned level);
Mesh grid_mesh(const Box& box, unsigned level);

struct MeshDecomposition {
  SurfaceMode mode = SurfaceMode::RP2Homogeneous;
  unsigned level = 0;
  Mesh mesh;
  std::vector<int> vertex_sign;
  std::size_t perturbed_vertices = 0;
  double perturbation = 0;

  // per triangle: region id for same-sign triangles, curve id for mixed ones
  std::vector<std::optional<std::size_t>> triangle_region;
  std::vector<std::optional<std::size_t>> triangle_curve;
  std::vector<std::size_t> vertex_region;

  std::size_t region_count = 0;
  std::size_t curve_count = 0;
  // components on the double cover, with their antipodal partner
  std::vector<std::size_t> curve_lift_of_triangle;  // valid for mixed triangles
  std::vector<std::size_t> lift_curve;               // lift component -> curve id
  std::vector<std::size_t> lift_partner;             // lift component -> antipodal lift component
  std::vector<std::vector<std::size_t>> curve_regions;  // adjacency, sorted

  struct Stability {
    bool checked = false;
    bool stable = false;
    unsigned refined_level = 0;
    std::string detail;
  } stability;
};

MeshDecomposition decompose(const SurfaceModel& model);
// Decomposes at model.resolution and model.resolution + 1 and records whether
// counts, orientability flags and adjacency sizes agree.
MeshDecomposition decompose_certified(const SurfaceModel& model);

bool orientability(const MeshDecomposition& d, std::size_t curve);

struct SkeletonEdge {
  std::string id;
  std::string source;
  std::string target;
  std::size_t curve = 0;
};

struct SkeletonHalfEdge {
  std::string id;
  std::string vertex;
  std::size_t curve = 0;
};

struct SkeletonGraph {
  std::vector<std::string> vertices;
  std::vector<SkeletonEdge> edges;
  std::vector<SkeletonHalfEdge> half_edges;
};

SkeletonGraph extract_graph(const MeshDecomposition& d);

struct CurveReport {
  std::size_t id = 0;
  bool orientable = true;
  std::optional<double> period;
  std::string period_note;
  std::vector<std::size_t> regions;
};

struct PoissonGraphReport {
  MeshDecomposition decomposition;
  TransversalityReport transversality;
  std::vector<CurveReport> curves;
  SkeletonGraph graph;
};

PoissonGraphReport analyze_surface(const SurfaceModel& model);
nlohmann::json report_to_json(const PoissonGraphReport& r);
std::string mesh_to_obj(const MeshDecomposition& d);

}  // namespace logsymp
