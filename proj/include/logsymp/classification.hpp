#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logsymp/groups.hpp"

namespace logsymp {

// Homomorphisms attached to a mapping-torus group act on its fiber Z^n;
// carrier() names the abelian group such maps are written against.
FgGroup carrier(const FgGroup& g);

struct Leaf {
  FgGroup group;
  Homomorphism iota;  // leaf -> carrier of the component group
};

struct GraphVertex {
  std::string id;
  FgGroup group;
};

struct GraphEdge {
  std::string id;
  std::string source;
  std::string target;  // may equal source for a loop
  FgGroup group;
  Homomorphism delta_source;
  Homomorphism delta_target;
  std::optional<Leaf> leaf;
};

/// A component with non-orientable normal bundle. `w` is the index-2 kernel
/// of w1 inside `group`; `delta` is written on W in the basis given by the
/// HNF rows of `w`.
struct GraphHalfEdge {
  std::string id;
  std::string vertex;
  FgGroup group;
  Subgroup w;
  Homomorphism delta;
  std::optional<Leaf> leaf;
};

struct GraphOfGroups {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<GraphHalfEdge> half_edges;

  const GraphVertex& vertex(const std::string& id) const;
  std::size_t vertex_index(const std::string& id) const;
  bool has_mapping_torus() const;
};

enum class GraphMode { LogTangent, LogSymplectic };

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
};

ValidationReport validate_graph(const GraphOfGroups& g, GraphMode mode);

// W as an abstract free abelian group, and its inclusion into the half-edge group.
FgGroup w_group(const GraphHalfEdge& h);
Homomorphism w_inclusion(const GraphHalfEdge& h);

struct Restriction {
  std::string component;
  std::string vertex;
  Subgroup subgroup;
};

struct Integration {
  // Aligned lists; labels look like "V:<id>", "E:<id>", "H:<id>", or local slot names.
  std::vector<std::string> labels;
  std::vector<Subgroup> subgroups;
  bool hausdorff = false;
  std::string hausdorff_failure;
  std::vector<std::pair<std::string, Subgroup>> source_fibers;
  std::vector<Restriction> restrictions;
  std::string key;

  const Subgroup& at(const std::string& label) const;
};

struct IntegrationPoset {
  std::string mode;
  Int bound = 0;
  std::vector<Integration> elements;
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  std::optional<std::size_t> minimum;
  std::optional<std::size_t> maximum;

  std::size_t hausdorff_count() const;
};

// Componentwise inclusion.
bool integration_leq(const Integration& a, const Integration& b);

/// Transitive reduction of the strict order induced by `leq` on 0..n-1.
std::vector<std::pair<std::size_t, std::size_t>> poset_hasse(
    std::size_t n, const std::function<bool(std::size_t, std::size_t)>& leq);

// Sorts elements, assigns keys, and fills covers, minimum and maximum.
void finalize_poset(IntegrationPoset& p);

IntegrationPoset classify_logtan(const GraphOfGroups& g, Int bound);
IntegrationPoset hausdorff_filter_logtan(const IntegrationPoset& p, const GraphOfGroups& g);
IntegrationPoset classify_logsymp_hausdorff(const GraphOfGroups& g, Int bound);

Subgroup source_fiber_group(const GraphOfGroups& g, GraphMode mode, const Integration& x,
                            const std::string& component);

struct SscWitness {
  std::string component;
  std::string vertex;
  IntMatrix generators;
};

struct SscReport {
  bool hausdorff = true;
  std::vector<SscWitness> witnesses;
};

SscReport ssc_hausdorff_check(const GraphOfGroups& g);

struct MtVerification {
  bool accepted = false;
  std::vector<std::string> report;
};

MtVerification verify_integration_mt(const GraphOfGroups& g,
                                     const std::map<std::string, MappingTorusSubgroup>& family);

// Re-checks an emitted element against the raw conditions of its mode.
// Returns the failed conditions; empty means the element is sound.
std::vector<std::string> audit_integration(const GraphOfGroups& g, GraphMode mode, const Integration& x);

enum class LocalCase { LogTanOrientable, LogTanNonOrientable, LogSympOrientable, LogSympNonOrientable };

std::string to_string(LocalCase c);
LocalCase local_case_from_string(const std::string& s);

/// Local model around one component of D. Side groups are pi1 of the
/// adjacent open pieces (two when orientable, one otherwise), projections
/// are r_* : side -> pi1(D), and the leaf inclusion iota: pi1(F) -> pi1(D) is
/// needed in the log symplectic cases.
struct LocalModel {
  LocalCase local_case = LocalCase::LogTanOrientable;
  FgGroup divisor_group;
  std::vector<FgGroup> side_groups;
  std::vector<Homomorphism> projections;
  std::optional<Homomorphism> leaf_inclusion;
  Int bound = 1;
};

std::vector<std::string> validate_local(const LocalModel& m);
IntegrationPoset classify_local(const LocalModel& m);
std::vector<std::string> audit_local(const LocalModel& m, const Integration& x);

}  // namespace logsymp
