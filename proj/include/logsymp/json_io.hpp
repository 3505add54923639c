#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "logsymp/classification.hpp"
#include "logsymp/groups.hpp"
#include "logsymp/multivector.hpp"
#include "logsymp/polynomial.hpp"
#include "logsymp/surface.hpp"

namespace logsymp {

using Json = nlohmann::json;

/// Input that does not match a schema; `path` is a JSON pointer into the document.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// {"kind":"abelian","rank":1,"torsion":[]}, {"kind":"free","rank":2}, {"kind":"trivial"},
// {"kind":"mapping_torus","n":2,"A":[[1,1],[0,1]]}
FgGroup group_from_json(const Json& j, const std::string& path = "");
Json group_to_json(const FgGroup& g);

// [[2]] or {"matrix":[[2]]}; maps written against carrier() of mapping tori.
Homomorphism hom_from_json(const Json& j, const FgGroup& source, const FgGroup& target, const std::string& path = "");
Json hom_to_json(const Homomorphism& f);

// {"hnf":[[2]]} or {"generators":[[4],[6]]}
Subgroup subgroup_from_json(const Json& j, const FgGroup& ambient, const std::string& path = "");
Json subgroup_to_json(const Subgroup& h);

// {"m":1,"w":[0,0],"lambda":[[1,0],[0,1]]}
MappingTorusSubgroup mt_subgroup_from_json(const Json& j, const FgGroup& ambient, const std::string& path = "");
Json mt_subgroup_to_json(const MappingTorusSubgroup& h);

GraphOfGroups graph_from_json(const Json& j, const std::string& path = "");
Json graph_to_json(const GraphOfGroups& g);

// {"case":"logtan-or","divisorGroup":..,"sideGroups":[..],"projections":[..],
//  "leaf":{"group":..,"iota":..},"bound":2}
LocalModel local_model_from_json(const Json& j, const std::string& path = "");

Json integration_to_json(const Integration& x);
Json poset_to_json(const IntegrationPoset& p);
// Stable node names are element keys.
std::string poset_to_dot(const std::vector<std::string>& keys, const std::vector<std::pair<std::size_t, std::size_t>>& covers);
std::string poset_to_dot(const IntegrationPoset& p);

// "x^2 + y" or {"vars":["x","y"],"terms":[{"coef":"1/2","exps":[2,0]}]}
Polynomial polynomial_from_json(const Json& j, const std::vector<std::string>& default_vars, const std::string& path = "");
Json polynomial_to_json(const Polynomial& p, const std::vector<std::string>& vars);
Json multivector_to_json(const Multivector& m, const std::vector<std::string>& vars);

// {"mode":"rp2"|"affine","f":..,"resolution":5,"box":[xmin,xmax,ymin,ymax]}
SurfaceModel surface_from_json(const Json& j, const std::string& path = "");

}  // namespace logsymp
