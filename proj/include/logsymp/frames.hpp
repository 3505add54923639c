#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "logsymp/multivector.hpp"

namespace logsymp {

struct PolyFrame {
  std::size_t nvars = 0;
  std::vector<Multivector> fields;  // degree-1 multivectors
  std::optional<std::size_t> hypersurface_var;
  std::size_t modification_count = 0;
};

PolyFrame coordinate_frame(std::size_t nvars);

// Multiplies the fields in `slots` by x_var.
PolyFrame elementary_modification(const PolyFrame& frame, const std::vector<std::size_t>& slots, std::size_t var);
// Multiplies the first l fields by x_var.
PolyFrame elementary_modification(const PolyFrame& frame, std::size_t l, std::size_t var);

// Rank over the field of rational functions (fraction-free elimination).
std::size_t symbolic_rank(const std::vector<std::vector<Polynomial>>& rows);
std::size_t symbolic_rank(const std::vector<Multivector>& fields);
Polynomial polynomial_determinant(std::vector<std::vector<Polynomial>> m);

enum class Involutivity { Involutive, NotInvolutive, Inconclusive };
std::string to_string(Involutivity v);

struct BracketCertificate {
  std::size_t i = 0, j = 0;
  Multivector bracket;
  std::vector<Polynomial> coefficients;  // bracket = sum c_k F_k when found
  bool found = false;
};

struct InvolutivityReport {
  Involutivity outcome = Involutivity::Inconclusive;
  std::vector<BracketCertificate> certificates;
  std::string message;
};

/// Decides whether the polynomial span of the frame is closed under the
/// Lie bracket, solving for coefficients of total degree <= degree_bound.
/// When the bounded solve fails on a square frame of full rank, the unique
/// rational solution decides between NotInvolutive and Inconclusive.
InvolutivityReport involutivity_check(const PolyFrame& frame, unsigned degree_bound);

struct Box {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
};

struct TransversalityReport {
  bool ok = true;
  std::size_t samples = 0;
  std::vector<std::array<double, 2>> suspects;
  std::string certification = "heuristic";
};

// f in two variables, sampled on a grid_n x grid_n grid over the box.
TransversalityReport transversality_sample_check(const Polynomial& f, const Box& box, std::size_t grid_n);
// Homogeneous F(X,Y,Z) on RP^2, checked in the three affine charts.
TransversalityReport transversality_sample_check_rp2(const Polynomial& f, std::size_t grid_n);

}  // namespace logsymp
