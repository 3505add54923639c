#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logsymp/integer_lattice.hpp"

namespace logsymp {

/// Finitely generated abelian group Z^r + Z/d1 + ... + Z/ds (d_k | d_{k+1}),
/// or a mapping torus Z x|_A Z^n with unimodular monodromy A.
///
/// Mapping-torus multiplication is (k,v)(k',v') = (k+k', A^{k'} v + v'),
/// with A acting on column vectors.
class FgGroup {
 public:
  enum class Kind { Abelian, MappingTorus };

  FgGroup() = default;
  static FgGroup abelian(std::size_t rank, std::vector<Int> torsion = {});
  static FgGroup free_abelian(std::size_t rank) { return abelian(rank); }
  static FgGroup trivial() { return abelian(0); }
  static FgGroup mapping_torus(IntMatrix monodromy);

  Kind kind() const { return kind_; }
  bool is_abelian() const { return kind_ == Kind::Abelian; }
  bool is_mapping_torus() const { return kind_ == Kind::MappingTorus; }
  bool is_torsion_free() const { return torsion_.empty(); }

  std::size_t rank() const { return rank_; }
  const std::vector<Int>& torsion() const { return torsion_; }
  // r + s: the length of element vectors of an abelian group.
  std::size_t generator_count() const { return rank_ + torsion_.size(); }
  // HNF rows d_k e_{r+k}.
  IntMatrix relation_lattice() const;

  std::size_t fiber_rank() const { return monodromy_.size(); }
  const IntMatrix& monodromy() const { return monodromy_; }

  std::string describe() const;

  friend bool operator==(const FgGroup&, const FgGroup&) = default;

 private:
  Kind kind_ = Kind::Abelian;
  std::size_t rank_ = 0;
  std::vector<Int> torsion_;
  IntMatrix monodromy_;
};

/// Subgroup of an abelian FgGroup, stored as the lattice L with
/// relations <= L <= Z^{r+s}. The HNF of L is canonical, so equality of
/// subgroups is equality of `hnf()`.
class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(FgGroup ambient, IntMatrix hnf) : ambient_(std::move(ambient)), hnf_(std::move(hnf)) {}

  const FgGroup& ambient() const { return ambient_; }
  const IntMatrix& hnf() const { return hnf_; }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.hnf_ == b.hnf_ && a.ambient_ == b.ambient_;
  }
  friend bool operator<(const Subgroup& a, const Subgroup& b) { return a.hnf_ < b.hnf_; }

 private:
  FgGroup ambient_;
  IntMatrix hnf_;
};

/// Homomorphism between abelian groups; row i is the image of generator i.
class Homomorphism {
 public:
  Homomorphism() = default;
  // Throws std::invalid_argument on shape or torsion incompatibility.
  Homomorphism(FgGroup source, FgGroup target, IntMatrix matrix);

  static Homomorphism identity(const FgGroup& g);
  static Homomorphism zero(const FgGroup& source, const FgGroup& target);

  const FgGroup& source() const { return source_; }
  const FgGroup& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }

  IntVector apply(const IntVector& x) const;
  // this followed by `next`.
  Homomorphism then(const Homomorphism& next) const;

 private:
  FgGroup source_;
  FgGroup target_;
  IntMatrix matrix_;
};

enum class Order { Equal, Less, Greater, Incomparable };
std::string to_string(Order o);

Subgroup canonicalize(const FgGroup& ambient, const IntMatrix& generators);
Subgroup whole_group(const FgGroup& g);
Subgroup trivial_subgroup(const FgGroup& g);

bool contains(const Subgroup& h, const IntVector& element);
bool is_subset(const Subgroup& a, const Subgroup& b);
bool is_trivial(const Subgroup& h);

// Index [G : H]; std::nullopt stands for an infinite index.
std::optional<Int> index(const Subgroup& h);

Order compare(const Subgroup& a, const Subgroup& b);
Subgroup intersect(const Subgroup& a, const Subgroup& b);
Subgroup preimage(const Homomorphism& f, const Subgroup& h);
Subgroup image(const Homomorphism& f, const Subgroup& h);
Subgroup kernel(const Homomorphism& f);

/// All subgroups of index <= bound, plus the trivial subgroup when requested,
/// sorted by canonical form.
std::vector<Subgroup> enumerate_subgroups(const FgGroup& g, Int bound, bool include_trivial);

// Generators of h that are nonzero in the ambient group (HNF rows outside the
// relation lattice).
IntMatrix nontrivial_generators(const Subgroup& h);

std::string format_subgroup(const Subgroup& h);

// ---------------------------------------------------------------------------
// Mapping-torus groups: split subgroups <(m,w)> x| Lambda with A^m Lambda = Lambda.

struct MtElement {
  Int shift = 0;
  IntVector fiber;
  friend bool operator==(const MtElement&, const MtElement&) = default;
};

MtElement mt_multiply(const FgGroup& g, const MtElement& a, const MtElement& b);
MtElement mt_inverse(const FgGroup& g, const MtElement& a);

class MappingTorusSubgroup {
 public:
  MappingTorusSubgroup() = default;

  const FgGroup& ambient() const { return ambient_; }
  Int shift() const { return shift_; }
  const IntVector& shift_vector() const { return shift_vector_; }
  const IntMatrix& fiber_lattice() const { return fiber_lattice_; }

  friend bool operator==(const MappingTorusSubgroup&, const MappingTorusSubgroup&) = default;

 private:
  friend MappingTorusSubgroup mt_subgroup(const FgGroup&, Int, IntVector, const IntMatrix&);
  FgGroup ambient_;
  Int shift_ = 0;
  IntVector shift_vector_;
  IntMatrix fiber_lattice_;
};

/// Builds <(m,w)> x| <lambda_generators>. Throws std::invalid_argument with an
/// explanation when A^m Lambda != Lambda, m < 0, or m = 0 with w != 0.
MappingTorusSubgroup mt_subgroup(const FgGroup& g, Int m, IntVector w,
                                 const IntMatrix& lambda_generators);

// Names the first failed normality predicate, or nullopt when normal.
std::optional<std::string> mt_normality_failure(const MappingTorusSubgroup& h);
bool mt_is_normal(const MappingTorusSubgroup& h);
// Lambda as a subgroup of Z^n.
Subgroup mt_fiber(const MappingTorusSubgroup& h);
bool mt_contains(const MappingTorusSubgroup& h, const MtElement& x);
std::optional<Int> mt_index(const MappingTorusSubgroup& h);

}  // namespace logsymp
