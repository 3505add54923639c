#include "logsymp/groups.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace logsymp {

FgGroup FgGroup::abelian(std::size_t rank, std::vector<Int> torsion) {
  for (std::size_t k = 0; k < torsion.size(); ++k) {
    if (torsion[k] < 2) throw std::invalid_argument("torsion orders must be at least 2");
    if (k > 0 && torsion[k] % torsion[k - 1] != 0)
      throw std::invalid_argument("torsion orders must form a divisor chain");
  }
  FgGroup g;
  g.kind_ = Kind::Abelian;
  g.rank_ = rank;
  g.torsion_ = std::move(torsion);
  return g;
}

FgGroup FgGroup::mapping_torus(IntMatrix monodromy) {
  const std::size_t n = monodromy.size();
  for (const auto& row : monodromy)
    if (row.size() != n) throw std::invalid_argument("monodromy must be square");
  Int det = determinant(monodromy);
  if (det != 1 && det != -1) throw std::invalid_argument("monodromy must have determinant +-1");
  FgGroup g;
  g.kind_ = Kind::MappingTorus;
  g.monodromy_ = std::move(monodromy);
  return g;
}

IntMatrix FgGroup::relation_lattice() const {
  IntMatrix rel;
  const std::size_t n = generator_count();
  for (std::size_t k = 0; k < torsion_.size(); ++k) {
    IntVector row(n, 0);
    row[rank_ + k] = torsion_[k];
    rel.push_back(std::move(row));
  }
  return rel;
}

std::string FgGroup::describe() const {
  std::ostringstream os;
  if (is_mapping_torus()) {
    os << "Z x| Z^" << fiber_rank() << " A=" << format_matrix(monodromy_);
    return os.str();
  }
  if (rank_ == 0 && torsion_.empty()) return "0";
  bool first = true;
  if (rank_ > 0) {
    os << "Z";
    if (rank_ > 1) os << '^' << rank_;
    first = false;
  }
  for (Int d : torsion_) {
    os << (first ? "" : "+") << "Z/" << d;
    first = false;
  }
  return os.str();
}

namespace {

void require_abelian(const FgGroup& g, const char* what) {
  if (!g.is_abelian()) throw std::invalid_argument(std::string(what) + ": abelian group required");
}

void require_same_ambient(const Subgroup& a, const Subgroup& b, const char* what) {
  if (!(a.ambient() == b.ambient())) throw std::invalid_argument(std::string(what) + ": ambient mismatch");
}

}  // namespace

Homomorphism::Homomorphism(FgGroup source, FgGroup target, IntMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  require_abelian(source_, "Homomorphism");
  require_abelian(target_, "Homomorphism");
  const std::size_t ns = source_.generator_count(), nt = target_.generator_count();
  if (matrix_.size() != ns) throw std::invalid_argument("Homomorphism: matrix needs one row per source generator");
  for (const auto& row : matrix_)
    if (row.size() != nt) throw std::invalid_argument("Homomorphism: row length must match target generators");
  const IntMatrix target_rel = hermite_normal_form(target_.relation_lattice(), nt);
  for (const auto& rel : source_.relation_lattice()) {
    if (!hnf_contains(target_rel, row_times(rel, matrix_, nt)))
      throw std::invalid_argument("Homomorphism: torsion relation not respected");
  }
}

Homomorphism Homomorphism::identity(const FgGroup& g) {
  return Homomorphism(g, g, identity_matrix(g.generator_count()));
}

Homomorphism Homomorphism::zero(const FgGroup& source, const FgGroup& target) {
  return Homomorphism(source, target,
                      IntMatrix(source.generator_count(), IntVector(target.generator_count(), 0)));
}

IntVector Homomorphism::apply(const IntVector& x) const {
  return row_times(x, matrix_, target_.generator_count());
}

Homomorphism Homomorphism::then(const Homomorphism& next) const {
  if (!(target_ == next.source_)) throw std::invalid_argument("Homomorphism::then: composition mismatch");
  return Homomorphism(source_, next.target_,
                      multiply(matrix_, next.matrix_, target_.generator_count(),
                               next.target_.generator_count()));
}

std::string to_string(Order o) {
  switch (o) {
    case Order::Equal: return "equal";
    case Order::Less: return "lt";
    case Order::Greater: return "gt";
    case Order::Incomparable: return "incomparable";
  }
  return "incomparable";
}

Subgroup canonicalize(const FgGroup& ambient, const IntMatrix& generators) {
  require_abelian(ambient, "canonicalize");
  const std::size_t n = ambient.generator_count();
  IntMatrix rows;
  for (const auto& g : generators) {
    if (g.size() != n) throw std::invalid_argument("canonicalize: generator length does not match group");
    rows.push_back(g);
  }
  for (auto& rel : ambient.relation_lattice()) rows.push_back(std::move(rel));
  return Subgroup(ambient, hermite_normal_form(std::move(rows), n));
}

Subgroup whole_group(const FgGroup& g) { return canonicalize(g, identity_matrix(g.generator_count())); }

Subgroup trivial_subgroup(const FgGroup& g) { return canonicalize(g, {}); }

bool contains(const Subgroup& h, const IntVector& element) {
  if (element.size() != h.ambient().generator_count())
    throw std::invalid_argument("contains: element length does not match group");
  return hnf_contains(h.hnf(), element);
}

bool is_subset(const Subgroup& a, const Subgroup& b) {
  require_same_ambient(a, b, "is_subset");
  return std::all_of(a.hnf().begin(), a.hnf().end(),
                     [&](const IntVector& row) { return hnf_contains(b.hnf(), row); });
}

bool is_trivial(const Subgroup& h) { return h == trivial_subgroup(h.ambient()); }

std::optional<Int> index(const Subgroup& h) {
  const std::size_t n = h.ambient().generator_count();
  if (h.hnf().size() < n) return std::nullopt;
  return hnf_determinant(h.hnf(), n);
}

Order compare(const Subgroup& a, const Subgroup& b) {
  require_same_ambient(a, b, "compare");
  const bool ab = is_subset(a, b), ba = is_subset(b, a);
  if (ab && ba) return Order::Equal;
  if (ab) return Order::Less;
  if (ba) return Order::Greater;
  return Order::Incomparable;
}

Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  require_same_ambient(a, b, "intersect");
  require_abelian(a.ambient(), "intersect");
  return Subgroup(a.ambient(), lattice_intersection(a.hnf(), b.hnf(), a.ambient().generator_count()));
}

Subgroup preimage(const Homomorphism& f, const Subgroup& h) {
  if (!(h.ambient() == f.target())) throw std::invalid_argument("preimage: subgroup is not in the target group");
  const std::size_t ns = f.source().generator_count(), nt = f.target().generator_count();
  return canonicalize(f.source(), lattice_preimage(f.matrix(), h.hnf(), ns, nt));
}

Subgroup image(const Homomorphism& f, const Subgroup& h) {
  if (!(h.ambient() == f.source())) throw std::invalid_argument("image: subgroup is not in the source group");
  IntMatrix rows;
  for (const auto& row : h.hnf()) rows.push_back(f.apply(row));
  return canonicalize(f.target(), rows);
}

Subgroup kernel(const Homomorphism& f) { return preimage(f, trivial_subgroup(f.target())); }

std::vector<Subgroup> enumerate_subgroups(const FgGroup& g, Int bound, bool include_trivial) {
  require_abelian(g, "enumerate_subgroups");
  if (bound < 1) throw std::invalid_argument("enumerate_subgroups: bound must be at least 1");
  const std::size_t n = g.generator_count();
  const IntMatrix relations = g.relation_lattice();

  std::vector<Subgroup> out;
  IntMatrix m(n, IntVector(n, 0));
  IntVector diag(n, 0);

  // Off-diagonal entries m[i][j] (j > i) range over [0, diag[j]).
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t i, std::size_t j) {
    if (i == n) {
      bool ok = std::all_of(relations.begin(), relations.end(),
                            [&](const IntVector& r) { return hnf_contains(m, r); });
      if (ok) out.emplace_back(g, m);
      return;
    }
    if (j == n) {
      fill(i + 1, i + 2);
      return;
    }
    for (Int a = 0; a < diag[j]; ++a) {
      m[i][j] = a;
      fill(i, j + 1);
    }
    m[i][j] = 0;
  };

  std::function<void(std::size_t, Int)> choose_diag = [&](std::size_t i, Int remaining) {
    if (i == n) {
      fill(0, 1);
      return;
    }
    for (Int d = 1; d <= remaining; ++d) {
      diag[i] = d;
      m[i][i] = d;
      choose_diag(i + 1, remaining / d);
    }
  };
  choose_diag(0, bound);

  if (include_trivial) out.push_back(trivial_subgroup(g));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IntMatrix nontrivial_generators(const Subgroup& h) {
  const std::size_t n = h.ambient().generator_count();
  const IntMatrix rel = hermite_normal_form(h.ambient().relation_lattice(), n);
  IntMatrix out;
  for (const auto& row : h.hnf())
    if (!hnf_contains(rel, row)) out.push_back(row);
  return out;
}

std::string format_subgroup(const Subgroup& h) { return format_matrix(h.hnf()); }

MtElement mt_multiply(const FgGroup& g, const MtElement& a, const MtElement& b) {
  IntVector v = apply_matrix(matrix_power(g.monodromy(), b.shift), a.fiber);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = checked_add(v[i], b.fiber[i]);
  return {checked_add(a.shift, b.shift), v};
}

MtElement mt_inverse(const FgGroup& g, const MtElement& a) {
  IntVector v = apply_matrix(matrix_power(g.monodromy(), -a.shift), a.fiber);
  for (auto& e : v) e = checked_mul(e, -1);
  return {-a.shift, v};
}

namespace {

bool maps_into(const IntMatrix& a, const IntMatrix& lattice) {
  return std::all_of(lattice.begin(), lattice.end(),
                     [&](const IntVector& v) { return hnf_contains(lattice, apply_matrix(a, v)); });
}

bool preserves(const IntMatrix& a, const IntMatrix& lattice) {
  return maps_into(a, lattice) && maps_into(unimodular_inverse(a), lattice);
}

MtElement mt_power(const FgGroup& g, MtElement x, Int q) {
  const std::size_t n = g.fiber_rank();
  if (q < 0) {
    x = mt_inverse(g, x);
    q = -q;
  }
  MtElement result{0, IntVector(n, 0)};
  while (q > 0) {
    if (q & 1) result = mt_multiply(g, result, x);
    q >>= 1;
    if (q > 0) x = mt_multiply(g, x, x);
  }
  return result;
}

}  // namespace

MappingTorusSubgroup mt_subgroup(const FgGroup& g, Int m, IntVector w, const IntMatrix& lambda_generators) {
  if (!g.is_mapping_torus()) throw std::invalid_argument("mt_subgroup: mapping-torus group required");
  const std::size_t n = g.fiber_rank();
  if (m < 0) throw std::invalid_argument("mt_subgroup: shift exponent must be non-negative");
  if (w.size() != n) throw std::invalid_argument("mt_subgroup: shift vector length does not match fiber rank");
  for (const auto& v : lambda_generators)
    if (v.size() != n) throw std::invalid_argument("mt_subgroup: fiber generator length does not match fiber rank");
  IntMatrix lambda = hermite_normal_form(lambda_generators, n);
  w = hnf_reduce(lambda, std::move(w));
  if (m == 0 && std::any_of(w.begin(), w.end(), [](Int e) { return e != 0; }))
    throw std::invalid_argument("mt_subgroup: shift vector must vanish mod lambda when m = 0");
  if (!preserves(matrix_power(g.monodromy(), m), lambda))
    throw std::invalid_argument("mt_subgroup: A^m does not preserve lambda = " + format_matrix(lambda));
  MappingTorusSubgroup h;
  h.ambient_ = g;
  h.shift_ = m;
  h.shift_vector_ = std::move(w);
  h.fiber_lattice_ = std::move(lambda);
  return h;
}

std::optional<std::string> mt_normality_failure(const MappingTorusSubgroup& h) {
  const IntMatrix& a = h.ambient().monodromy();
  const IntMatrix& lambda = h.fiber_lattice();
  const std::size_t n = a.size();
  if (!preserves(a, lambda)) return "A does not preserve lambda";
  if (h.shift() == 0) return std::nullopt;
  IntMatrix am = matrix_power(a, h.shift());
  for (std::size_t i = 0; i < n; ++i) {
    IntVector col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = am[r][i] - (r == i ? 1 : 0);
    if (!hnf_contains(lambda, col)) return "(A^m - I)Z^n is not contained in lambda";
  }
  IntVector aw = apply_matrix(a, h.shift_vector());
  for (std::size_t r = 0; r < n; ++r) aw[r] = checked_sub(aw[r], h.shift_vector()[r]);
  if (!hnf_contains(lambda, aw)) return "(A - I)w is not contained in lambda";
  return std::nullopt;
}

bool mt_is_normal(const MappingTorusSubgroup& h) { return !mt_normality_failure(h).has_value(); }

Subgroup mt_fiber(const MappingTorusSubgroup& h) {
  return Subgroup(FgGroup::free_abelian(h.ambient().fiber_rank()), h.fiber_lattice());
}

bool mt_contains(const MappingTorusSubgroup& h, const MtElement& x) {
  const FgGroup& g = h.ambient();
  if (x.fiber.size() != g.fiber_rank()) throw std::invalid_argument("mt_contains: element length mismatch");
  Int q = 0;
  if (h.shift() == 0) {
    if (x.shift != 0) return false;
  } else {
    if (x.shift % h.shift() != 0) return false;
    q = x.shift / h.shift();
  }
  MtElement p = mt_power(g, {h.shift(), h.shift_vector()}, q);
  IntVector diff(x.fiber.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = checked_sub(x.fiber[i], p.fiber[i]);
  return hnf_contains(h.fiber_lattice(), diff);
}

std::optional<Int> mt_index(const MappingTorusSubgroup& h) {
  const std::size_t n = h.ambient().fiber_rank();
  if (h.shift() == 0 || h.fiber_lattice().size() < n) return std::nullopt;
  return checked_mul(h.shift(), hnf_determinant(h.fiber_lattice(), n));
}

}  // namespace logsymp
