#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace logsymp {

using Int = std::int64_t;
using IntVector = std::vector<Int>;
// Row-major; each row is one lattice vector.
using IntMatrix = std::vector<IntVector>;

// Overflow-checked arithmetic. Throws std::overflow_error.
Int checked_add(Int a, Int b);
Int checked_sub(Int a, Int b);
Int checked_mul(Int a, Int b);

// Floor division with a positive divisor.
Int floor_div(Int a, Int b);

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result is upper echelon with strictly increasing pivot columns,
/// positive pivots, and entries above each pivot reduced into [0, pivot).
/// Zero rows are dropped, so the row count equals the lattice rank.
IntMatrix hermite_normal_form(IntMatrix rows, std::size_t ncols);

// Index of the first nonzero entry, or row.size() for the zero row.
std::size_t pivot_column(const IntVector& row);

// Membership of v in the lattice with basis `hnf` (which must be in HNF).
bool hnf_contains(const IntMatrix& hnf, IntVector v);

// Reduce v modulo the lattice `hnf` to its canonical coset representative.
IntVector hnf_reduce(const IntMatrix& hnf, IntVector v);

// Lattice intersection; both inputs are generating sets in Z^n.
IntMatrix lattice_intersection(const IntMatrix& a, const IntMatrix& b, std::size_t n);

/// {x in Z^ns : x * map lies in the lattice spanned by `target`}.
/// `map` has ns rows of length nt; the result is in HNF.
IntMatrix lattice_preimage(const IntMatrix& map, const IntMatrix& target, std::size_t ns,
                           std::size_t nt);

// Absolute determinant of a square HNF (product of pivots); 0 if rank deficient.
Int hnf_determinant(const IntMatrix& hnf, std::size_t n);

IntMatrix identity_matrix(std::size_t n);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b, std::size_t inner, std::size_t ncols);
// Row vector times matrix.
IntVector row_times(const IntVector& v, const IntMatrix& m, std::size_t ncols);
// Matrix times column vector.
IntVector apply_matrix(const IntMatrix& a, const IntVector& v);
IntMatrix matrix_power(const IntMatrix& a, Int exponent);
// Inverse of a unimodular integer matrix; throws std::invalid_argument otherwise.
IntMatrix unimodular_inverse(const IntMatrix& a);
Int determinant(const IntMatrix& a);

std::string format_matrix(const IntMatrix& m);
std::string format_vector(const IntVector& v);

}  // namespace logsymp
