#include "logsymp/integer_lattice.hpp"

#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace logsymp {

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer overflow in subtraction");
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in product");
  return r;
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

namespace {

// x*a + y*b = g >= 0
std::tuple<Int, Int, Int> extended_gcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, checked_sub(old_r, checked_mul(q, r)));
    std::tie(old_s, s) = std::make_pair(s, checked_sub(old_s, checked_mul(q, s)));
    std::tie(old_t, t) = std::make_pair(t, checked_sub(old_t, checked_mul(q, t)));
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

void axpy(IntVector& y, Int a, const IntVector& x) {
  if (a == 0) return;
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = checked_add(y[k], checked_mul(a, x[k]));
}

}  // namespace

IntMatrix hermite_normal_form(IntMatrix m, std::size_t ncols) {
  for (auto& row : m) {
    if (row.size() != ncols) throw std::invalid_argument("hermite_normal_form: row length mismatch");
  }
  std::size_t pr = 0;
  for (std::size_t col = 0; col < ncols && pr < m.size(); ++col) {
    for (std::size_t i = pr + 1; i < m.size(); ++i) {
      Int b = m[i][col];
      if (b == 0) continue;
      Int a = m[pr][col];
      auto [g, x, y] = extended_gcd(a, b);
      IntVector p(ncols), q(ncols);
      Int ag = a / g, bg = b / g;
      for (std::size_t k = 0; k < ncols; ++k) {
        p[k] = checked_add(checked_mul(x, m[pr][k]), checked_mul(y, m[i][k]));
        q[k] = checked_sub(checked_mul(ag, m[i][k]), checked_mul(bg, m[pr][k]));
      }
      m[pr] = std::move(p);
      m[i] = std::move(q);
    }
    Int pivot = m[pr][col];
    if (pivot == 0) continue;
    if (pivot < 0) {
      for (auto& e : m[pr]) e = checked_mul(e, -1);
      pivot = -pivot;
    }
    for (std::size_t i = 0; i < pr; ++i) axpy(m[i], -floor_div(m[i][col], pivot), m[pr]);
    ++pr;
  }
  m.resize(pr);
  return m;
}

std::size_t pivot_column(const IntVector& row) {
  for (std::size_t k = 0; k < row.size(); ++k)
    if (row[k] != 0) return k;
  return row.size();
}

bool hnf_contains(const IntMatrix& hnf, IntVector v) {
  for (const auto& row : hnf) {
    std::size_t c = pivot_column(row);
    Int p = row[c];
    if (v[c] % p != 0) return false;
    axpy(v, -(v[c] / p), row);
  }
  for (Int e : v)
    if (e != 0) return false;
  return true;
}

IntVector hnf_reduce(const IntMatrix& hnf, IntVector v) {
  for (const auto& row : hnf) {
    std::size_t c = pivot_column(row);
    axpy(v, -floor_div(v[c], row[c]), row);
  }
  return v;
}

IntMatrix lattice_intersection(const IntMatrix& a, const IntMatrix& b, std::size_t n) {
  IntMatrix stacked;
  stacked.reserve(a.size() + b.size());
  for (const auto& row : a) {
    IntVector r(row);
    r.insert(r.end(), row.begin(), row.end());
    stacked.push_back(std::move(r));
  }
  for (const auto& row : b) {
    IntVector r(row);
    r.resize(2 * n, 0);
    stacked.push_back(std::move(r));
  }
  IntMatrix h = hermite_normal_form(std::move(stacked), 2 * n);
  IntMatrix out;
  for (const auto& row : h) {
    if (pivot_column(row) >= n) out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(n), row.end());
  }
  return hermite_normal_form(std::move(out), n);
}

IntMatrix lattice_preimage(const IntMatrix& map, const IntMatrix& target, std::size_t ns,
                           std::size_t nt) {
  if (map.size() != ns) throw std::invalid_argument("lattice_preimage: map row count mismatch");
  IntMatrix stacked;
  for (std::size_t i = 0; i < ns; ++i) {
    if (map[i].size() != nt) throw std::invalid_argument("lattice_preimage: map column mismatch");
    IntVector r(map[i]);
    r.resize(nt + ns, 0);
    r[nt + i] = 1;
    stacked.push_back(std::move(r));
  }
  for (const auto& row : target) {
    IntVector r(row);
    r.resize(nt + ns, 0);
    stacked.push_back(std::move(r));
  }
  IntMatrix h = hermite_normal_form(std::move(stacked), nt + ns);
  IntMatrix out;
  for (const auto& row : h) {
    if (pivot_column(row) >= nt) out.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(nt), row.end());
  }
  return hermite_normal_form(std::move(out), ns);
}

Int hnf_determinant(const IntMatrix& hnf, std::size_t n) {
  if (hnf.size() != n) return 0;
  Int d = 1;
  for (const auto& row : hnf) d = checked_mul(d, row[pivot_column(row)]);
  return d;
}

IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, IntVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b, std::size_t inner, std::size_t ncols) {
  IntMatrix out;
  out.reserve(a.size());
  for (const auto& row : a) {
    if (row.size() != inner) throw std::invalid_argument("multiply: dimension mismatch");
    out.push_back(row_times(row, b, ncols));
  }
  return out;
}

IntVector row_times(const IntVector& v, const IntMatrix& m, std::size_t ncols) {
  if (v.size() != m.size()) throw std::invalid_argument("row_times: dimension mismatch");
  IntVector out(ncols, 0);
  for (std::size_t i = 0; i < v.size(); ++i) axpy(out, v[i], m[i]);
  return out;
}

IntVector apply_matrix(const IntMatrix& a, const IntVector& v) {
  IntVector out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != v.size()) throw std::invalid_argument("apply_matrix: dimension mismatch");
    for (std::size_t j = 0; j < v.size(); ++j) out[i] = checked_add(out[i], checked_mul(a[i][j], v[j]));
  }
  return out;
}

IntMatrix matrix_power(const IntMatrix& a, Int exponent) {
  const std::size_t n = a.size();
  IntMatrix base = exponent < 0 ? unimodular_inverse(a) : a;
  Int e = exponent < 0 ? -exponent : exponent;
  IntMatrix result = identity_matrix(n);
  while (e > 0) {
    if (e & 1) result = multiply(result, base, n, n);
    e >>= 1;
    if (e > 0) base = multiply(base, base, n, n);
  }
  return result;
}

IntMatrix unimodular_inverse(const IntMatrix& a) {
  const std::size_t n = a.size();
  IntMatrix aug;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("unimodular_inverse: matrix not square");
    IntVector r(a[i]);
    r.resize(2 * n, 0);
    r[n + i] = 1;
    aug.push_back(std::move(r));
  }
  IntMatrix h = hermite_normal_form(std::move(aug), 2 * n);
  IntMatrix inv;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= h.size() || pivot_column(h[i]) != i || h[i][i] != 1)
      throw std::invalid_argument("unimodular_inverse: matrix is not unimodular");
    inv.emplace_back(h[i].begin() + static_cast<std::ptrdiff_t>(n), h[i].end());
  }
  return inv;
}

Int determinant(const IntMatrix& a) {
  // Bareiss fraction-free elimination; every division is exact.
  const std::size_t n = a.size();
  if (n == 0) return 1;
  IntMatrix m = a;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = checked_sub(checked_mul(m[i][j], m[k][k]), checked_mul(m[i][k], m[k][j])) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::string format_vector(const IntVector& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

std::string format_matrix(const IntMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << format_vector(m[i]);
  os << ']';
  return os.str();
}

}  // namespace logsymp
