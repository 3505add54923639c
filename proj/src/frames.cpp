#include "logsymp/frames.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace logsymp {

PolyFrame coordinate_frame(std::size_t nvars) {
  PolyFrame f;
  f.nvars = nvars;
  for (std::size_t i = 0; i < nvars; ++i) f.fields.push_back(Multivector::basis(nvars, {i}));
  return f;
}

PolyFrame elementary_modification(const PolyFrame& frame, const std::vector<std::size_t>& slots, std::size_t var) {
  if (var >= frame.nvars) throw std::invalid_argument("modification variable out of range");
  if (slots.size() > frame.fields.size()) throw std::invalid_argument("modification count l out of range");
  PolyFrame out = frame;
  const Polynomial x = Polynomial::variable(frame.nvars, var);
  std::vector<bool> seen(frame.fields.size(), false);
  for (auto s : slots) {
    if (s >= frame.fields.size()) throw std::invalid_argument("modification slot out of range");
    if (seen[s]) throw std::invalid_argument("modification slot repeated");
    seen[s] = true;
    out.fields[s] = x * frame.fields[s];
  }
  out.hypersurface_var = var;
  out.modification_count = slots.size();
  return out;
}

PolyFrame elementary_modification(const PolyFrame& frame, std::size_t l, std::size_t var) {
  if (l > frame.fields.size()) throw std::invalid_argument("modification count l out of range");
  std::vector<std::size_t> slots(l);
  for (std::size_t i = 0; i < l; ++i) slots[i] = i;
  return elementary_modification(frame, slots, var);
}

namespace {

std::vector<std::vector<Polynomial>> field_rows(const std::vector<Multivector>& fields) {
  std::vector<std::vector<Polynomial>> rows;
  for (const auto& f : fields) {
    if (f.degree() != 1 && !f.is_zero()) throw std::invalid_argument("frame entries must be vector fields");
    std::vector<Polynomial> row;
    for (std::size_t i = 0; i < f.nvars(); ++i) row.push_back(f.component({i}));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Fraction-free row echelon form in place; returns the rank and the last pivot.
std::size_t bareiss(std::vector<std::vector<Polynomial>>& m, std::size_t nvars, int* sign = nullptr) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  Polynomial prev = Polynomial::constant(nvars, 1);
  std::size_t r = 0;
  if (sign) *sign = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap(m[p], m[r]);
      if (sign) *sign = -*sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        Polynomial num = m[i][j] * m[r][c] - m[i][c] * m[r][j];
        auto q = exact_divide(num, prev);
        if (!q) throw std::logic_error("fraction-free elimination produced an inexact division");
        m[i][j] = *q;
      }
      m[i][c] = Polynomial(nvars);
    }
    prev = m[r][c];
    ++r;
  }
  return r;
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, unsigned degree) {
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i == nvars) {
      out.push_back(cur);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
    cur[i] = 0;
  };
  rec(0, degree);
  return out;
}

// Solves sum_k c_k F_k = target with deg c_k <= bound; nullopt if no solution.
std::optional<std::vector<Polynomial>> bounded_solve(const std::vector<std::vector<Polynomial>>& frame,
                                                     const std::vector<Polynomial>& target, std::size_t nvars,
                                                     unsigned bound) {
  const auto monos = monomials_up_to(nvars, bound);
  const std::size_t unknowns = frame.size() * monos.size();
  std::map<std::pair<std::size_t, Exponents>, std::size_t> row_of;
  std::vector<std::map<std::size_t, Rational>> rows;
  std::vector<Rational> rhs;
  auto row_index = [&](std::size_t comp, const Exponents& e) {
    auto [it, inserted] = row_of.emplace(std::make_pair(comp, e), rows.size());
    if (inserted) {
      rows.emplace_back();
      rhs.emplace_back(0);
    }
    return it->second;
  };
  for (std::size_t k = 0; k < frame.size(); ++k) {
    for (std::size_t m = 0; m < monos.size(); ++m) {
      const std::size_t col = k * monos.size() + m;
      for (std::size_t comp = 0; comp < nvars; ++comp) {
        for (const auto& [e, c] : frame[k][comp].terms()) {
          Exponents sum = e;
          for (std::size_t t = 0; t < nvars; ++t) sum[t] += monos[m][t];
          rows[row_index(comp, sum)][col] += c;
        }
      }
    }
  }
  for (std::size_t comp = 0; comp < nvars; ++comp)
    for (const auto& [e, c] : target[comp].terms()) rhs[row_index(comp, e)] += c;

  // Gauss-Jordan over Q on the sparse rows.
  std::vector<std::size_t> pivot_row_of_col(unknowns, SIZE_MAX);
  std::size_t r = 0;
  const std::size_t nrows = rows.size();
  for (std::size_t col = 0; col < unknowns && r < nrows; ++col) {
    std::size_t p = r;
    while (p < nrows && (rows[p].count(col) == 0 || rows[p][col] == 0)) ++p;
    if (p == nrows) continue;
    std::swap(rows[p], rows[r]);
    std::swap(rhs[p], rhs[r]);
    Rational inv = 1 / rows[r][col];
    for (auto& [c, v] : rows[r]) v *= inv;
    rhs[r] *= inv;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == r) continue;
      auto it = rows[i].find(col);
      if (it == rows[i].end() || it->second == 0) continue;
      Rational f = it->second;
      for (const auto& [c, v] : rows[r]) {
        rows[i][c] -= f * v;
        if (rows[i][c] == 0) rows[i].erase(c);
      }
      rhs[i] -= f * rhs[r];
    }
    pivot_row_of_col[col] = r;
    ++r;
  }
  for (std::size_t i = r; i < nrows; ++i)
    if (rhs[i] != 0) return std::nullopt;

  std::vector<Polynomial> coeffs(frame.size(), Polynomial(nvars));
  for (std::size_t col = 0; col < unknowns; ++col) {
    if (pivot_row_of_col[col] == SIZE_MAX) continue;
    const Rational& v = rhs[pivot_row_of_col[col]];
    if (v != 0) coeffs[col / monos.size()] += Polynomial::monomial(nvars, monos[col % monos.size()], v);
  }
  return coeffs;
}

}  // namespace

std::size_t symbolic_rank(const std::vector<std::vector<Polynomial>>& rows) {
  if (rows.empty()) return 0;
  auto m = rows;
  return bareiss(m, rows[0].empty() ? 0 : rows[0][0].nvars());
}

std::size_t symbolic_rank(const std::vector<Multivector>& fields) { return symbolic_rank(field_rows(fields)); }

Polynomial polynomial_determinant(std::vector<std::vector<Polynomial>> m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("determinant of an empty matrix");
  for (const auto& row : m)
    if (row.size() != n) throw std::invalid_argument("determinant needs a square matrix");
  const std::size_t nvars = m[0][0].nvars();
  int sign = 1;
  std::size_t rank = bareiss(m, nvars, &sign);
  if (rank < n) return Polynomial(nvars);
  Polynomial d = m[n - 1][n - 1];
  return sign > 0 ? d : -d;
}

std::string to_string(Involutivity v) {
  switch (v) {
    case Involutivity::Involutive: return "involutive";
    case Involutivity::NotInvolutive: return "not-involutive";
    case Involutivity::Inconclusive: return "inconclusive";
  }
  return "?";
}

InvolutivityReport involutivity_check(const PolyFrame& frame, unsigned degree_bound) {
  const std::size_t n = frame.nvars;
  for (const auto& f : frame.fields)
    if (f.nvars() != n) throw std::invalid_argument("frame field lives in the wrong ring");
  const auto rows = field_rows(frame.fields);
  const bool square_full_rank = frame.fields.size() == n && symbolic_rank(rows) == n;

  InvolutivityReport rep;
  rep.outcome = Involutivity::Involutive;
  for (std::size_t i = 0; i < frame.fields.size(); ++i) {
    for (std::size_t j = i + 1; j < frame.fields.size(); ++j) {
      BracketCertificate cert;
      cert.i = i;
      cert.j = j;
      cert.bracket = schouten_bracket(frame.fields[i], frame.fields[j]);
      std::vector<Polynomial> target(n, Polynomial(n));
      for (std::size_t c = 0; c < n; ++c) target[c] = cert.bracket.component({c});
      if (auto sol = bounded_solve(rows, target, n, degree_bound)) {
        cert.found = true;
        cert.coefficients = *sol;
        rep.certificates.push_back(std::move(cert));
        continue;
      }
      const std::string pair = "[F" + std::to_string(i) + ",F" + std::to_string(j) + "]";
      if (!square_full_rank) {
        rep.outcome = Involutivity::Inconclusive;
        rep.message += pair + " not reached with degree bound " + std::to_string(degree_bound) + "; ";
        rep.certificates.push_back(std::move(cert));
        continue;
      }
      // Cramer: c_k = det(F with row k replaced by the bracket) / det(F)
      Polynomial det = polynomial_determinant(rows);
      bool polynomial = true;
      std::vector<Polynomial> coeffs;
      for (std::size_t k = 0; k < n && polynomial; ++k) {
        auto m = rows;
        m[k] = target;
        auto q = exact_divide(polynomial_determinant(m), det);
        if (!q) polynomial = false;
        else coeffs.push_back(*q);
      }
      if (polynomial) {
        cert.found = true;
        cert.coefficients = coeffs;
        rep.message += pair + " needed coefficients above the degree bound; ";
      } else {
        rep.outcome = Involutivity::NotInvolutive;
        rep.message += pair + " has non-polynomial coefficients; ";
      }
      rep.certificates.push_back(std::move(cert));
    }
  }
  return rep;
}

namespace {

void sample_chart(const Polynomial& f, const Box& box, std::size_t grid_n, TransversalityReport& rep,
                  const std::function<std::array<double, 2>(double, double)>& label) {
  const Polynomial fx = f.derivative(0), fy = f.derivative(1);
  const Polynomial fxx = fx.derivative(0), fxy = fx.derivative(1), fyy = fy.derivative(1);
  const double hx = (box.xmax - box.xmin) / static_cast<double>(grid_n - 1);
  const double hy = (box.ymax - box.ymin) / static_cast<double>(grid_n - 1);
  const double h = std::max(hx, hy);
  for (std::size_t a = 0; a < grid_n; ++a) {
    for (std::size_t b = 0; b < grid_n; ++b) {
      std::vector<double> p{box.xmin + hx * static_cast<double>(a), box.ymin + hy * static_cast<double>(b)};
      ++rep.samples;
      const double v = std::abs(f.evaluate(p));
      const double gx = fx.evaluate(p), gy = fy.evaluate(p);
      const double hxx = fxx.evaluate(p), hxy = fxy.evaluate(p), hyy = fyy.evaluate(p);
      const double hess = std::sqrt(hxx * hxx + 2 * hxy * hxy + hyy * hyy);
      const double grad2 = gx * gx + gy * gy;
      if (grad2 <= 4 * hess * v && v <= hess * h * h) {
        rep.ok = false;
        rep.suspects.push_back(label(p[0], p[1]));
      }
    }
  }
}

}  // namespace

TransversalityReport transversality_sample_check(const Polynomial& f, const Box& box, std::size_t grid_n) {
  if (f.nvars() != 2) throw std::invalid_argument("transversality check expects a polynomial in two variables");
  if (grid_n < 2) throw std::invalid_argument("grid size must be at least 2");
  TransversalityReport rep;
  sample_chart(f, box, grid_n, rep, [](double x, double y) { return std::array<double, 2>{x, y}; });
  return rep;
}

TransversalityReport transversality_sample_check_rp2(const Polynomial& f, std::size_t grid_n) {
  if (f.nvars() != 3) throw std::invalid_argument("projective check expects a polynomial in three variables");
  if (grid_n < 2) throw std::invalid_argument("grid size must be at least 2");
  TransversalityReport rep;
  for (std::size_t fixed = 0; fixed < 3; ++fixed) {
    // chart {X_fixed = 1}; the remaining coordinates become (x, y)
    std::vector<Polynomial> sub;
    std::size_t next = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == fixed) sub.push_back(Polynomial::constant(2, 1));
      else sub.push_back(Polynomial::variable(2, next++));
    }
    Polynomial g = f.substitute(sub);
    if (g.is_zero()) throw std::invalid_argument("projective polynomial vanishes on an affine chart");
    sample_chart(g, Box{}, grid_n, rep, [](double x, double y) { return std::array<double, 2>{x, y}; });
  }
  return rep;
}

}  // namespace logsymp
