#include "logsymp/multivector.hpp"

#include <algorithm>
#include <sstream>

namespace logsymp {

namespace {

// Sign of sorting idx; 0 when an index repeats.
int sort_sign(std::vector<std::size_t>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

// theta_I theta_J = sign * theta_{I u J}
int merge_sign(const IndexSet& a, const IndexSet& b, IndexSet& out) {
  std::size_t inversions = 0;
  for (auto x : a)
    for (auto y : b) {
      if (x == y) return 0;
      if (x > y) ++inversions;
    }
  out.clear();
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return inversions % 2 ? -1 : 1;
}

void require_same_ring(const Multivector& a, const Multivector& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("multivector variable-count mismatch");
}

std::vector<IndexSet> subsets(std::size_t n, std::size_t k) {
  std::vector<IndexSet> out;
  IndexSet cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

RationalFunction rational_det(std::vector<std::vector<RationalFunction>> m, std::size_t nvars) {
  const std::size_t k = m.size();
  if (k == 0) return RationalFunction(Polynomial::constant(nvars, 1));
  if (k == 1) return m[0][0];
  RationalFunction total(nvars);
  for (std::size_t j = 0; j < k; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<RationalFunction>> minor;
    for (std::size_t i = 1; i < k; ++i) {
      std::vector<RationalFunction> row;
      for (std::size_t c = 0; c < k; ++c)
        if (c != j) row.push_back(m[i][c]);
      minor.push_back(std::move(row));
    }
    RationalFunction term = m[0][j] * rational_det(std::move(minor), nvars);
    total = j % 2 ? total - term : total + term;
  }
  return total;
}

Polynomial pfaffian_rec(const std::vector<std::vector<Polynomial>>& a, const std::vector<std::size_t>& idx,
                        std::size_t nvars) {
  if (idx.empty()) return Polynomial::constant(nvars, 1);
  Polynomial total(nvars);
  const std::size_t first = idx[0];
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const Polynomial& entry = a[first][idx[j]];
    if (entry.is_zero()) continue;
    std::vector<std::size_t> rest;
    for (std::size_t t = 1; t < idx.size(); ++t)
      if (t != j) rest.push_back(idx[t]);
    Polynomial term = entry * pfaffian_rec(a, rest, nvars);
    // (-1)^j with j counted from 2 in the 1-based expansion
    if (j % 2 == 0) total -= term;
    else total += term;
  }
  return total;
}

}  // namespace

Multivector Multivector::function(const Polynomial& f) {
  Multivector m(f.nvars(), 0);
  m.add({}, f);
  return m;
}

Multivector Multivector::vector_field(const std::vector<Polynomial>& components) {
  Multivector m(components.size(), 1);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].nvars() != components.size())
      throw std::invalid_argument("vector field component lives in the wrong ring");
    m.add({i}, components[i]);
  }
  return m;
}

Multivector Multivector::basis(std::size_t nvars, std::vector<std::size_t> indices) {
  for (auto i : indices)
    if (i >= nvars) throw std::invalid_argument("basis index out of range");
  Multivector m(nvars, indices.size());
  int s = sort_sign(indices);
  if (s != 0) m.add(indices, Polynomial::constant(nvars, s));
  return m;
}

Multivector Multivector::bivector(std::size_t nvars,
                                  const std::map<std::pair<std::size_t, std::size_t>, Polynomial>& entries) {
  Multivector m(nvars, 2);
  for (const auto& [ij, f] : entries) m += f * basis(nvars, {ij.first, ij.second});
  return m;
}

Polynomial Multivector::component(const IndexSet& idx) const {
  auto it = comps_.find(idx);
  return it == comps_.end() ? Polynomial(nvars_) : it->second;
}

Polynomial Multivector::entry(std::vector<std::size_t> idx) const {
  int s = sort_sign(idx);
  if (s == 0) return Polynomial(nvars_);
  Polynomial c = component(idx);
  return s > 0 ? c : -c;
}

void Multivector::add(const IndexSet& idx, const Polynomial& coeff) {
  if (coeff.nvars() != nvars_) throw std::invalid_argument("coefficient lives in the wrong ring");
  if (idx.size() != degree_) {
    if (!comps_.empty()) throw std::invalid_argument("multivector degree mismatch");
    degree_ = idx.size();
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= nvars_ || (i > 0 && idx[i - 1] >= idx[i]))
      throw std::invalid_argument("multivector index tuple must be strictly increasing and in range");
  }
  if (coeff.is_zero()) return;
  auto [it, inserted] = comps_.emplace(idx, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) comps_.erase(it);
  }
}

Multivector& Multivector::operator+=(const Multivector& o) {
  require_same_ring(*this, o);
  for (const auto& [idx, c] : o.comps_) add(idx, c);
  return *this;
}

Multivector& Multivector::operator-=(const Multivector& o) {
  require_same_ring(*this, o);
  for (const auto& [idx, c] : o.comps_) add(idx, -c);
  return *this;
}

Multivector operator*(const Polynomial& f, const Multivector& m) {
  Multivector r(m.nvars_, m.degree_);
  for (const auto& [idx, c] : m.comps_) r.add(idx, f * c);
  return r;
}

Multivector operator*(const Rational& c, const Multivector& m) {
  Multivector r(m.nvars_, m.degree_);
  for (const auto& [idx, v] : m.comps_) r.add(idx, c * v);
  return r;
}

Multivector Multivector::derivative(std::size_t var) const {
  return map_coefficients([var](const Polynomial& p) { return p.derivative(var); });
}

Multivector Multivector::map_coefficients(const std::function<Polynomial(const Polynomial&)>& f) const {
  Multivector r(nvars_, degree_);
  for (const auto& [idx, c] : comps_) r.add(idx, f(c));
  return r;
}

std::string Multivector::to_string(const std::vector<std::string>& names) const {
  if (comps_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, c] : comps_) {
    if (!first) os << " + ";
    first = false;
    std::string coeff = c.to_string(names);
    if (idx.empty()) {
      os << coeff;
      continue;
    }
    if (c.terms().size() > 1) os << '(' << coeff << ')';
    else if (coeff == "-1") os << '-';
    else if (coeff != "1") os << coeff << ' ';
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "∧" : "") << "∂" << names.at(idx[i]);
  }
  return os.str();
}

Multivector wedge(const Multivector& a, const Multivector& b) {
  require_same_ring(a, b);
  Multivector r(a.nvars(), a.degree() + b.degree());
  IndexSet merged;
  for (const auto& [ia, ca] : a.components())
    for (const auto& [ib, cb] : b.components()) {
      int s = merge_sign(ia, ib, merged);
      if (s == 0) continue;
      Polynomial c = ca * cb;
      r.add(merged, s > 0 ? c : -c);
    }
  return r;
}

namespace {

// Right derivative by theta_i: removes i, sign (-1)^(number of indices after i).
Multivector right_theta_derivative(const Multivector& m, std::size_t i) {
  Multivector r(m.nvars(), m.degree() == 0 ? 0 : m.degree() - 1);
  for (const auto& [idx, c] : m.components()) {
    auto it = std::find(idx.begin(), idx.end(), i);
    if (it == idx.end()) continue;
    std::size_t after = static_cast<std::size_t>(idx.end() - it) - 1;
    IndexSet rest(idx.begin(), it);
    rest.insert(rest.end(), it + 1, idx.end());
    r.add(rest, after % 2 ? -c : c);
  }
  return r;
}

}  // namespace

Multivector schouten_bracket(const Multivector& p, const Multivector& q) {
  require_same_ring(p, q);
  const std::size_t n = p.nvars();
  const std::size_t pd = p.degree(), qd = q.degree();
  const std::size_t out_degree = pd + qd == 0 ? 0 : pd + qd - 1;
  Multivector r(n, out_degree);
  if (pd + qd == 0) return r;
  const bool odd = ((pd + 1) * (qd + 1)) % 2 == 1;  // (p-1)(q-1) parity
  for (std::size_t i = 0; i < n; ++i) {
    if (pd > 0) r += wedge(right_theta_derivative(p, i), q.derivative(i));
    if (qd > 0) {
      Multivector t = wedge(right_theta_derivative(q, i), p.derivative(i));
      if (odd) r += t;
      else r -= t;
    }
  }
  return r;
}

Polynomial pfaffian(const Multivector& pi) {
  const std::size_t n = pi.nvars();
  if (pi.degree() != 2 && !pi.is_zero()) throw std::invalid_argument("pfaffian needs a bivector");
  if (n % 2 != 0) throw std::invalid_argument("pfaffian needs an even number of variables");
  std::vector<std::vector<Polynomial>> a(n, std::vector<Polynomial>(n, Polynomial(n)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a[i][j] = pi.entry({i, j});
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return pfaffian_rec(a, idx, n);
}

Multivector modular_vector_field(const Multivector& pi) {
  if (pi.degree() != 2 && !pi.is_zero()) throw std::invalid_argument("modular vector field needs a bivector");
  const std::size_t n = pi.nvars();
  std::vector<Polynomial> z(n, Polynomial(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k) z[i] += pi.entry({i, k}).derivative(k);
  return Multivector::vector_field(z);
}

bool is_poisson(const Multivector& pi) { return schouten_bracket(pi, pi).is_zero(); }

std::vector<std::string> validate_chart(const RationalChartChange& c) {
  std::vector<std::string> failures;
  const std::size_t n = c.nvars();
  if (c.psi.size() != n) {
    failures.push_back("phi and psi have different lengths");
    return failures;
  }
  for (const auto& f : c.phi)
    if (f.nvars() != n) failures.push_back("phi component lives in the wrong ring");
  for (const auto& f : c.psi)
    if (f.nvars() != n) failures.push_back("psi component lives in the wrong ring");
  if (!failures.empty()) return failures;
  for (std::size_t i = 0; i < n; ++i) {
    RationalFunction back = compose(c.phi[i], c.psi);
    if (!(back == RationalFunction(Polynomial::variable(n, i))))
      failures.push_back("phi o psi differs from the identity in coordinate " + std::to_string(i));
    RationalFunction fwd = c.psi[i].substitute(c.phi);
    if (!(fwd == RationalFunction(Polynomial::variable(n, i))))
      failures.push_back("psi o phi differs from the identity in coordinate " + std::to_string(i));
  }
  return failures;
}

RationalChartChange identity_chart(std::size_t nvars) {
  RationalChartChange c;
  for (std::size_t i = 0; i < nvars; ++i) {
    c.phi.push_back(Polynomial::variable(nvars, i));
    c.psi.emplace_back(Polynomial::variable(nvars, i));
  }
  c.note = "identity";
  return c;
}

RationalChartChange blowup_chart(std::size_t nvars, const std::vector<std::size_t>& center, std::size_t pivot) {
  if (std::find(center.begin(), center.end(), pivot) == center.end())
    throw std::invalid_argument("blow-up pivot must belong to the center");
  RationalChartChange c = identity_chart(nvars);
  const Polynomial up = Polynomial::variable(nvars, pivot);
  for (auto j : center) {
    if (j >= nvars) throw std::invalid_argument("blow-up center index out of range");
    if (j == pivot) continue;
    c.phi[j] = up * Polynomial::variable(nvars, j);
    c.psi[j] = RationalFunction(Polynomial::variable(nvars, j), up);
  }
  c.note = "blow-up chart, pivot coordinate " + std::to_string(pivot);
  return c;
}

Multivector chart_transform(const Multivector& p, const RationalChartChange& c) {
  auto failures = validate_chart(c);
  if (!failures.empty()) throw std::invalid_argument("invalid chart change: " + failures.front());
  const std::size_t n = c.nvars();
  if (p.nvars() != n) throw std::invalid_argument("multivector and chart have different dimensions");
  const std::size_t k = p.degree();

  // jac[a][i] = (d psi_a / d x_i) o phi
  std::vector<std::vector<RationalFunction>> jac(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i) jac[a].push_back(c.psi[a].derivative(i).substitute(c.phi));

  std::vector<std::pair<IndexSet, RationalFunction>> pulled;
  for (const auto& [idx, coeff] : p.components()) pulled.emplace_back(idx, RationalFunction(coeff.substitute(c.phi)));

  Multivector out(n, k);
  for (const auto& target : subsets(n, k)) {
    RationalFunction total(n);
    for (const auto& [idx, coeff] : pulled) {
      std::vector<std::vector<RationalFunction>> minor(k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t s = 0; s < k; ++s) minor[r].push_back(jac[target[r]][idx[s]]);
      total = total + coeff * rational_det(std::move(minor), n);
    }
    if (total.is_zero()) continue;
    auto poly = total.as_polynomial();
    if (!poly) {
      std::string tuple;
      for (auto t : target) tuple += (tuple.empty() ? "" : ",") + std::to_string(t);
      throw NotLiftable("not liftable on this chart: component (" + tuple + ") has denominator " +
                            total.denominator().to_string(default_names(n)),
                        total.denominator());
    }
    out.add(target, *poly);
  }
  return out;
}

RationalFunction chart_jacobian(const RationalChartChange& c) {
  const std::size_t n = c.nvars();
  std::vector<std::vector<RationalFunction>> jac(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i) jac[a].push_back(c.psi[a].derivative(i).substitute(c.phi));
  return rational_det(std::move(jac), n);
}

unsigned vanishing_order(const Polynomial& p, std::size_t var) {
  if (var >= p.nvars()) throw std::invalid_argument("variable index out of range");
  return p.min_exponent(var);
}

DegeneracyReport degenerate_transverse_check(const Multivector& pi, const std::vector<std::size_t>& normal_vars) {
  if (pi.degree() != 2 && !pi.is_zero()) throw std::invalid_argument("degeneracy check needs a bivector");
  const std::size_t n = pi.nvars();
  std::vector<bool> normal(n, false);
  for (auto a : normal_vars) {
    if (a >= n) throw std::invalid_argument("normal variable out of range");
    normal[a] = true;
  }
  const std::size_t k = normal_vars.size();
  auto names = default_names(n);

  for (const auto& [idx, c] : pi.components()) {
    if ((normal[idx[0]] || normal[idx[1]]) && !c.restrict_zero(normal_vars).is_zero()) {
      throw NotPoissonSubmanifold("L is not Poisson: component pairing d" + names[idx[0]] + ", d" + names[idx[1]] +
                                  " does not vanish on L");
    }
  }

  DegeneracyReport rep;
  rep.pi_normal = Multivector(n, 2);
  for (const auto& [idx, c] : pi.components()) {
    if (!normal[idx[0]] || !normal[idx[1]]) continue;
    Polynomial lin(n);
    for (auto v : normal_vars) lin += c.derivative(v).restrict_zero(normal_vars) * Polynomial::variable(n, v);
    rep.pi_normal.add(idx, lin);
  }

  std::vector<Polynomial> v(n, Polynomial(n)), euler(n, Polynomial(n));
  if (k >= 2) {
    for (auto a : normal_vars) {
      for (auto cvar : normal_vars)
        if (a != cvar) v[a] += rep.pi_normal.entry({a, cvar}).derivative(cvar);
      v[a] *= Rational(1, static_cast<long>(k - 1));
    }
  }
  for (auto a : normal_vars) euler[a] = Polynomial::variable(n, a);
  rep.v = Multivector::vector_field(v);
  rep.residual = rep.pi_normal - wedge(rep.v, Multivector::vector_field(euler));
  rep.degenerate = rep.residual.is_zero();
  return rep;
}

}  // namespace logsymp
