#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "logsymp/polynomial.hpp"

namespace logsymp {

using IndexSet = std::vector<std::size_t>;  // strictly increasing

/// Polynomial k-vector field on R^n: coefficient of d_{i1} ^ ... ^ d_{ik}
/// stored under the increasing tuple (i1 < ... < ik).
class Multivector {
 public:
  Multivector(std::size_t nvars = 0, std::size_t degree = 0) : nvars_(nvars), degree_(degree) {}

  static Multivector function(const Polynomial& f);
  static Multivector vector_field(const std::vector<Polynomial>& components);
  // Constant basis element d_{i1} ^ ... ^ d_{ik}; indices in any order (sign applied).
  static Multivector basis(std::size_t nvars, std::vector<std::size_t> indices);
  // 2-vector with the given entries above the diagonal (pairs i<j).
  static Multivector bivector(std::size_t nvars, const std::map<std::pair<std::size_t, std::size_t>, Polynomial>& entries);

  std::size_t nvars() const { return nvars_; }
  std::size_t degree() const { return degree_; }
  const std::map<IndexSet, Polynomial>& components() const { return comps_; }
  Polynomial component(const IndexSet& idx) const;
  // Signed coefficient for an arbitrary index order; zero on repeats.
  Polynomial entry(std::vector<std::size_t> idx) const;
  bool is_zero() const { return comps_.empty(); }

  void add(const IndexSet& idx, const Polynomial& coeff);

  Multivector& operator+=(const Multivector& o);
  Multivector& operator-=(const Multivector& o);
  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(const Polynomial& f, const Multivector& m);
  friend Multivector operator*(const Rational& c, const Multivector& m);
  friend bool operator==(const Multivector& a, const Multivector& b) {
    return a.nvars_ == b.nvars_ && (a.comps_.empty() || b.comps_.empty() || a.degree_ == b.degree_) &&
           a.comps_ == b.comps_;
  }

  Multivector derivative(std::size_t var) const;
  Multivector map_coefficients(const std::function<Polynomial(const Polynomial&)>& f) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::size_t nvars_;
  std::size_t degree_;
  std::map<IndexSet, Polynomial> comps_;
};

Multivector wedge(const Multivector& a, const Multivector& b);

Multivector schouten_bracket(const Multivector& p, const Multivector& q);

Polynomial pfaffian(const Multivector& pi);

// Z = (d_k pi^{ik}) d_i
Multivector modular_vector_field(const Multivector& pi);

bool is_poisson(const Multivector& pi);

class NotLiftable : public std::runtime_error {
 public:
  NotLiftable(const std::string& what, Polynomial denominator)
      : std::runtime_error(what), denominator_(std::move(denominator)) {}
  const Polynomial& denominator() const { return denominator_; }

 private:
  Polynomial denominator_;
};

/// x = phi(u) polynomial, u = psi(x) rational.
struct RationalChartChange {
  std::vector<Polynomial> phi;
  std::vector<RationalFunction> psi;
  std::string note;

  std::size_t nvars() const { return phi.size(); }
};

// Checks phi o psi = id and psi o phi = id; returns the failures.
std::vector<std::string> validate_chart(const RationalChartChange& c);

RationalChartChange identity_chart(std::size_t nvars);
// Directional chart of the blow-up of {x_i = 0, i in center} in which
// x_pivot stays the coordinate: x_j = u_pivot u_j for the other center vars.
RationalChartChange blowup_chart(std::size_t nvars, const std::vector<std::size_t>& center, std::size_t pivot);

// Tensor law; throws NotLiftable when a coefficient keeps a denominator.
Multivector chart_transform(const Multivector& p, const RationalChartChange& c);
// det(d psi / d x) composed with phi, as a rational function of u.
RationalFunction chart_jacobian(const RationalChartChange& c);

unsigned vanishing_order(const Polynomial& p, std::size_t var);

class NotPoissonSubmanifold : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DegeneracyReport {
  bool degenerate = false;
  Multivector pi_normal;  // transverse linearization along L
  Multivector v;          // contraction of pi_normal
  Multivector residual;   // pi_normal - v ^ E
};

// L = {x_a = 0 : a in normal_vars}.
DegeneracyReport degenerate_transverse_check(const Multivector& pi, const std::vector<std::size_t>& normal_vars);

}  // namespace logsymp
