#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace logsymp {

using Rational = mpq_class;
using Exponents = std::vector<unsigned>;

// Parses "3", "-1/2", "0.25"; accepts U+2212 as a minus sign.
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);

/// Multivariate polynomial with exact rational coefficients. Terms are kept
/// in lexicographic order of exponent vectors; zero coefficients are never stored.
class Polynomial {
 public:
  explicit Polynomial(std::size_t nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t i);
  static Polynomial monomial(std::size_t nvars, Exponents e, const Rational& c);

  std::size_t nvars() const { return nvars_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int total_degree() const;  // -1 for the zero polynomial
  unsigned degree_in(std::size_t var) const;
  // Largest power of x_var dividing the polynomial.
  unsigned min_exponent(std::size_t var) const;

  // Largest term in lex order; requires a nonzero polynomial.
  std::pair<Exponents, Rational> leading_term() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial derivative(std::size_t var) const;
  Polynomial pow(unsigned k) const;
  // Replaces x_i by values[i]; the result lives in the values' ring.
  Polynomial substitute(const std::vector<Polynomial>& values) const;
  // Sets the listed variables to zero.
  Polynomial restrict_zero(const std::vector<std::size_t>& vars) const;
  // Part of total degree exactly d in the listed variables.
  Polynomial homogeneous_part(const std::vector<std::size_t>& vars, unsigned d) const;
  // Same polynomial in a ring with more variables appended.
  Polynomial extend(std::size_t nvars) const;

  double evaluate(const std::vector<double>& x) const;
  Rational evaluate_exact(const std::vector<Rational>& x) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void add_term(const Exponents& e, const Rational& c);
  std::size_t nvars_;
  std::map<Exponents, Rational> terms_;
};

// Quotient a / b when b divides a exactly, otherwise nullopt.
std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b);

std::vector<std::string> default_names(std::size_t nvars);

/// Parses expressions such as "x*(x-1)*(x-1/2) - y^2" over the given
/// variable names. Division is only allowed by nonzero constants.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names);

/// Quotient of polynomials. Normalized so the denominator has leading
/// coefficient 1 and shares no monomial factor with the numerator; when the
/// denominator divides the numerator the result is stored with denominator 1.
class RationalFunction {
 public:
  explicit RationalFunction(std::size_t nvars = 0);
  RationalFunction(Polynomial num);
  RationalFunction(Polynomial num, Polynomial den);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  std::size_t nvars() const { return num_.nvars(); }
  bool is_polynomial() const { return den_.is_constant(); }
  std::optional<Polynomial> as_polynomial() const;
  bool is_zero() const { return num_.is_zero(); }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  RationalFunction operator-() const;
  friend bool operator==(const RationalFunction& a, const RationalFunction& b);

  RationalFunction derivative(std::size_t var) const;
  RationalFunction substitute(const std::vector<Polynomial>& values) const;
  RationalFunction substitute(const std::vector<RationalFunction>& values) const;
  double evaluate(const std::vector<double>& x) const;

  std::string to_string(const std::vector<std::string>& names) const;

 private:
  void normalize();
  Polynomial num_;
  Polynomial den_;
};

// Evaluates p at rational-function arguments.
RationalFunction compose(const Polynomial& p, const std::vector<RationalFunction>& values);

}  // namespace logsymp
