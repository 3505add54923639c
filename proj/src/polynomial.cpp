#include "logsymp/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace logsymp {

namespace {

std::string ascii_minus(std::string s) {
  const std::string minus = "\xE2\x88\x92";
  for (std::size_t pos; (pos = s.find(minus)) != std::string::npos;) s.replace(pos, minus.size(), "-");
  return s;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text = ascii_minus(raw);
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    bool neg = text[0] == '-';
    std::string body = neg || text[0] == '+' ? text.substr(1) : text;
    dot = body.find('.');
    std::string digits = body.substr(0, dot) + body.substr(dot + 1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw std::invalid_argument("bad decimal literal '" + raw + "'");
    mpz_class num(digits, 10), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, body.size() - dot - 1);
    Rational q(num, den);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  if (text[0] == '+') text = text.substr(1);
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational literal '" + raw + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + raw + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  if (i >= nvars) throw std::invalid_argument("variable index out of range");
  Exponents e(nvars, 0);
  e[i] = 1;
  return monomial(nvars, e, 1);
}

Polynomial Polynomial::monomial(std::size_t nvars, Exponents e, const Rational& c) {
  if (e.size() != nvars) throw std::invalid_argument("exponent vector length mismatch");
  Polynomial p(nvars);
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(),
                                                             terms_.begin()->first.end(),
                                                             [](unsigned e) { return e == 0; }));
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Exponents(nvars_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (unsigned k : e) s += static_cast<int>(k);
    d = std::max(d, s);
  }
  return d;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.at(var));
  return d;
}

unsigned Polynomial::min_exponent(std::size_t var) const {
  if (terms_.empty()) throw std::invalid_argument("vanishing order of the zero polynomial is undefined");
  unsigned m = terms_.begin()->first.at(var);
  for (const auto& [e, c] : terms_) m = std::min(m, e.at(var));
  return m;
}

std::pair<Exponents, Rational> Polynomial::leading_term() const {
  if (terms_.empty()) throw std::invalid_argument("zero polynomial has no leading term");
  return *terms_.rbegin();
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial ring mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw std::invalid_argument("polynomial ring mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("polynomial ring mismatch");
  Polynomial r(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e.at(var) == 0) continue;
    Exponents d = e;
    --d[var];
    r.add_term(d, c * e[var]);
  }
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(nvars_, 1), base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& values) const {
  if (values.size() != nvars_) throw std::invalid_argument("substitute: wrong number of values");
  const std::size_t target = values.empty() ? 0 : values[0].nvars();
  Polynomial r(target);
  // Cache powers per variable.
  std::vector<std::vector<Polynomial>> powers(nvars_);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(target, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(constant(target, 1));
      while (cache.size() <= e[i]) cache.push_back(cache.back() * values[i]);
      if (e[i]) t = t * cache[e[i]];
    }
    r += t;
  }
  return r;
}

Polynomial Polynomial::restrict_zero(const std::vector<std::size_t>& vars) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (std::all_of(vars.begin(), vars.end(), [&](std::size_t v) { return e.at(v) == 0; })) r.add_term(e, c);
  }
  return r;
}

Polynomial Polynomial::homogeneous_part(const std::vector<std::size_t>& vars, unsigned d) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (auto v : vars) s += e.at(v);
    if (s == d) r.add_term(e, c);
  }
  return r;
}

Polynomial Polynomial::extend(std::size_t nvars) const {
  if (nvars < nvars_) throw std::invalid_argument("extend: cannot drop variables");
  Polynomial r(nvars);
  for (const auto& [e, c] : terms_) {
    Exponents f = e;
    f.resize(nvars, 0);
    r.add_term(f, c);
  }
  return r;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
  if (x.size() != nvars_) throw std::invalid_argument("evaluate: wrong number of coordinates");
  double s = 0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i)
      if (e[i]) t *= std::pow(x[i], static_cast<int>(e[i]));
    s += t;
  }
  return s;
}

Rational Polynomial::evaluate_exact(const std::vector<Rational>& x) const {
  if (x.size() != nvars_) throw std::invalid_argument("evaluate: wrong number of coordinates");
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    bool unit_monomial = std::any_of(e.begin(), e.end(), [](unsigned k) { return k != 0; });
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (!(mag == 1 && unit_monomial)) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      if (wrote) os << '*';
      os << names.at(i);
      if (e[i] > 1) os << '^' << e[i];
      wrote = true;
    }
  }
  return os.str();
}

std::optional<Polynomial> exact_divide(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::invalid_argument("division by the zero polynomial");
  const std::size_t n = a.nvars();
  Polynomial q(n), r = a;
  const auto [be, bc] = b.leading_term();
  while (!r.is_zero()) {
    auto [re, rc] = r.leading_term();
    Exponents d(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (re[i] < be[i]) return std::nullopt;
      d[i] = re[i] - be[i];
    }
    Polynomial t = Polynomial::monomial(n, d, rc / bc);
    q += t;
    r -= t * b;
  }
  return q;
}

std::vector<std::string> default_names(std::size_t nvars) {
  if (nvars <= 3) {
    std::vector<std::string> n{"x", "y", "z"};
    n.resize(nvars);
    return n;
  }
  std::vector<std::string> n;
  for (std::size_t i = 0; i < nvars; ++i) n.push_back("x" + std::to_string(i + 1));
  return n;
}

namespace {

class Parser {
 public:
  Parser(std::string text, const std::vector<std::string>& names) : s_(ascii_minus(std::move(text))), names_(names) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("polynomial parse error at " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (eat('+')) p += term();
      else if (eat('-')) p -= term();
      else return p;
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    while (true) {
      if (eat('*')) {
        p = p * unary();
      } else if (eat('/')) {
        Polynomial d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        p *= 1 / d.constant_term();
      } else {
        skip();
        // implicit multiplication: "2x", "x(y+1)"
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '(' ||
                                 s_[pos_] == '_'))
          p = p * unary();
        else
          return p;
      }
    }
  }

  Polynomial unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a non-negative integer");
      base = base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Polynomial atom() {
    skip();
    const std::size_t n = names_.size();
    if (eat('(')) {
      Polynomial p = expr();
      if (!eat(')')) fail("missing ')'");
      return p;
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return Polynomial::constant(n, parse_rational(s_.substr(start, pos_ - start)));
    }
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < n; ++i)
        if (names_[i] == name) return Polynomial::variable(n, i);
      fail("unknown variable '" + name + "'");
    }
    fail("expected a number, variable or '('");
  }

  std::string s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names) {
  return Parser(text, names).parse();
}

RationalFunction::RationalFunction(std::size_t nvars) : num_(nvars), den_(Polynomial::constant(nvars, 1)) {}

RationalFunction::RationalFunction(Polynomial num) : num_(std::move(num)) {
  den_ = Polynomial::constant(num_.nvars(), 1);
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::invalid_argument("rational function with zero denominator");
  if (num_.nvars() != den_.nvars()) throw std::invalid_argument("rational function ring mismatch");
  normalize();
}

void RationalFunction::normalize() {
  const std::size_t n = num_.nvars();
  if (num_.is_zero()) {
    den_ = Polynomial::constant(n, 1);
    return;
  }
  if (auto q = exact_divide(num_, den_)) {
    num_ = *q;
    den_ = Polynomial::constant(n, 1);
    return;
  }
  // cancel the common monomial factor
  Exponents common(n);
  for (std::size_t i = 0; i < n; ++i) common[i] = std::min(num_.min_exponent(i), den_.min_exponent(i));
  if (std::any_of(common.begin(), common.end(), [](unsigned e) { return e != 0; })) {
    Polynomial m = Polynomial::monomial(n, common, 1);
    num_ = *exact_divide(num_, m);
    den_ = *exact_divide(den_, m);
  }
  if (auto q = exact_divide(den_, num_)) {
    // num divides den: a / (a q) = 1 / q
    num_ = Polynomial::constant(n, 1);
    den_ = *q;
  }
  Rational lead = den_.leading_term().second;
  if (lead != 1) {
    num_ *= 1 / lead;
    den_ *= 1 / lead;
  }
}

std::optional<Polynomial> RationalFunction::as_polynomial() const {
  if (!den_.is_constant()) return std::nullopt;
  return num_ * (1 / den_.constant_term());
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw std::invalid_argument("division by the zero rational function");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  return a.num_ * b.den_ == b.num_ * a.den_;
}

RationalFunction RationalFunction::derivative(std::size_t var) const {
  return RationalFunction(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

RationalFunction RationalFunction::substitute(const std::vector<Polynomial>& values) const {
  return RationalFunction(num_.substitute(values), den_.substitute(values));
}

RationalFunction RationalFunction::substitute(const std::vector<RationalFunction>& values) const {
  return compose(num_, values) / compose(den_, values);
}

double RationalFunction::evaluate(const std::vector<double>& x) const { return num_.evaluate(x) / den_.evaluate(x); }

std::string RationalFunction::to_string(const std::vector<std::string>& names) const {
  if (is_polynomial()) return as_polynomial()->to_string(names);
  return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
}

RationalFunction compose(const Polynomial& p, const std::vector<RationalFunction>& values) {
  if (values.size() != p.nvars()) throw std::invalid_argument("compose: wrong number of values");
  if (values.empty()) return RationalFunction(Polynomial::constant(0, p.constant_term()));
  const std::size_t target = values[0].nvars();
  RationalFunction r(target);
  for (const auto& [e, c] : p.terms()) {
    RationalFunction t(Polynomial::constant(target, c));
    for (std::size_t i = 0; i < e.size(); ++i)
      for (unsigned k = 0; k < e[i]; ++k) t = t * values[i];
    r = r + t;
  }
  return r;
}

}  // namespace logsymp
