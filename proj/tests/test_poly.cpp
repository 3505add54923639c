#include <cmath>
#include <random>

#include "doctest.h"
#include "logsymp/frames.hpp"
#include "logsymp/multivector.hpp"

using namespace logsymp;

namespace {

const std::vector<std::string> XY{"x", "y"};
const std::vector<std::string> XYZ{"x", "y", "z"};
const std::vector<std::string> X4{"x1", "x2", "x3", "x4"};

Polynomial P(const std::string& s, const std::vector<std::string>& names = XY) { return parse_polynomial(s, names); }

Polynomial random_poly(std::mt19937& rng, std::size_t nvars, unsigned max_degree, int terms) {
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, static_cast<int>(max_degree));
  Polynomial p(nvars);
  for (int t = 0; t < terms; ++t) {
    Exponents e(nvars, 0);
    unsigned left = static_cast<unsigned>(deg(rng));
    for (std::size_t i = 0; i < nvars && left > 0; ++i) {
      std::uniform_int_distribution<unsigned> take(0, left);
      e[i] = take(rng);
      left -= e[i];
    }
    p += Polynomial::monomial(nvars, e, coef(rng));
  }
  return p;
}

Multivector random_multivector(std::mt19937& rng, std::size_t nvars, std::size_t degree) {
  std::vector<std::size_t> all(nvars);
  for (std::size_t i = 0; i < nvars; ++i) all[i] = i;
  Multivector m(nvars, degree);
  std::function<void(std::size_t, IndexSet&)> rec = [&](std::size_t start, IndexSet& cur) {
    if (cur.size() == degree) {
      m.add(cur, random_poly(rng, nvars, 2, 2));
      return;
    }
    for (std::size_t i = start; i < nvars; ++i) {
      cur.push_back(i);
      rec(i + 1, cur);
      cur.pop_back();
    }
  };
  IndexSet cur;
  rec(0, cur);
  return m;
}

Rational frac(int a, int b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

int parity_sign(std::size_t a) { return a % 2 ? -1 : 1; }

Multivector vf(std::initializer_list<std::string> comps, const std::vector<std::string>& names = XY) {
  std::vector<Polynomial> c;
  for (const auto& s : comps) c.push_back(P(s, names));
  return Multivector::vector_field(c);
}

Multivector bivec2(const std::string& f) { return P(f) * Multivector::basis(2, {0, 1}); }

}  // namespace

TEST_CASE("polynomial arithmetic agrees with pointwise evaluation") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> val(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial a = random_poly(rng, 3, 3, 4), b = random_poly(rng, 3, 3, 4);
    std::vector<Rational> pt{frac(val(rng), 3), frac(val(rng), 2), frac(val(rng), 1)};
    CHECK((a * b).evaluate_exact(pt) == a.evaluate_exact(pt) * b.evaluate_exact(pt));
    CHECK((a - b).evaluate_exact(pt) == a.evaluate_exact(pt) - b.evaluate_exact(pt));
    if (!b.is_zero()) {
      auto q = exact_divide(a * b, b);
      REQUIRE(q.has_value());
      CHECK(*q == a);
    }
    // derivative against a symmetric difference quotient, exact for cubics after Richardson
    Rational h(1, 1000);
    auto shifted = [&](Rational d) {
      auto p2 = pt;
      p2[1] += d;
      return a.evaluate_exact(p2);
    };
    Rational d1 = (shifted(h) - shifted(-h)) / (2 * h);
    Rational d2 = (shifted(2 * h) - shifted(-2 * h)) / (4 * h);
    CHECK((4 * d1 - d2) / 3 == a.derivative(1).evaluate_exact(pt));
  }
  CHECK_FALSE(exact_divide(P("x^2 + y"), P("x")).has_value());
  CHECK(P("x").total_degree() == 1);
  CHECK(Polynomial(2).total_degree() == -1);
}

TEST_CASE("parser") {
  Polynomial g = P("x*(x-1)*(x-1/2) - y^2");
  for (double x : {-1.5, 0.3, 2.0})
    for (double y : {-0.7, 0.0, 1.1}) CHECK(g.evaluate({x, y}) == doctest::Approx(x * (x - 1) * (x - 0.5) - y * y));
  CHECK(P("x \xE2\x88\x92 y") == P("x - y"));
  CHECK(P("2x(y+1)") == P("2*x*y + 2*x"));
  CHECK(P("(x+y)^3 / 2") == P("x^3/2 + 3/2*x^2*y + 3/2*x*y^2 + y^3/2"));
  CHECK(P("0.25*x") == P("x/4"));
  CHECK_THROWS_AS(P("x/y"), std::invalid_argument);
  CHECK_THROWS_AS(P("q + 1"), std::invalid_argument);
  CHECK_THROWS_AS(P("(x + 1"), std::invalid_argument);
  CHECK(parse_polynomial(P("x^2 - 3*x*y + 1/7").to_string(XY), XY) == P("x^2 - 3*x*y + 1/7"));
}

TEST_CASE("rational functions normalize") {
  RationalFunction r(P("x^2*y"), P("x*y^2"));
  CHECK(r.numerator() == P("x"));
  CHECK(r.denominator() == P("y"));
  RationalFunction s(P("x^2 - 1"), P("x - 1"));
  REQUIRE(s.is_polynomial());
  CHECK(*s.as_polynomial() == P("x + 1"));
  CHECK(RationalFunction(P("x"), P("2*x + 2")) == RationalFunction(P("1/2*x"), P("x + 1")));
  CHECK((RationalFunction(P("1"), P("x")) + RationalFunction(P("1"), P("y"))) ==
        RationalFunction(P("x + y"), P("x*y")));
}

TEST_CASE("schouten bracket examples") {
  Multivector dx = Multivector::basis(2, {0}), dy = Multivector::basis(2, {1});
  Multivector xdxdy = bivec2("x");
  CHECK(schouten_bracket(dx, xdxdy) == Multivector::basis(2, {0, 1}));
  CHECK(schouten_bracket(xdxdy, xdxdy).is_zero());
  CHECK(schouten_bracket(dx, dy).is_zero());
  // [X, f] = X(f)
  CHECK(schouten_bracket(vf({"y", "x^2"}), Multivector::function(P("x*y"))) ==
        Multivector::function(P("y^2 + x^3")));
}

TEST_CASE("schouten bracket on vector fields is the Lie bracket") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Multivector X = random_multivector(rng, 3, 1), Y = random_multivector(rng, 3, 1);
    std::vector<Polynomial> lie(3, Polynomial(3));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k)
        lie[i] += X.component({k}) * Y.component({i}).derivative(k) - Y.component({k}) * X.component({i}).derivative(k);
    CHECK(schouten_bracket(X, Y) == Multivector::vector_field(lie));
  }
}

TEST_CASE("schouten bracket: graded antisymmetry and graded Jacobi on random triples") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> deg(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t p = deg(rng), q = deg(rng), r = deg(rng);
    Multivector A = random_multivector(rng, 3, p), B = random_multivector(rng, 3, q), C = random_multivector(rng, 3, r);
    Multivector ab = schouten_bracket(A, B), ba = schouten_bracket(B, A);
    const int s = parity_sign((p + 1) * (q + 1));
    CHECK((ab + static_cast<Rational>(s) * ba).is_zero());

    Multivector j = static_cast<Rational>(parity_sign((p + 1) * (r + 1))) * schouten_bracket(A, schouten_bracket(B, C)) +
                    static_cast<Rational>(parity_sign((q + 1) * (p + 1))) * schouten_bracket(B, schouten_bracket(C, A)) +
                    static_cast<Rational>(parity_sign((r + 1) * (q + 1))) * schouten_bracket(C, schouten_bracket(A, B));
    CHECK(j.is_zero());
  }
}

TEST_CASE("[pi,pi] is proportional to the Jacobiator of the bracket") {
  std::mt19937 rng(5);
  std::optional<Rational> ratio;
  for (int trial = 0; trial < 15; ++trial) {
    Multivector pi = random_multivector(rng, 3, 2);
    auto e = [&](std::size_t a, std::size_t b) { return pi.entry({a, b}); };
    Polynomial jac(3);
    for (std::size_t l = 0; l < 3; ++l)
      jac += e(0, l) * e(1, 2).derivative(l) + e(1, l) * e(2, 0).derivative(l) + e(2, l) * e(0, 1).derivative(l);
    Polynomial sch = schouten_bracket(pi, pi).component({0, 1, 2});
    if (jac.is_zero()) {
      CHECK(sch.is_zero());
      continue;
    }
    auto q = exact_divide(sch, jac);
    REQUIRE(q.has_value());
    REQUIRE(q->is_constant());
    if (!ratio) ratio = q->constant_term();
    CHECK(q->constant_term() == *ratio);
  }
  REQUIRE(ratio.has_value());
  CHECK(abs(*ratio) == 2);
  Multivector so3 = Multivector::bivector(3, {{{1, 2}, P("x", XYZ)}, {{0, 2}, P("-y", XYZ)}, {{0, 1}, P("z", XYZ)}});
  CHECK(is_poisson(so3));
}

TEST_CASE("pfaffian") {
  CHECK(pfaffian(bivec2("x")) == P("x"));
  CHECK(pfaffian(bivec2("x*(x-1)*(x-1/2) - y^2")) == P("x*(x-1)*(x-1/2) - y^2"));
  Multivector four = Multivector::bivector(4, {{{0, 1}, P("x1", X4)}, {{2, 3}, P("1", X4)}});
  CHECK(pfaffian(four) == P("x1", X4));
  CHECK_THROWS_AS(pfaffian(Multivector::bivector(3, {{{0, 1}, P("1", XYZ)}})), std::invalid_argument);

  // Pf^2 = det of the antisymmetric coefficient matrix
  std::mt19937 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    Multivector pi = random_multivector(rng, 4, 2);
    std::vector<std::vector<Polynomial>> m(4, std::vector<Polynomial>(4, Polynomial(4)));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) m[i][j] = pi.entry({i, j});
    Polynomial pf = pfaffian(pi);
    CHECK(pf * pf == polynomial_determinant(m));
  }
}

TEST_CASE("modular vector field") {
  CHECK(modular_vector_field(bivec2("x")) == vf({"0", "-1"}));
  CHECK(modular_vector_field(bivec2("x*(x-1)*(x-1/2) - y^2")) == vf({"-2*y", "-(3*x^2 - 3*x + 1/2)"}));
  CHECK(modular_vector_field(bivec2("1")).is_zero());
  // Z is tangent to the zero set of the Pfaffian
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial f = random_poly(rng, 2, 4, 4);
    if (f.is_zero()) continue;
    Multivector z = modular_vector_field(f * Multivector::basis(2, {0, 1}));
    Polynomial zf = z.component({0}) * f.derivative(0) + z.component({1}) * f.derivative(1);
    CHECK(exact_divide(zf, pfaffian(f * Multivector::basis(2, {0, 1}))).has_value());
  }
}

TEST_CASE("chart transforms on the blow-up charts") {
  const auto c1 = blowup_chart(2, {0, 1}, 0);  // (x, y) = (u, uv)
  const auto c2 = blowup_chart(2, {0, 1}, 1);  // (x, y) = (zw, w)
  CHECK(validate_chart(c1).empty());
  CHECK(validate_chart(c2).empty());
  CHECK(c1.phi[1] == P("x*y"));
  CHECK(c2.phi[0] == P("x*y"));

  CHECK(chart_transform(bivec2("x"), c1) == bivec2("1"));
  CHECK(chart_transform(bivec2("x"), c2) == bivec2("x"));
  CHECK(chart_transform(bivec2("x^2 - y"), identity_chart(2)) == bivec2("x^2 - y"));

  try {
    chart_transform(bivec2("1"), c1);
    FAIL("expected NotLiftable");
  } catch (const NotLiftable& e) {
    CHECK(e.denominator() == P("x"));
  }

  RationalChartChange bad = c1;
  bad.psi[1] = RationalFunction(P("y"));
  CHECK_FALSE(validate_chart(bad).empty());
  CHECK_THROWS_AS(chart_transform(bivec2("x"), bad), std::invalid_argument);

  // numeric oracle: {u,v} at u0 equals pi(d psi_u, d psi_v) at phi(u0)
  Multivector pi = bivec2("x*(x - y + 2)");
  Multivector lifted = chart_transform(pi, c1);
  for (auto [u, v] : std::vector<std::pair<double, double>>{{0.5, 1.5}, {-1.2, 0.3}, {2.0, -0.7}}) {
    double x = u, y = u * v, h = 1e-6;
    auto psi = [](double xx, double yy) { return std::array<double, 2>{xx, yy / xx}; };
    double dpsi[2][2];
    for (int a = 0; a < 2; ++a) {
      dpsi[a][0] = (psi(x + h, y)[a] - psi(x - h, y)[a]) / (2 * h);
      dpsi[a][1] = (psi(x, y + h)[a] - psi(x, y - h)[a]) / (2 * h);
    }
    double pxy = pi.component({0, 1}).evaluate({x, y});
    double expected = pxy * (dpsi[0][0] * dpsi[1][1] - dpsi[0][1] * dpsi[1][0]);
    CHECK(lifted.component({0, 1}).evaluate({u, v}) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("pfaffian transforms by the Jacobian determinant") {
  std::mt19937 rng(17);
  for (const auto& c : {blowup_chart(2, {0, 1}, 0), blowup_chart(2, {0, 1}, 1)}) {
    for (int trial = 0; trial < 6; ++trial) {
      Polynomial g = random_poly(rng, 2, 3, 3);
      Multivector pi = (P("x*y") * g) * Multivector::basis(2, {0, 1});
      RationalFunction expected = RationalFunction(pfaffian(pi).substitute(c.phi)) * chart_jacobian(c);
      CHECK(RationalFunction(pfaffian(chart_transform(pi, c))) == expected);
    }
  }
  // four variables: blow up {x1 = x2 = 0}; x1 d1^d2 + d3^d4 lifts with Pfaffian x1 after the chart
  Multivector pi = Multivector::bivector(4, {{{0, 1}, P("x1", X4)}, {{2, 3}, P("1", X4)}});
  for (std::size_t pivot : {0u, 1u}) {
    auto c = blowup_chart(4, {0, 1}, pivot);
    Multivector lifted = chart_transform(pi, c);
    RationalFunction expected = RationalFunction(pfaffian(pi).substitute(c.phi)) * chart_jacobian(c);
    CHECK(RationalFunction(pfaffian(lifted)) == expected);
  }
}

TEST_CASE("vanishing order") {
  CHECK(vanishing_order(P("x^2*y + x^3"), 0) == 2);
  Polynomial pf = pfaffian(chart_transform(bivec2("x"), blowup_chart(2, {0, 1}, 1)));
  CHECK(pf == P("x"));
  CHECK(vanishing_order(pf, 1) == 0);
  CHECK(vanishing_order(pf, 0) == 1);
  CHECK(vanishing_order(P("5"), 0) == 0);
  CHECK_THROWS_AS(vanishing_order(Polynomial(2), 0), std::invalid_argument);
}

TEST_CASE("degenerate transverse check") {
  auto r1 = degenerate_transverse_check(bivec2("x"), {0});
  CHECK(r1.degenerate);
  CHECK(r1.residual.is_zero());

  Multivector pi2 = Multivector::bivector(4, {{{0, 1}, P("x1", X4)}, {{2, 3}, P("1", X4)}});
  auto r2 = degenerate_transverse_check(pi2, {0, 1});
  CHECK(r2.degenerate);
  CHECK(r2.pi_normal == Multivector::bivector(4, {{{0, 1}, P("x1", X4)}}));
  CHECK(r2.v == Multivector::vector_field({P("0", X4), P("-1", X4), P("0", X4), P("0", X4)}));

  Multivector pi3 = Multivector::bivector(4, {{{0, 1}, P("1", X4)}, {{2, 3}, P("x1", X4)}});
  CHECK_THROWS_AS(degenerate_transverse_check(pi3, {0, 1}), NotPoissonSubmanifold);

  // v ^ E itself, and a transverse structure not of that form
  Multivector e3 = vf({"x", "y", "z"}, XYZ);
  Multivector ve = wedge(Multivector::basis(3, {0}), e3);
  auto r4 = degenerate_transverse_check(ve, {0, 1, 2});
  CHECK(r4.degenerate);
  CHECK(r4.v == Multivector::basis(3, {0}));
  auto r5 = degenerate_transverse_check(P("z", XYZ) * Multivector::basis(3, {0, 1}), {0, 1, 2});
  CHECK_FALSE(r5.degenerate);
  CHECK(r5.residual == P("z", XYZ) * Multivector::basis(3, {0, 1}));
}

TEST_CASE("elementary modifications of frames") {
  PolyFrame tangent = coordinate_frame(2);
  PolyFrame logtan = elementary_modification(tangent, 1, 0);
  CHECK(logtan.fields[0] == vf({"x", "0"}));
  CHECK(logtan.fields[1] == vf({"0", "1"}));
  PolyFrame poisson = elementary_modification(logtan, std::vector<std::size_t>{1}, 0);
  CHECK(poisson.fields[0] == vf({"x", "0"}));
  CHECK(poisson.fields[1] == vf({"0", "x"}));
  PolyFrame next = elementary_modification(poisson, 1, 0);
  CHECK(next.fields[0] == vf({"x^2", "0"}));
  CHECK(next.fields[1] == vf({"0", "x"}));
  CHECK(next.modification_count == 1);
  CHECK(next.hypersurface_var == std::optional<std::size_t>(0));
  CHECK_THROWS_AS(elementary_modification(tangent, 3, 0), std::invalid_argument);

  // twice along the same variable multiplies by x^2; the span away from {x=0} is unchanged
  std::mt19937 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    PolyFrame f;
    f.nvars = 3;
    for (int k = 0; k < 3; ++k) f.fields.push_back(random_multivector(rng, 3, 1));
    if (symbolic_rank(f.fields) < 3) continue;
    PolyFrame twice = elementary_modification(elementary_modification(f, 2, 0), 2, 0);
    for (std::size_t k = 0; k < 2; ++k) CHECK(twice.fields[k] == P("x^2", XYZ) * f.fields[k]);
    CHECK(twice.fields[2] == f.fields[2]);
    std::vector<Multivector> stacked = f.fields;
    stacked.insert(stacked.end(), twice.fields.begin(), twice.fields.end());
    CHECK(symbolic_rank(twice.fields) == 3);
    CHECK(symbolic_rank(stacked) == 3);
  }
}

TEST_CASE("symbolic rank agrees with rank at a generic rational point") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Multivector> fields;
    for (int k = 0; k < 3; ++k) fields.push_back(random_multivector(rng, 3, 1));
    if (trial % 3 == 0) fields[2] = P("x - y", XYZ) * fields[0] + fields[1];
    std::vector<Rational> pt{frac(7, 3), frac(-11, 5), frac(13, 2)};
    std::vector<std::vector<Rational>> m;
    for (const auto& f : fields) {
      std::vector<Rational> row;
      for (std::size_t i = 0; i < 3; ++i) row.push_back(f.component({i}).evaluate_exact(pt));
      m.push_back(row);
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < 3 && rank < 3; ++c) {
      std::size_t p = rank;
      while (p < 3 && m[p][c] == 0) ++p;
      if (p == 3) continue;
      std::swap(m[p], m[rank]);
      for (std::size_t i = rank + 1; i < 3; ++i) {
        Rational f = m[i][c] / m[rank][c];
        for (std::size_t j = 0; j < 3; ++j) m[i][j] -= f * m[rank][j];
      }
      ++rank;
    }
    CHECK(symbolic_rank(fields) == rank);
  }
}

TEST_CASE("involutivity") {
  auto frame = [](std::vector<Multivector> f) {
    PolyFrame p;
    p.nvars = f[0].nvars();
    p.fields = std::move(f);
    return p;
  };
  auto r1 = involutivity_check(frame({vf({"x", "0"}), vf({"0", "1"})}), 2);
  CHECK(r1.outcome == Involutivity::Involutive);
  CHECK(r1.certificates[0].bracket.is_zero());

  auto r2 = involutivity_check(frame({vf({"x", "0"}), vf({"0", "x"})}), 2);
  CHECK(r2.outcome == Involutivity::Involutive);
  CHECK(r2.certificates[0].bracket == vf({"0", "x"}));
  CHECK(r2.certificates[0].coefficients[1] == P("1"));

  auto r3 = involutivity_check(frame({vf({"x^2", "0"}), vf({"0", "x"})}), 3);
  CHECK(r3.outcome == Involutivity::Involutive);
  CHECK(r3.certificates[0].bracket == vf({"0", "x^2"}));
  CHECK(r3.certificates[0].coefficients[0] == Polynomial(2));
  CHECK(r3.certificates[0].coefficients[1] == P("x"));

  // [d_x, x d_y] = d_y = (1/x)(x d_y): not in the polynomial module
  auto r4 = involutivity_check(frame({vf({"1", "0"}), vf({"0", "x"})}), 4);
  CHECK(r4.outcome == Involutivity::NotInvolutive);

  // degree bound too small on a square frame: decided exactly, certificate kept
  auto r5 = involutivity_check(frame({vf({"x^2", "0"}), vf({"0", "x"})}), 0);
  CHECK(r5.outcome == Involutivity::Involutive);
  CHECK(r5.certificates[0].coefficients[1] == P("x"));

  // non-square frame beyond the degree bound: reported as inconclusive
  auto r6 = involutivity_check(frame({vf({"1", "0", "0"}, XYZ), vf({"0", "x", "0"}, XYZ)}), 2);
  CHECK(r6.outcome == Involutivity::Inconclusive);
  CHECK_FALSE(r6.message.empty());
}

TEST_CASE("transversality sampling") {
  CHECK(transversality_sample_check(P("x"), Box{}, 50).ok);
  auto sq = transversality_sample_check(P("x^2"), Box{}, 51);
  CHECK_FALSE(sq.ok);
  for (const auto& s : sq.suspects) CHECK(std::abs(s[0]) < 0.05);
  auto ell = transversality_sample_check(P("x*(x-1)*(x-1/2) - y^2"), Box{-2, 2, -2, 2}, 200);
  CHECK(ell.ok);
  CHECK(ell.samples == 40000);
  CHECK(ell.certification == "heuristic");
  // node of x(x-1)^2 - y^2 at (1,0) is caught, grid passes through it
  CHECK_FALSE(transversality_sample_check(P("x*(x-1)^2 - y^2"), Box{-2, 2, -2, 2}, 201).ok);

  Polynomial cubic = parse_polynomial("X*(X-Z)*(X-Z/2) - Y^2*Z", {"X", "Y", "Z"});
  CHECK(transversality_sample_check_rp2(cubic, 101).ok);
  CHECK_FALSE(transversality_sample_check_rp2(parse_polynomial("X^2", {"X", "Y", "Z"}), 101).ok);
}
