#include "logsymp/groupoids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace logsymp {

namespace {

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// Coordinate on or off the divisor: exactly zero one time in ten.
double maybe_zero(Rng& rng) { return uniform(rng, 0, 1) < 0.1 ? 0.0 : uniform(rng, -2, 2); }

double rel_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]) / std::max({1.0, std::abs(a[i]), std::abs(b[i])}));
  return d;
}

double angle_gap(double a, double b) {
  double d = std::remainder(a - b, 2 * std::numbers::pi);
  return std::abs(d);
}

Vec concat(std::initializer_list<Vec> parts) {
  Vec out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Vec slice(const Vec& v, std::size_t from, std::size_t count) {
  return Vec(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + count));
}

Vec uniform_vec(Rng& rng, std::size_t n, double a, double b) {
  Vec v(n);
  for (auto& x : v) x = uniform(rng, a, b);
  return v;
}

void set_defaults(ChartGroupoidModel& m) {
  if (!m.object_distance) m.object_distance = rel_distance;
  if (!m.arrow_distance) m.arrow_distance = rel_distance;
  if (!m.arrow_valid) m.arrow_valid = [n = m.arrow_dim](const Vec& g) { return g.size() == n; };
}

ChartGroupoidModel pair_model(std::size_t n) {
  if (n == 0) throw std::invalid_argument("pair groupoid needs n >= 1");
  ChartGroupoidModel m;
  m.kind = "pair";
  m.params = {{"n", n}};
  m.object_dim = n;
  m.arrow_dim = 2 * n;
  m.fiber_dim = n;
  // arrows (x, x'): target x, source x'
  m.source = [n](const Vec& g) { return slice(g, n, n); };
  m.target = [n](const Vec& g) { return slice(g, 0, n); };
  m.multiply = [n](const Vec& g, const Vec& h) { return concat({slice(h, 0, n), slice(g, n, n)}); };
  m.identity = [](const Vec& x) { return concat({x, x}); };
  m.inverse = [n](const Vec& g) { return concat({slice(g, n, n), slice(g, 0, n)}); };
  m.arrow_with_source = [](const Vec& x, const Vec& u) { return concat({u, x}); };
  m.sample_object = [n](Rng& rng) { return uniform_vec(rng, n, -2, 2); };
  m.sample_fiber = [n](Rng& rng) { return uniform_vec(rng, n, -2, 2); };
  set_defaults(m);
  return m;
}

ChartGroupoidModel log_pair_model(std::size_t n) {
  if (n == 0) throw std::invalid_argument("log pair groupoid needs n >= 1");
  const std::size_t k = n - 1;
  ChartGroupoidModel m;
  m.kind = "log_pair";
  m.params = {{"n", n}};
  m.object_dim = n;
  m.arrow_dim = 2 * n;
  m.fiber_dim = n;
  // arrows (lambda, x1, y, y'), s = (x1, y), t = (lambda x1, y')
  m.arrow_valid = [n](const Vec& g) { return g.size() == 2 * n && g[0] > 0; };
  m.source = [k](const Vec& g) { return concat({{g[1]}, slice(g, 2, k)}); };
  m.target = [k](const Vec& g) { return concat({{g[0] * g[1]}, slice(g, 2 + k, k)}); };
  m.multiply = [k](const Vec& g, const Vec& h) {
    return concat({{g[0] * h[0], g[1]}, slice(g, 2, k), slice(h, 2 + k, k)});
  };
  m.identity = [k](const Vec& x) { return concat({{1.0, x[0]}, slice(x, 1, k), slice(x, 1, k)}); };
  m.inverse = [k](const Vec& g) { return concat({{1 / g[0], g[0] * g[1]}, slice(g, 2 + k, k), slice(g, 2, k)}); };
  m.arrow_with_source = [k](const Vec& x, const Vec& u) {
    return concat({{u[0], x[0]}, slice(x, 1, k), slice(u, 1, k)});
  };
  m.sample_object = [k](Rng& rng) { return concat({{maybe_zero(rng)}, uniform_vec(rng, k, -2, 2)}); };
  m.sample_fiber = [k](Rng& rng) { return concat({{std::exp(uniform(rng, -1, 1))}, uniform_vec(rng, k, -2, 2)}); };
  set_defaults(m);
  return m;
}

ChartGroupoidModel symp_pair_model() {
  ChartGroupoidModel m;
  m.kind = "symp_pair_2d";
  m.params = nlohmann::json::object();
  m.object_dim = 2;
  m.arrow_dim = 4;
  m.fiber_dim = 2;
  // arrows (lambda, mu, x, y), s = (x, y), t = (lambda x, y + mu x)
  m.arrow_valid = [](const Vec& g) { return g.size() == 4 && g[0] > 0; };
  m.source = [](const Vec& g) { return Vec{g[2], g[3]}; };
  m.target = [](const Vec& g) { return Vec{g[0] * g[2], g[3] + g[1] * g[2]}; };
  m.multiply = [](const Vec& g, const Vec& h) { return Vec{g[0] * h[0], g[1] + g[0] * h[1], g[2], g[3]}; };
  m.identity = [](const Vec& x) { return Vec{1.0, 0.0, x[0], x[1]}; };
  m.inverse = [](const Vec& g) { return Vec{1 / g[0], -g[1] / g[0], g[0] * g[2], g[3] + g[1] * g[2]}; };
  m.arrow_with_source = [](const Vec& x, const Vec& u) { return Vec{u[0], u[1], x[0], x[1]}; };
  m.sample_object = [](Rng& rng) { return Vec{maybe_zero(rng), uniform(rng, -2, 2)}; };
  m.sample_fiber = [](Rng& rng) { return Vec{std::exp(uniform(rng, -1, 1)), uniform(rng, -2, 2)}; };
  set_defaults(m);
  return m;
}

ChartGroupoidModel ssc_logtan_model() {
  ChartGroupoidModel m;
  m.kind = "ssc_logtan_local";
  m.params = nlohmann::json::object();
  m.object_dim = 2;
  m.arrow_dim = 4;
  m.fiber_dim = 2;
  // (R+ scaling on the normal line) x (fundamental groupoid of the circle):
  // arrows (a, r, theta, tau), s = (r, theta), t = (a r, theta + tau)
  m.arrow_valid = [](const Vec& g) { return g.size() == 4 && g[0] > 0; };
  m.source = [](const Vec& g) { return Vec{g[1], g[2]}; };
  m.target = [](const Vec& g) { return Vec{g[0] * g[1], g[2] + g[3]}; };
  m.multiply = [](const Vec& g, const Vec& h) { return Vec{g[0] * h[0], g[1], g[2], g[3] + h[3]}; };
  m.identity = [](const Vec& x) { return Vec{1.0, x[0], x[1], 0.0}; };
  m.inverse = [](const Vec& g) { return Vec{1 / g[0], g[0] * g[1], g[2] + g[3], -g[3]}; };
  m.arrow_with_source = [](const Vec& x, const Vec& u) { return Vec{u[0], x[0], x[1], u[1]}; };
  m.sample_object = [](Rng& rng) { return Vec{maybe_zero(rng), uniform(rng, 0, 2 * std::numbers::pi)}; };
  m.sample_fiber = [](Rng& rng) { return Vec{std::exp(uniform(rng, -1, 1)), uniform(rng, -7, 7)}; };
  m.object_distance = [](const Vec& a, const Vec& b) {
    return std::max(rel_distance({a[0]}, {b[0]}), angle_gap(a[1], b[1]));
  };
  m.arrow_distance = [](const Vec& a, const Vec& b) {
    return std::max({rel_distance({a[0], a[1], a[3]}, {b[0], b[1], b[3]}), angle_gap(a[2], b[2])});
  };
  set_defaults(m);
  return m;
}

ChartGroupoidModel scaling_action_model() {
  ChartGroupoidModel m;
  m.kind = "scaling_action";
  m.params = nlohmann::json::object();
  m.object_dim = 1;
  m.arrow_dim = 2;
  m.fiber_dim = 1;
  // R acting on R by rescaling: arrows (t, x), s = x, t = e^t x
  m.source = [](const Vec& g) { return Vec{g[1]}; };
  m.target = [](const Vec& g) { return Vec{std::exp(g[0]) * g[1]}; };
  m.multiply = [](const Vec& g, const Vec& h) { return Vec{g[0] + h[0], g[1]}; };
  m.identity = [](const Vec& x) { return Vec{0.0, x[0]}; };
  m.inverse = [](const Vec& g) { return Vec{-g[0], std::exp(g[0]) * g[1]}; };
  m.arrow_with_source = [](const Vec& x, const Vec& u) { return Vec{u[0], x[0]}; };
  m.sample_object = [](Rng& rng) { return Vec{maybe_zero(rng)}; };
  m.sample_fiber = [](Rng& rng) { return Vec{uniform(rng, -1.5, 1.5)}; };
  set_defaults(m);
  return m;
}

std::size_t param_n(const nlohmann::json& params, std::size_t fallback) {
  if (!params.is_object() || !params.contains("n")) return fallback;
  const auto& n = params.at("n");
  if (!n.is_number_integer() || n.get<long>() < 1) throw std::invalid_argument("parameter n must be a positive integer");
  return n.get<std::size_t>();
}

}  // namespace

ChartGroupoidModel make_model(const std::string& kind, const nlohmann::json& params) {
  if (kind == "pair") return pair_model(param_n(params, 1));
  if (kind == "log_pair") return log_pair_model(param_n(params, 2));
  if (kind == "symp_pair_2d") return symp_pair_model();
  if (kind == "ssc_logtan_local") return ssc_logtan_model();
  if (kind == "scaling_action") return scaling_action_model();
  if (kind == "glued_circle") return glue_models(circle_atlas());
  throw std::invalid_argument("unknown groupoid model kind '" + kind + "'");
}

nlohmann::json to_json(const CheckReport& r) {
  return {{"name", r.name},         {"passed", r.passed},     {"maxResidual", r.max_residual},
          {"samples", r.samples},   {"failures", r.failures}, {"details", r.details}};
}

namespace {

void record(CheckReport& rep, const std::string& law, double residual, double tol) {
  auto& slot = rep.details[law];
  if (slot.is_null() || slot.get<double>() < residual) slot = residual;
  rep.max_residual = std::max(rep.max_residual, residual);
  if (!(residual <= tol) && rep.failures.size() < 10) {
    std::ostringstream os;
    os << law << " residual " << residual;
    rep.failures.push_back(os.str());
  }
}

}  // namespace

CheckReport check_groupoid_axioms(const ChartGroupoidModel& m, std::size_t samples, double tol, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "axioms";
  rep.samples = samples;
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    Vec g = m.sample_arrow(rng);
    Vec h = m.arrow_with_source(m.target(g), m.sample_fiber(rng));
    Vec k = m.arrow_with_source(m.target(h), m.sample_fiber(rng));
    if (!m.arrow_valid(g) || !m.arrow_valid(h) || !m.arrow_valid(k))
      throw std::invalid_argument("sampler produced an arrow outside the model domain");
    Vec gh = m.multiply(g, h);
    record(rep, "composable", m.object_distance(m.target(g), m.source(h)), tol);
    record(rep, "associativity", m.arrow_distance(m.multiply(gh, k), m.multiply(g, m.multiply(h, k))), tol);
    record(rep, "source of product", m.object_distance(m.source(gh), m.source(g)), tol);
    record(rep, "target of product", m.object_distance(m.target(gh), m.target(h)), tol);
    record(rep, "left unit", m.arrow_distance(m.multiply(m.identity(m.source(g)), g), g), tol);
    record(rep, "right unit", m.arrow_distance(m.multiply(g, m.identity(m.target(g))), g), tol);
    Vec inv = m.inverse(g);
    record(rep, "inverse source", m.object_distance(m.source(inv), m.target(g)), tol);
    record(rep, "inverse left", m.arrow_distance(m.multiply(g, inv), m.identity(m.source(g))), tol);
    record(rep, "inverse right", m.arrow_distance(m.multiply(inv, g), m.identity(m.target(g))), tol);
    Vec x = m.sample_object(rng);
    record(rep, "unit source", m.object_distance(m.source(m.identity(x)), x), tol);
    record(rep, "unit target", m.object_distance(m.target(m.identity(x)), x), tol);
    if (!m.arrow_valid(gh) || !m.arrow_valid(inv)) record(rep, "closure", 1.0, tol);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

Eigen::MatrixXd numeric_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z, double h) {
  const Vec f0 = f(z);
  Eigen::MatrixXd j(f0.size(), z.size());
  auto central = [&](std::size_t c, double step) {
    Vec zp = z, zm = z;
    zp[c] += step;
    zm[c] -= step;
    Vec a = f(zp), b = f(zm);
    Eigen::VectorXd d(f0.size());
    for (std::size_t r = 0; r < f0.size(); ++r) d[static_cast<Eigen::Index>(r)] = (a[r] - b[r]) / (2 * step);
    return d;
  };
  for (std::size_t c = 0; c < z.size(); ++c) {
    Eigen::VectorXd coarse = central(c, h), fine = central(c, h / 2);
    j.col(static_cast<Eigen::Index>(c)) = (4 * fine - coarse) / 3;
  }
  return j;
}

namespace {

Eigen::Index numeric_rank(const Eigen::MatrixXd& a, double thr) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thr) ++r;
  return r;
}

// Orthonormal basis of the column span.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& a, double thr) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thr) ++r;
  return svd.matrixU().leftCols(r);
}

double containment_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& basis) {
  double worst = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Eigen::VectorXd v = a.col(c);
    Eigen::VectorXd res = basis.cols() ? Eigen::VectorXd(v - basis * (basis.transpose() * v)) : v;
    worst = std::max(worst, res.norm() / std::max(1.0, v.norm()));
  }
  return worst;
}

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace

std::vector<Vec> default_anchor_objects(const ChartGroupoidModel& m, std::size_t random_samples, std::uint64_t seed) {
  std::vector<Vec> pts;
  Vec zero(m.object_dim, 0.0);
  pts.push_back(zero);
  Vec on_d = zero;
  if (m.object_dim > 1) on_d[1] = 0.7;
  pts.push_back(on_d);
  Vec off = zero;
  off[0] = 0.5;
  pts.push_back(off);
  off[0] = -1.25;
  pts.push_back(off);
  Rng rng(seed);
  for (std::size_t i = 0; i < random_samples; ++i) pts.push_back(m.sample_object(rng));
  return pts;
}

CheckReport anchor_frame_check(const ChartGroupoidModel& m, const PolyFrame& expected, const std::vector<Vec>& objects,
                               double tol) {
  if (expected.nvars != m.object_dim) throw std::invalid_argument("expected frame lives on the wrong object chart");
  CheckReport rep;
  rep.name = "anchor";
  rep.samples = objects.size();
  const double thr = 1e-6;
  for (const auto& x : objects) {
    Vec z0 = m.identity(x);
    Eigen::MatrixXd js = numeric_jacobian(m.source, z0), jt = numeric_jacobian(m.target, z0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(js, Eigen::ComputeFullV);
    Eigen::Index rank_s = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > thr) ++rank_s;
    Eigen::MatrixXd kernel = svd.matrixV().rightCols(js.cols() - rank_s);
    Eigen::MatrixXd image = jt * kernel;

    Eigen::MatrixXd frame(m.object_dim, expected.fields.size());
    for (std::size_t k = 0; k < expected.fields.size(); ++k)
      for (std::size_t i = 0; i < m.object_dim; ++i)
        frame(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = expected.fields[k].component({i}).evaluate(x);

    const Eigen::Index ra = numeric_rank(image, thr), rb = numeric_rank(frame, thr);
    if (ra != rb) {
      rep.max_residual = std::max(rep.max_residual, 1.0);
      rep.details["rank mismatches"] = rep.details.value("rank mismatches", 0) + 1;
      if (rep.failures.size() < 10)
        rep.failures.push_back("rank " + std::to_string(ra) + " vs expected " + std::to_string(rb) + " at " +
                               format_point(x));
      continue;
    }
    record(rep, "anchor in frame", containment_residual(image, span_basis(frame, thr)), tol);
    record(rep, "frame in anchor", containment_residual(frame, span_basis(image, thr)), tol);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

RationalFunction TwoForm::at(std::size_t a, std::size_t b) const {
  const std::size_t n = dim();
  if (a == b) return RationalFunction(n);
  auto it = coeff.find({std::min(a, b), std::max(a, b)});
  if (it == coeff.end()) return RationalFunction(n);
  return a < b ? it->second : -it->second;
}

Eigen::MatrixXd TwoForm::evaluate(const Vec& z) const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [ab, c] : coeff) {
    double v = c.evaluate(z);
    w(static_cast<Eigen::Index>(ab.first), static_cast<Eigen::Index>(ab.second)) = v;
    w(static_cast<Eigen::Index>(ab.second), static_cast<Eigen::Index>(ab.first)) = -v;
  }
  return w;
}

bool TwoForm::is_closed() const {
  const std::size_t n = dim();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        RationalFunction d = at(b, c).derivative(a) - at(a, c).derivative(b) + at(a, b).derivative(c);
        if (!d.is_zero()) return false;
      }
  return true;
}

nlohmann::json TwoForm::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [ab, c] : coeff)
    terms.push_back({{"i", coords[ab.first]}, {"j", coords[ab.second]}, {"coef", c.to_string(coords)}});
  return {{"coords", coords}, {"terms", terms}};
}

TwoForm pullback_area_form(const std::vector<std::string>& coords, const RationalFunction& f1,
                           const RationalFunction& f2, const RationalFunction& density) {
  const std::size_t n = coords.size();
  if (f1.nvars() != n || f2.nvars() != n) throw std::invalid_argument("pullback components live in the wrong ring");
  if (density.nvars() != 2) throw std::invalid_argument("area-form density must be a function of two variables");
  TwoForm w;
  w.coords = coords;
  RationalFunction g = density.substitute(std::vector<RationalFunction>{f1, f2});
  std::vector<RationalFunction> d1, d2;
  for (std::size_t a = 0; a < n; ++a) {
    d1.push_back(f1.derivative(a));
    d2.push_back(f2.derivative(a));
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      RationalFunction c = g * (d1[a] * d2[b] - d1[b] * d2[a]);
      if (!c.is_zero()) w.coeff.emplace(std::make_pair(a, b), c);
    }
  return w;
}

TwoForm operator+(const TwoForm& a, const TwoForm& b) {
  if (a.coords != b.coords) throw std::invalid_argument("two-forms on different charts");
  TwoForm r = a;
  for (const auto& [ab, c] : b.coeff) {
    auto it = r.coeff.find(ab);
    if (it == r.coeff.end()) {
      r.coeff.emplace(ab, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) r.coeff.erase(it);
    }
  }
  return r;
}

TwoForm derive_symplectic_form() {
  const std::vector<std::string> coords{"lambda", "mu", "x", "y"};
  auto p = [&](const std::string& s) { return RationalFunction(parse_polynomial(s, coords)); };
  const Polynomial big_x = Polynomial::variable(2, 0);
  const RationalFunction inv_x(Polynomial::constant(2, 1), big_x);
  TwoForm target_part = pullback_area_form(coords, p("lambda*x"), p("y + mu*x"), -inv_x);
  TwoForm source_part = pullback_area_form(coords, p("x"), p("y"), inv_x);
  TwoForm w = target_part + source_part;
  for (const auto& [ab, c] : w.coeff) {
    const Polynomial& den = c.denominator();
    for (std::size_t v : {1u, 2u, 3u})
      if (den.degree_in(v) != 0)
        throw std::logic_error("symplectic form keeps a pole along " + coords[v] + " in coefficient d" +
                               coords[ab.first] + "^d" + coords[ab.second]);
  }
  if (!w.is_closed()) throw std::logic_error("derived two-form is not closed");
  return w;
}

TwoForm pair_symplectic_form() {
  const std::vector<std::string> coords{"xt", "yt", "xs", "ys"};
  auto p = [&](const std::string& s) { return RationalFunction(parse_polynomial(s, coords)); };
  const RationalFunction one(Polynomial::constant(2, 1)), minus_one(Polynomial::constant(2, -1));
  return pullback_area_form(coords, p("xt"), p("yt"), one) + pullback_area_form(coords, p("xs"), p("ys"), minus_one);
}

CheckReport multiplicativity_check(const ChartGroupoidModel& m, const FormField& omega, std::size_t samples,
                                   double tol, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "multiplicative";
  rep.samples = samples;
  Rng rng(seed);
  const std::size_t a = m.arrow_dim;
  // composable pairs parametrized by (g, u) with h = arrow_with_source(t(g), u)
  auto first = [a](const Vec& p) { return slice(p, 0, a); };
  auto second = [&m, a](const Vec& p) { return m.arrow_with_source(m.target(slice(p, 0, a)), slice(p, a, m.fiber_dim)); };
  auto product = [&](const Vec& p) { return m.multiply(first(p), second(p)); };
  for (std::size_t i = 0; i < samples; ++i) {
    Vec g = m.sample_arrow(rng);
    Vec p = concat({g, m.sample_fiber(rng)});
    Eigen::MatrixXd j1 = numeric_jacobian(first, p), j2 = numeric_jacobian(second, p), jm = numeric_jacobian(product, p);
    Eigen::MatrixXd diff = jm.transpose() * omega(product(p)) * jm - j1.transpose() * omega(first(p)) * j1 -
                           j2.transpose() * omega(second(p)) * j2;
    record(rep, "m*w - pr1*w - pr2*w", diff.cwiseAbs().maxCoeff(), tol);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

CheckReport poisson_sign_check(const ChartGroupoidModel& m, const FormField& omega, std::size_t samples, double tol,
                               std::uint64_t seed) {
  if (m.object_dim != 2) throw std::invalid_argument("Poisson sign check expects a surface");
  CheckReport rep;
  rep.name = "poisson sign";
  rep.samples = samples;
  Rng rng(seed);
  std::optional<double> eps;
  for (std::size_t i = 0; i < samples; ++i) {
    Vec g = m.sample_arrow(rng);
    Eigen::MatrixXd p = omega(g).inverse();
    Eigen::MatrixXd js = numeric_jacobian(m.source, g), jt = numeric_jacobian(m.target, g);
    double bs = js.row(0) * p * js.row(1).transpose();
    double bt = jt.row(0) * p * jt.row(1).transpose();
    double xs = m.source(g)[0], xt = m.target(g)[0];
    if (!eps && std::abs(xs) > 0.1) eps = bs / xs > 0 ? 1.0 : -1.0;
    if (!eps) continue;
    record(rep, "source bracket", std::abs(bs - *eps * xs), tol);
    record(rep, "target bracket", std::abs(bt + *eps * xt), tol);
  }
  rep.details["epsilon"] = eps ? nlohmann::json(*eps) : nlohmann::json(nullptr);
  rep.passed = eps.has_value() && rep.max_residual <= tol;
  return rep;
}

CheckReport blowdown_check(const ChartGroupoidModel& src, const ChartGroupoidModel& dst, const GroupoidMap& phi,
                           std::size_t samples, double tol, std::uint64_t seed) {
  if (src.object_dim != dst.object_dim) throw std::invalid_argument("blow-down must be base-preserving");
  CheckReport rep;
  rep.name = "blowdown " + phi.name;
  rep.samples = samples;
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    Vec g = src.sample_arrow(rng);
    Vec h = src.arrow_with_source(src.target(g), src.sample_fiber(rng));
    Vec pg = phi.arrows(g), ph = phi.arrows(h);
    if (!dst.arrow_valid(pg)) {
      record(rep, "image in target domain", 1.0, tol);
      continue;
    }
    record(rep, "multiplicative", dst.arrow_distance(phi.arrows(src.multiply(g, h)), dst.multiply(pg, ph)), tol);
    record(rep, "source", dst.object_distance(dst.source(pg), src.source(g)), tol);
    record(rep, "target", dst.object_distance(dst.target(pg), src.target(g)), tol);
    Vec x = src.sample_object(rng);
    record(rep, "units", dst.arrow_distance(phi.arrows(src.identity(x)), dst.identity(x)), tol);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

CheckReport poisson_map_check(const ChartGroupoidModel& src, const FormField& omega, const GroupoidMap& phi,
                              const std::function<Eigen::MatrixXd(const Vec&)>& target_bivector,
                              std::size_t samples, double tol, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "poisson map " + phi.name;
  rep.samples = samples;
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    Vec g = src.sample_arrow(rng);
    Eigen::MatrixXd j = numeric_jacobian(phi.arrows, g);
    Eigen::MatrixXd pushed = j * omega(g).inverse() * j.transpose();
    record(rep, "bracket of coordinates", (pushed - target_bivector(phi.arrows(g))).cwiseAbs().maxCoeff(), tol);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

std::optional<PolyFrame> expected_anchor_frame(const ChartGroupoidModel& m) {
  const std::size_t n = m.object_dim;
  auto x = [n](std::size_t i) { return Polynomial::variable(n, i); };
  auto field = [n](std::size_t i, const Polynomial& c) {
    std::vector<Polynomial> comps(n, Polynomial(n));
    comps[i] = c;
    return Multivector::vector_field(comps);
  };
  const Polynomial one = Polynomial::constant(n, 1);
  PolyFrame f;
  f.nvars = n;
  if (m.kind == "pair") return coordinate_frame(n);
  if (m.kind == "log_pair" || m.kind == "ssc_logtan_local" || m.kind == "scaling_action") {
    f.fields.push_back(field(0, x(0)));
    for (std::size_t i = 1; i < n; ++i) f.fields.push_back(field(i, one));
    f.hypersurface_var = 0;
    f.modification_count = 1;
    return f;
  }
  if (m.kind == "symp_pair_2d") {
    f.fields = {field(0, x(0)), field(1, x(0))};
    f.hypersurface_var = 0;
    f.modification_count = 2;
    return f;
  }
  return std::nullopt;
}

std::optional<TwoForm> model_symplectic_form(const ChartGroupoidModel& m) {
  if (m.kind == "symp_pair_2d") return derive_symplectic_form();
  if (m.kind == "pair" && m.object_dim == 2) return pair_symplectic_form();
  return std::nullopt;
}

Eigen::MatrixXd pair_blowdown_bivector(const Vec& g) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
  b(0, 1) = g[0];
  b(1, 0) = -g[0];
  b(2, 3) = -g[2];
  b(3, 2) = g[2];
  return b;
}

GroupoidMap symp_to_log_pair() {
  return {"symp_pair_2d -> log_pair", [](const Vec& g) { return Vec{g[0], g[2], g[3], g[3] + g[1] * g[2]}; }};
}

GroupoidMap log_pair_to_pair() {
  return {"log_pair -> pair", [](const Vec& g) { return Vec{g[0] * g[1], g[3], g[1], g[2]}; }};
}

GroupoidMap symp_to_pair() {
  return {"symp_pair_2d -> pair", [](const Vec& g) { return log_pair_to_pair().arrows(symp_to_log_pair().arrows(g)); }};
}

namespace {

struct Atlas {
  GluedAtlas atlas;

  const ChartTransition* transition(std::size_t from, std::size_t to) const {
    for (const auto& t : atlas.transitions)
      if (t.from == from && t.to == to) return &t;
    return nullptr;
  }

  // Re-expresses a chart-tagged arrow in chart `to`, when the transition applies.
  std::optional<Vec> arrow_in(const Vec& g, std::size_t to) const {
    auto from = static_cast<std::size_t>(g[0]);
    Vec coords = slice(g, 1, g.size() - 1);
    if (from == to) return g;
    const auto* t = transition(from, to);
    if (!t || !t->arrow_in_domain(coords)) return std::nullopt;
    return concat({{static_cast<double>(to)}, t->arrow_map(coords)});
  }

  std::optional<Vec> object_in(const Vec& x, std::size_t to) const {
    auto from = static_cast<std::size_t>(x[0]);
    Vec coords = slice(x, 1, x.size() - 1);
    if (from == to) return x;
    const auto* t = transition(from, to);
    if (!t || !t->object_in_domain(coords)) return std::nullopt;
    return concat({{static_cast<double>(to)}, t->object_map(coords)});
  }

  const ChartGroupoidModel& chart(const Vec& v) const { return atlas.charts.at(static_cast<std::size_t>(v[0])); }
};

Vec tag(std::size_t chart, const Vec& v) { return concat({{static_cast<double>(chart)}, v}); }
Vec untag(const Vec& v) { return slice(v, 1, v.size() - 1); }

void check_transition(const GluedAtlas& atlas, const ChartTransition& t, std::size_t samples, double tol, Rng& rng) {
  const auto& a = atlas.charts.at(t.from);
  const auto& b = atlas.charts.at(t.to);
  double worst = 0;
  std::string law;
  auto note = [&](const std::string& what, double r) {
    if (r > worst) {
      worst = r;
      law = what;
    }
  };
  std::size_t done = 0;
  for (std::size_t attempt = 0; attempt < 50 * samples && done < samples; ++attempt) {
    Vec g = a.sample_arrow(rng);
    Vec h = a.arrow_with_source(a.target(g), a.sample_fiber(rng));
    if (!t.arrow_in_domain(g) || !t.arrow_in_domain(h)) continue;
    ++done;
    Vec pg = t.arrow_map(g), ph = t.arrow_map(h);
    note("multiplication", b.arrow_distance(t.arrow_map(a.multiply(g, h)), b.multiply(pg, ph)));
    note("source", b.object_distance(b.source(pg), t.object_map(a.source(g))));
    note("target", b.object_distance(b.target(pg), t.object_map(a.target(g))));
    note("inverse map", a.arrow_distance(t.arrow_inverse(pg), g));
    Vec x = a.source(g);
    note("units", b.arrow_distance(t.arrow_map(a.identity(x)), b.identity(t.object_map(x))));
  }
  if (done == 0) throw GlueError("transition domain could not be sampled");
  if (!(worst <= tol)) {
    std::ostringstream os;
    os << "transition " << t.from << " -> " << t.to << " is not a groupoid isomorphism: " << law << " residual "
       << worst;
    throw GlueError(os.str());
  }
}

}  // namespace

ChartGroupoidModel glue_models(const GluedAtlas& input, std::size_t check_samples, double tol, std::uint64_t seed) {
  if (input.charts.empty()) throw std::invalid_argument("atlas has no charts");
  const auto& c0 = input.charts[0];
  for (const auto& c : input.charts)
    if (c.object_dim != c0.object_dim || c.fiber_dim != c0.fiber_dim || c.arrow_dim != c0.arrow_dim)
      throw std::invalid_argument("atlas charts have different dimensions");
  Rng rng(seed);
  for (const auto& t : input.transitions) {
    if (t.from >= input.charts.size() || t.to >= input.charts.size())
      throw std::invalid_argument("transition refers to a missing chart");
    check_transition(input, t, check_samples, tol, rng);
  }

  auto at = std::make_shared<Atlas>(Atlas{input});
  ChartGroupoidModel m;
  m.kind = input.charts.size() == 2 && input.charts[0].kind == "scaling_action" ? "glued_circle" : "glued";
  m.params = {{"charts", input.charts.size()}};
  m.object_dim = c0.object_dim + 1;
  m.arrow_dim = c0.arrow_dim + 1;
  m.fiber_dim = c0.fiber_dim + 1;

  m.arrow_valid = [at](const Vec& g) {
    if (g.empty() || g[0] < 0 || static_cast<std::size_t>(g[0]) >= at->atlas.charts.size()) return false;
    return at->chart(g).arrow_valid(untag(g));
  };
  m.source = [at](const Vec& g) { return tag(static_cast<std::size_t>(g[0]), at->chart(g).source(untag(g))); };
  m.target = [at](const Vec& g) { return tag(static_cast<std::size_t>(g[0]), at->chart(g).target(untag(g))); };
  m.identity = [at](const Vec& x) { return tag(static_cast<std::size_t>(x[0]), at->chart(x).identity(untag(x))); };
  m.inverse = [at](const Vec& g) { return tag(static_cast<std::size_t>(g[0]), at->chart(g).inverse(untag(g))); };
  m.multiply = [at](const Vec& g, const Vec& h) {
    const auto cg = static_cast<std::size_t>(g[0]), ch = static_cast<std::size_t>(h[0]);
    std::optional<Vec> gg = g, hh = at->arrow_in(h, cg);
    std::size_t c = cg;
    if (!hh) {
      gg = at->arrow_in(g, ch);
      hh = h;
      c = ch;
    }
    if (!gg || !hh) throw GlueError("orbit-cover violation: composable arrows share no chart");
    return tag(c, at->atlas.charts[c].multiply(untag(*gg), untag(*hh)));
  };
  m.arrow_with_source = [at](const Vec& x, const Vec& u) {
    std::vector<Vec> reps;
    for (std::size_t c = 0; c < at->atlas.charts.size(); ++c)
      if (auto y = at->object_in(x, c)) reps.push_back(*y);
    auto pick = std::min(reps.size() - 1, static_cast<std::size_t>(u[0] * static_cast<double>(reps.size())));
    const Vec& y = reps[pick];
    const auto c = static_cast<std::size_t>(y[0]);
    return tag(c, at->atlas.charts[c].arrow_with_source(untag(y), untag(u)));
  };
  m.sample_object = [at](Rng& rng) {
    auto c = std::uniform_int_distribution<std::size_t>(0, at->atlas.charts.size() - 1)(rng);
    return tag(c, at->atlas.charts[c].sample_object(rng));
  };
  m.sample_fiber = [at](Rng& rng) {
    double pick = uniform(rng, 0, 1);
    return concat({{pick}, at->atlas.charts[0].sample_fiber(rng)});
  };
  auto distance = [at](bool arrows) {
    return [at, arrows](const Vec& a, const Vec& b) {
      const auto ca = static_cast<std::size_t>(a[0]), cb = static_cast<std::size_t>(b[0]);
      std::optional<Vec> bb = arrows ? at->arrow_in(b, ca) : at->object_in(b, ca);
      if (bb) {
        const auto& ch = at->atlas.charts[ca];
        return arrows ? ch.arrow_distance(untag(a), untag(*bb)) : ch.object_distance(untag(a), untag(*bb));
      }
      std::optional<Vec> aa = arrows ? at->arrow_in(a, cb) : at->object_in(a, cb);
      if (aa) {
        const auto& ch = at->atlas.charts[cb];
        return arrows ? ch.arrow_distance(untag(*aa), untag(b)) : ch.object_distance(untag(*aa), untag(b));
      }
      return std::numeric_limits<double>::infinity();
    };
  };
  m.arrow_distance = distance(true);
  m.object_distance = distance(false);
  return m;
}

GluedAtlas circle_atlas(bool corrupt_transition) {
  GluedAtlas a;
  a.charts.push_back(scaling_action_model());  // U, containing the point p = 0
  a.charts.push_back(pair_model(1));           // V
  const double eps = 1e-12;
  ChartTransition uv;
  uv.from = 0;
  uv.to = 1;
  uv.arrow_in_domain = [eps](const Vec& g) { return std::abs(g[1]) > eps; };
  if (corrupt_transition)
    uv.arrow_map = [](const Vec& g) { return Vec{1 / g[1], 1 / g[1]}; };
  else
    uv.arrow_map = [](const Vec& g) { return Vec{std::exp(-g[0]) / g[1], 1 / g[1]}; };
  uv.arrow_inverse = [](const Vec& h) { return Vec{std::log(h[1] / h[0]), 1 / h[1]}; };
  uv.object_in_domain = [eps](const Vec& x) { return std::abs(x[0]) > eps; };
  uv.object_map = [](const Vec& x) { return Vec{1 / x[0]}; };
  uv.object_inverse = uv.object_map;

  ChartTransition vu;
  vu.from = 1;
  vu.to = 0;
  // the source-connected part Pair(V+) x Pair(V-)
  vu.arrow_in_domain = [eps](const Vec& h) { return std::abs(h[0]) > eps && std::abs(h[1]) > eps && h[0] * h[1] > 0; };
  vu.arrow_map = uv.arrow_inverse;
  vu.arrow_inverse = uv.arrow_map;
  vu.object_in_domain = uv.object_in_domain;
  vu.object_map = uv.object_map;
  vu.object_inverse = uv.object_map;
  a.transitions = {uv, vu};
  return a;
}

}  // namespace logsymp
