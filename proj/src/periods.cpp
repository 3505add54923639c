#include "logsymp/periods.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace logsymp {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

double agm(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("agm needs positive arguments");
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

double modular_period_elliptic(double t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("elliptic modular period needs 0 < t < 1");
  return std::numbers::pi / agm(1.0, std::sqrt(1.0 - t));
}

double modular_period_series(double t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("elliptic modular period needs 0 < t < 1");
  double c = 1, sum = 1, comp = 0, tn = 1;
  for (int n = 0; n < 10000000; ++n) {
    double r = (2.0 * n + 1) / (2.0 * n + 2);
    c *= r * r;
    tn *= t;
    double term = c * tn;
    // Kahan summation
    double y = term - comp, s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (term * t / (1 - t) < 1e-17 * sum) break;
  }
  return std::numbers::pi * sum;
}

namespace {

struct Field {
  Polynomial f, fx, fy;
  explicit Field(const Polynomial& p) : f(p), fx(p.derivative(0)), fy(p.derivative(1)) {}
  void operator()(const State& p, State& dp, double) const {
    std::vector<double> v{p[0], p[1]};
    dp[0] = fy.evaluate(v);
    dp[1] = -fx.evaluate(v);
  }
  double value(const State& p) const { return f.evaluate({p[0], p[1]}); }
};

}  // namespace

std::array<double, 2> project_to_curve(const Polynomial& f, std::array<double, 2> p, int iterations) {
  const Polynomial fx = f.derivative(0), fy = f.derivative(1);
  for (int i = 0; i < iterations; ++i) {
    std::vector<double> v{p[0], p[1]};
    double val = f.evaluate(v), gx = fx.evaluate(v), gy = fy.evaluate(v);
    double g2 = gx * gx + gy * gy;
    if (g2 == 0) throw std::invalid_argument("gradient vanishes while projecting onto the curve");
    p[0] -= val * gx / g2;
    p[1] -= val * gy / g2;
    if (std::abs(val) < 1e-15) break;
  }
  return p;
}

FlowPeriod modular_period_flow(const Polynomial& f, std::array<double, 2> seed, const FlowOptions& opt) {
  if (f.nvars() != 2) throw std::invalid_argument("period flow expects a polynomial in two variables");
  const Field field(f);
  FlowPeriod res;
  State x = project_to_curve(f, seed);
  res.start = x;
  State z0;
  field(x, z0, 0);
  const double z0n = std::hypot(z0[0], z0[1]);
  if (z0n == 0) throw std::invalid_argument("modular vector field vanishes at the seed");
  const State origin = x;
  auto section = [&](const State& p) { return (p[0] - origin[0]) * z0[0] + (p[1] - origin[1]) * z0[1]; };

  auto controlled = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  odeint::runge_kutta_dopri5<State> single;
  double t = 0, dt = 1e-3 / z0n;
  bool left = false;  // moved away from the section
  // the point must travel at least this far before a crossing counts
  const double min_leave = 1e-6;

  while (res.steps < opt.max_steps && t < opt.max_time) {
    State prev = x;
    const double t_prev = t;
    if (controlled.try_step(field, x, t, dt) != odeint::success) continue;
    ++res.steps;
    x = project_to_curve(f, x, 2);
    controlled.reset();  // the FSAL derivative is stale after projecting
    res.max_drift = std::max(res.max_drift, std::abs(field.value(x)));
    if (std::hypot(x[0], x[1]) > opt.escape_radius) {
      res.outcome = FlowOutcome::NonCompact;
      res.note = "trajectory escaped radius " + std::to_string(opt.escape_radius);
      return res;
    }
    const double s_prev = section(prev), s_now = section(x);
    if (!left && std::hypot(x[0] - origin[0], x[1] - origin[1]) > min_leave && s_now < 0) left = true;
    if (left && s_prev < 0 && s_now >= 0) {
      // locate the crossing inside [t_prev, t] with single steps from prev
      double a = 0, b = t - t_prev, sa = s_prev, sb = s_now;
      for (int it = 0; it < 60 && b - a > 1e-15 * std::max(1.0, t); ++it) {
        double m = sa == sb ? 0.5 * (a + b) : a - sa * (b - a) / (sb - sa);
        if (!(m > a && m < b)) m = 0.5 * (a + b);
        State y = prev;
        single.reset();
        if (m > 0) single.do_step(field, y, t_prev, m);
        double sm = section(y);
        if (sm < 0) {
          a = m;
          sa = sm;
        } else {
          b = m;
          sb = sm;
        }
        if (std::abs(sm) < 1e-15 * z0n) {
          a = b = m;
          break;
        }
      }
      res.outcome = FlowOutcome::Closed;
      res.period = std::abs(t_prev + 0.5 * (a + b));
      return res;
    }
  }
  res.outcome = FlowOutcome::NonCompact;
  res.note = "no return within the integration budget";
  return res;
}

}  // namespace logsymp
