#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <cmath>
#include <numbers>

namespace oracle {

// pi * sum c_n t^n with c_0 = 1, c_{n+1} = c_n ((2n+1)/(2n+2))^2, summed until
// the tail bound drops below 1e-17 of the sum.
inline double hypergeometric_period_series(double t) {
  long double c = 1, sum = 1, tn = 1;
  for (int n = 0; n < 100000; ++n) {
    long double r = (2.0L * n + 1) / (2.0L * n + 2);
    c *= r * r;
    tn *= t;
    long double term = c * tn;
    sum += term;
    // remaining terms are bounded by term * t / (1 - t)
    if (term * t / (1 - t) < 1e-19L * sum) break;
  }
  return static_cast<double>(std::numbers::pi_v<long double> * sum);
}

// Closed-curve integral of dx / (2y) over the oval of y^2 = x(x-1)(x-t),
// written as 2 * int_0^{pi/2} dtheta / sqrt(1 - t sin^2 theta) (x = t sin^2 theta),
// by composite Simpson.
inline double oval_period_quadrature(double t, int panels = 20000) {
  const double a = 0, b = std::numbers::pi / 2;
  const double h = (b - a) / panels;
  auto f = [t](double th) {
    double s = std::sin(th);
    return 2.0 / std::sqrt(1 - t * s * s);
  };
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4 : 2);
  return sum * h / 3;
}

}  // namespace oracle
