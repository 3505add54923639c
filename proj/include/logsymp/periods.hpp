#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "logsymp/polynomial.hpp"

namespace logsymp {

double agm(double a, double b);

// lambda_0(t) = pi F(1/2, 1/2; 1; t) = pi / AGM(1, sqrt(1 - t)), for 0 < t < 1.
double modular_period_elliptic(double t);
// Same value from the hypergeometric series, summed until the tail is below 1e-16.
double modular_period_series(double t);

struct FlowOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double max_time = 1e3;
  std::size_t max_steps = 2000000;
  double escape_radius = 1e4;
};

enum class FlowOutcome { Closed, NonCompact };

struct FlowPeriod {
  FlowOutcome outcome = FlowOutcome::NonCompact;
  double period = 0;  // absolute return time when closed
  std::size_t steps = 0;
  double max_drift = 0;  // largest |f| seen after projection
  std::array<double, 2> start{};
  std::string note;
};

/// First-return time of Z = f_y d_x - f_x d_y along the component of {f = 0}
/// through (the projection of) `seed`. The section is the line through the
/// start point orthogonal to Z there.
FlowPeriod modular_period_flow(const Polynomial& f, std::array<double, 2> seed, const FlowOptions& opt = {});

// Newton projection onto {f = 0} along the gradient.
std::array<double, 2> project_to_curve(const Polynomial& f, std::array<double, 2> p, int iterations = 8);

}  // namespace logsymp
