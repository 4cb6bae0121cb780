#pragma once

#include <cstdint>
#include <span>

#include "adherence/params.hpp"

namespace adherence {

/// Discounted reward/work of the z-threshold policy averaged over a uniform
/// initial belief on [0, 1].
struct UniformMetricPair {
  double reward;  ///< F averaged over the initial belief
  double work;    ///< G averaged over the initial belief; nonincreasing in z
};

/// Closed-form uniform-initial metrics, including the separately-handled
/// critical branch beta = rho (detected at |beta - rho| < 1e-9; the generic
/// branch cancels catastrophically there).
UniformMetricPair uniform_metrics(const PatientParams& params, const Threshold& z);

/// Initial-belief mode for the Lagrangian machinery.
struct InitialBelief {
  enum class Kind : std::uint8_t { Uniform, Fixed } kind;
  double x;  ///< meaningful for Fixed only (single-patient use)

  static InitialBelief uniform() { return {Kind::Uniform, 0.0}; }
  static InitialBelief fixed(double x) { return {Kind::Fixed, x}; }
};

/// Single-patient Lagrangian value at price lambda: the per-patient cost is
/// folded into the effective price cost + lambda before the threshold lookup,
/// and the optimal threshold's metrics are combined as F - (cost + lambda) G.
/// Convex and piecewise affine in lambda.
double patient_lagrangian(const PatientParams& params, double lambda,
                          const InitialBelief& initial);

/// Right derivative of the aggregate dual at lambda:
/// -sum_n G_n(z*_n(cost_n + lambda)) + M / (1 - beta). Nondecreasing in
/// lambda; O(N) per call. fixed_x0 supplies per-patient initial beliefs for
/// the fixed-initial mode (empty span selects the uniform mode).
double dual_derivative(std::span<const PatientParams> cohort, std::int64_t capacity,
                       double lambda, std::span<const double> fixed_x0 = {});

/// Outcome of the bisection dual-bound procedure.
struct DualResult {
  enum class Mode : std::uint8_t { AtZero, AtMax, Interior };
  double lambda_star = 0.0;      ///< reported minimizer estimate
  double bound = 0.0;            ///< rigorous bound: L at lambda_u on bracket stops
  double bound_midpoint = 0.0;   ///< L at lambda_star (equals bound otherwise)
  double bracket_width = 0.0;
  double derivative_at_star = 0.0;
  std::int64_t iterations = 0;
  Mode mode = Mode::AtZero;
};

/// Dual upper bound on the cohort value: endpoint checks at 0 and lambda_max,
/// then bisection on the sign of the right derivative until |L'| <= epsilon
/// or the bracket closes to epsilon. Total work O(N log(lambda_max/epsilon)).
/// Requires a common discount factor across the cohort; rejects epsilon <= 0
/// and empty cohorts.
DualResult dual_bound(std::span<const PatientParams> cohort, std::int64_t capacity,
                      double epsilon, std::span<const double> fixed_x0 = {});

}  // namespace adherence
