#pragma once

// Independent oracles used to freeze expected values: plain simulations and
// quadrature that never touch the closed forms they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "adherence/params.hpp"
#include "adherence/threshold_metrics.hpp"

namespace testsupport {

using adherence::MetricPair;
using adherence::PatientParams;
using adherence::Threshold;

/// Crossing time by stepping the passive recursion, capped.
inline std::optional<std::int64_t> brute_crossing(const PatientParams& pp, double x, double z,
                                                  std::int64_t cap = 20000) {
  if (x > z) return std::int64_t{0};
  if (z >= pp.z_inf) return std::nullopt;
  double belief = x;
  for (std::int64_t t = 1; t <= cap; ++t) {
    belief = pp.p + pp.rho * belief;
    if (belief > z) return t;
  }
  return std::nullopt;
}

/// Discounted passive sum by direct truncated summation.
inline double brute_disc_passive_sum(const PatientParams& pp, double x, std::int64_t terms) {
  double sum = 0.0;
  double discount = 1.0;
  double belief = x;
  for (std::int64_t s = 0; s < terms; ++s) {
    sum += discount * (1.0 - belief);
    belief = pp.p + pp.rho * belief;
    discount *= pp.beta;
  }
  return sum;
}

/// Marginal metrics as the difference of two truncated one-step-deviation
/// recursions (force the first action, then follow the threshold policy).
inline MetricPair brute_marginal(const PatientParams& pp, double x, const Threshold& z,
                                 std::int64_t horizon) {
  const MetricPair from_reset = adherence::truncated_oracle(pp, pp.p, z, horizon);
  const double h = pp.p + pp.rho * x;
  const MetricPair from_passive = adherence::truncated_oracle(pp, h, z, horizon);
  const double f = (pp.r + pp.beta * from_reset.reward) -
                   (pp.r * (1.0 - x) + pp.beta * from_passive.reward);
  const double g = (1.0 + pp.beta * from_reset.work) - pp.beta * from_passive.work;
  return {f, g};
}

/// Integrates x -> threshold_metrics(x, z) over [0, 1] by trapezoid on a grid
/// refined with the exact discontinuity locations (the metric is piecewise
/// affine in x between them, so the rule is exact up to roundoff).
inline MetricPair quadrature_uniform(const PatientParams& pp, const Threshold& z,
                                     int base_points = 2000) {
  std::vector<double> cuts = {0.0, 1.0};
  for (int i = 1; i < base_points; ++i)
    cuts.push_back(static_cast<double>(i) / base_points);
  if (z.is_finite()) {
    const double zv = z.value();
    cuts.push_back(zv);
    double xk = zv;  // preimages h_k^{-1}(z) while they stay in (0, z]
    for (int k = 0; k < 100000; ++k) {
      xk = (xk - pp.p) / pp.rho;
      if (!(xk > 0.0)) break;
      if (xk <= 1.0) cuts.push_back(xk);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double reward = 0.0;
  double work = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b - a < 1e-14) continue;
    const double eps = (b - a) * 1e-7;
    const MetricPair va = adherence::threshold_metrics(pp, a + eps, z);
    const MetricPair vb = adherence::threshold_metrics(pp, b - eps, z);
    reward += 0.5 * (va.reward + vb.reward) * (b - a);
    work += 0.5 * (va.work + vb.work) * (b - a);
  }
  return {reward, work};
}

/// Long-run average reward/work by simulating the threshold policy and
/// averaging over whole regeneration cycles (the post-reset cycle is exactly
/// periodic), or over the converged tail when no intervention ever happens.
inline MetricPair cycle_average(const PatientParams& pp, const Threshold& z,
                                std::int64_t periods = 100000) {
  double belief = pp.z_inf / 2.0;
  std::vector<double> rewards(static_cast<std::size_t>(periods));
  std::vector<std::uint8_t> actions(static_cast<std::size_t>(periods));
  std::int64_t first_reset = -1;
  for (std::int64_t t = 0; t < periods; ++t) {
    if (z.active_at(belief)) {
      rewards[static_cast<std::size_t>(t)] = pp.r;
      actions[static_cast<std::size_t>(t)] = 1;
      belief = pp.p;
      if (first_reset < 0) first_reset = t;
    } else {
      rewards[static_cast<std::size_t>(t)] = pp.r * (1.0 - belief);
      belief = pp.p + pp.rho * belief;
    }
  }
  std::int64_t start;
  std::int64_t span;
  if (first_reset < 0) {
    start = periods / 2;  // burned-in, belief numerically at the fixed point
    span = periods - start;
  } else {
    // Average over whole cycles following the first reset.
    std::int64_t second_reset = -1;
    for (std::int64_t t = first_reset + 1; t < periods; ++t) {
      if (actions[static_cast<std::size_t>(t)]) {
        second_reset = t;
        break;
      }
    }
    const std::int64_t cycle =
        second_reset > 0 ? second_reset - first_reset : periods - first_reset;
    start = first_reset + 1;
    const std::int64_t whole = (periods - start) / cycle;
    span = whole > 0 ? whole * cycle : periods - start;
  }
  double reward = 0.0;
  double work = 0.0;
  for (std::int64_t t = start; t < start + span; ++t) {
    reward += rewards[static_cast<std::size_t>(t)];
    work += actions[static_cast<std::size_t>(t)] ? 1.0 : 0.0;
  }
  return {reward / static_cast<double>(span), work / static_cast<double>(span)};
}

}  // namespace testsupport
