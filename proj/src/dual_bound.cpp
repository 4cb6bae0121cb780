#include "adherence/dual_bound.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "adherence/dynamics.hpp"
#include "adherence/threshold_metrics.hpp"
#include "adherence/whittle.hpp"

namespace adherence {

namespace {

double pow_int(double base, std::int64_t t) {
  return std::pow(base, static_cast<double>(t));
}

// Uniform-initial metrics on the middle regime p <= z < z_inf.
UniformMetricPair uniform_middle(const PatientParams& pp, double z) {
  const double beta = pp.beta;
  const double rho = pp.rho;
  const double zi = pp.z_inf;

  const CrossingTime s_opt = crossing_time(pp, pp.p, z);
  assert(s_opt.has_value() && *s_opt >= 1);
  const std::int64_t s = *s_opt;
  const CrossingTime t_opt = crossing_time(pp, 0.0, z);
  assert(t_opt.has_value() && *t_opt >= 2);
  const std::int64_t t = *t_opt;

  const double bs = pow_int(beta, s);
  const double fp = pp.r * (disc_passive_sum(pp, pp.p, s) + bs) / (1.0 - beta * bs);
  const double gp = bs / (1.0 - beta * bs);
  const double kf = pp.r + beta * fp;
  const double kg = 1.0 + beta * gp;

  // S(z) = integral of beta^{tau(x,z)} over x in [0, 1].
  double big_s;
  if (std::abs(beta - rho) < 1e-9) {
    big_s = (1.0 - z) + pow_int(rho, t) * zi +
            (zi - z) * ((1.0 - rho) * static_cast<double>(t - 1) - rho);
  } else {
    big_s = (1.0 - z) + pow_int(beta, t) * zi +
            beta * (zi - z) * (1.0 - rho - (1.0 - beta) * pow_int(beta / rho, t - 1)) /
                (rho - beta);
  }

  // J(z) = integral of Phi_{tau(x,z)}(x) over x in [0, z], summed over the
  // slabs where tau is constant. x_k = h_k^{-1}(z).
  double j = 0.0;
  double x_prev = z;  // x_0
  for (std::int64_t k = 1; k <= t; ++k) {
    const double x_k = (k == t) ? 0.0 : zi + (z - zi) / pow_int(rho, k);
    const double len = x_prev - x_k;
    const double bk = pow_int(beta, k);
    const double brk = pow_int(beta * rho, k);
    const double b_coeff = (1.0 - brk) / (1.0 - beta * rho);
    const double a_coeff = (1.0 - bk) / (1.0 - beta) * (1.0 - zi) + b_coeff * zi;
    j += a_coeff * len - 0.5 * b_coeff * (x_prev * x_prev - x_k * x_k);
    x_prev = x_k;
  }

  return {pp.r * j + kf * big_s, kg * big_s};
}

}  // namespace

UniformMetricPair uniform_metrics(const PatientParams& params, const Threshold& z) {
  const Regime regime = classify_threshold(params, z);
  const double r = params.r;
  const double beta = params.beta;
  switch (regime.kind) {
    case Regime::Kind::BelowP: {
      const double zv = z.is_finite() ? z.value() : 0.0;  // always-active acts as z = 0
      return {r / (1.0 - beta) - 0.5 * r * zv * zv, 1.0 / (1.0 - beta) - zv};
    }
    case Regime::Kind::Middle:
      return uniform_middle(params, z.value());
    case Regime::Kind::AboveZinf: {
      const double zv = z.value();
      const double phi_int = zv * (1.0 - params.z_inf) / (1.0 - beta) +
                             (params.z_inf * zv - 0.5 * zv * zv) / (1.0 - beta * params.rho);
      const double kf = 1.0 + beta * disc_passive_sum_inf(params, params.p);
      return {r * (phi_int + (1.0 - zv) * kf), 1.0 - zv};
    }
    default:  // always passive
      return {r * ((1.0 - params.z_inf) / (1.0 - beta) +
                   (params.z_inf - 0.5) / (1.0 - beta * params.rho)),
              0.0};
  }
}

double patient_lagrangian(const PatientParams& params, double lambda,
                          const InitialBelief& initial) {
  const double price = params.cost + lambda;
  const Threshold z_star = optimal_threshold(params, price);
  if (initial.kind == InitialBelief::Kind::Uniform) {
    const UniformMetricPair m = uniform_metrics(params, z_star);
    return m.reward - price * m.work;
  }
  const MetricPair m = threshold_metrics(params, initial.x, z_star);
  return m.reward - price * m.work;
}

namespace {

void validate_cohort(std::span<const PatientParams> cohort, std::int64_t capacity,
                     std::span<const double> fixed_x0) {
  if (cohort.empty()) throw std::invalid_argument("dual bound: cohort must be nonempty");
  if (capacity < 0 || capacity > static_cast<std::int64_t>(cohort.size()))
    throw std::invalid_argument("dual bound: capacity must lie in [0, N]");
  for (const PatientParams& pp : cohort) {
    if (pp.beta != cohort.front().beta)
      throw std::invalid_argument("dual bound: cohort must share one discount factor");
  }
  if (!fixed_x0.empty() && fixed_x0.size() != cohort.size())
    throw std::invalid_argument("dual bound: fixed_x0 size must match cohort");
}

double patient_work(const PatientParams& pp, double lambda, std::span<const double> fixed_x0,
                    std::size_t n) {
  const double price = pp.cost + lambda;
  const Threshold z_star = optimal_threshold(pp, price);
  if (fixed_x0.empty()) return uniform_metrics(pp, z_star).work;
  return threshold_metrics(pp, fixed_x0[n], z_star).work;
}

double aggregate_value(std::span<const PatientParams> cohort, std::int64_t capacity,
                       double lambda, std::span<const double> fixed_x0) {
  double total = 0.0;
  for (std::size_t n = 0; n < cohort.size(); ++n) {
    const InitialBelief init = fixed_x0.empty() ? InitialBelief::uniform()
                                                : InitialBelief::fixed(fixed_x0[n]);
    total += patient_lagrangian(cohort[n], lambda, init);
  }
  return total + static_cast<double>(capacity) / (1.0 - cohort.front().beta) * lambda;
}

}  // namespace

double dual_derivative(std::span<const PatientParams> cohort, std::int64_t capacity,
                       double lambda, std::span<const double> fixed_x0) {
  validate_cohort(cohort, capacity, fixed_x0);
  double work_sum = 0.0;
  for (std::size_t n = 0; n < cohort.size(); ++n)
    work_sum += patient_work(cohort[n], lambda, fixed_x0, n);
  return -work_sum + static_cast<double>(capacity) / (1.0 - cohort.front().beta);
}

DualResult dual_bound(std::span<const PatientParams> cohort, std::int64_t capacity,
                      double epsilon, std::span<const double> fixed_x0) {
  validate_cohort(cohort, capacity, fixed_x0);
  if (!(epsilon > 0.0)) throw std::invalid_argument("dual bound: epsilon must be positive");

  double lambda_max = 0.0;
  for (const PatientParams& pp : cohort)
    lambda_max = std::max(lambda_max, pp.r / (1.0 - pp.beta * pp.rho));

  DualResult result;

  const double d0 = dual_derivative(cohort, capacity, 0.0, fixed_x0);
  if (d0 >= 0.0) {
    result.mode = DualResult::Mode::AtZero;
    result.lambda_star = 0.0;
    result.derivative_at_star = d0;
    result.bound = result.bound_midpoint = aggregate_value(cohort, capacity, 0.0, fixed_x0);
    return result;
  }
  const double dmax = dual_derivative(cohort, capacity, lambda_max, fixed_x0);
  if (dmax <= 0.0) {
    result.mode = DualResult::Mode::AtMax;
    result.lambda_star = lambda_max;
    result.derivative_at_star = dmax;
    result.bound = result.bound_midpoint =
        aggregate_value(cohort, capacity, lambda_max, fixed_x0);
    return result;
  }

  double lo = 0.0, hi = lambda_max;
  result.mode = DualResult::Mode::Interior;
  while (true) {
    ++result.iterations;
    const double mid = 0.5 * (lo + hi);
    const double d = dual_derivative(cohort, capacity, mid, fixed_x0);
    if (std::abs(d) <= epsilon) {
      result.lambda_star = mid;
      result.derivative_at_star = d;
      result.bracket_width = hi - lo;
      result.bound = result.bound_midpoint = aggregate_value(cohort, capacity, mid, fixed_x0);
      return result;
    }
    if (d < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= epsilon) {
      const double star = 0.5 * (lo + hi);
      result.lambda_star = star;
      result.derivative_at_star = dual_derivative(cohort, capacity, star, fixed_x0);
      result.bracket_width = hi - lo;
      // The upper bracket end gives the certificate; L is convex and each
      // pointwise evaluation is exact, so both values are valid bounds.
      result.bound = aggregate_value(cohort, capacity, hi, fixed_x0);
      result.bound_midpoint = aggregate_value(cohort, capacity, star, fixed_x0);
      return result;
    }
  }
}

}  // namespace adherence
