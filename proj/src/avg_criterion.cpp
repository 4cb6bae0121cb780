#include "adherence/avg_criterion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "adherence/dynamics.hpp"
#include "adherence/rng.hpp"
#include "adherence/threshold_metrics.hpp"
#include "stieltjes.hpp"

namespace adherence {

AvgMetricPair avg_metrics(const PatientParams& params, const Threshold& z) {
  const Regime regime = classify_threshold(params, z);
  switch (regime.kind) {
    case Regime::Kind::BelowP:
      return {params.r, 1.0};
    case Regime::Kind::Middle: {
      const double s = static_cast<double>(regime.t);
      const double cycle = s + 1.0;
      return {params.r * (1.0 + avg_passive_sum(params, params.p, regime.t)) / cycle,
              1.0 / cycle};
    }
    default:
      return {params.r * (1.0 - params.z_inf), 0.0};
  }
}

AvgMetricPair avg_marginal_metrics(const PatientParams& params, double x, const Threshold& z) {
  const Regime regime = classify_threshold(params, z);
  const double r = params.r;
  switch (regime.kind) {
    case Regime::Kind::BelowP:
      return {r * x, 1.0};
    case Regime::Kind::Middle: {
      const double cycle = static_cast<double>(regime.t) + 1.0;
      if (z.active_at(x))
        return {r * (x - 1.0) + avg_metrics(params, z).reward_rate, 1.0 / cycle};
      const CrossingTime tc = crossing_time(params, x, z);
      assert(tc.has_value() && *tc >= 1);
      const double t = static_cast<double>(*tc);
      const double g = t / cycle;
      const double f = r * (g * (1.0 + avg_passive_sum(params, params.p, regime.t)) -
                            avg_passive_sum(params, x, *tc));
      return {f, g};
    }
    default:
      return {r * (params.z_inf + (x - params.p) / (1.0 - params.rho)), 1.0};
  }
}

double avg_mp_index(const PatientParams& params, double x) {
  if (x < params.p) return params.r * x;
  if (x >= params.z_inf) return params.r * x / (1.0 - params.rho);
  const CrossingTime t = crossing_time(params, params.p, x);
  assert(t.has_value() && *t >= 1);
  const double td = static_cast<double>(*t);
  return params.r * ((td + 1.0) * x + avg_passive_sum(params, params.p, *t) - td);
}

namespace {

double avg_continuity_residual(const PatientParams& pp, std::int64_t depth) {
  const auto middle = [&](std::int64_t t, double x) {
    return pp.r *
           ((static_cast<double>(t) + 1.0) * x + avg_passive_sum(pp, pp.p, t) -
            static_cast<double>(t));
  };
  double worst = std::abs(pp.r * pp.p - middle(1, pp.p));
  for (std::int64_t t = 1; t <= depth; ++t) {
    const double z_t = state_breakpoint(pp, t);
    worst = std::max(worst, std::abs(middle(t, z_t) - middle(t + 1, z_t)));
  }
  const double z_deep = state_breakpoint(pp, depth);
  worst = std::max(worst,
                   std::abs(middle(depth + 1, z_deep) - pp.r * z_deep / (1.0 - pp.rho)));
  return worst;
}

}  // namespace

ApcliReport verify_apcli(const PatientParams& params, const GridSpec& spec) {
  ApcliReport report;
  VerificationReport& core = report.core;
  const double tol = spec.tolerance;

  // APCLI1: average marginal work strictly positive on the grid.
  double min_work = avg_marginal_metrics(params, 0.0, Threshold::always_active()).work_rate;
  for (int i = 0; i < spec.x_points; ++i) {
    const double x = static_cast<double>(i) / (spec.x_points - 1);
    min_work =
        std::min(min_work, avg_marginal_metrics(params, x, Threshold::always_active()).work_rate);
  }
  for (int i = 0; i < spec.x_points; ++i) {
    const double x = static_cast<double>(i) / (spec.x_points - 1);
    for (int j = 0; j < spec.z_points; ++j) {
      const double z = static_cast<double>(j) / (spec.z_points - 1);
      min_work = std::min(min_work, avg_marginal_metrics(params, x, Threshold::finite(z)).work_rate);
    }
  }
  core.min_marginal_work = min_work;
  core.positive_work_ok = min_work > 0.0;

  // APCLI2: index nondecreasing, branches continuous.
  double worst_mono = 0.0;
  double prev = avg_mp_index(params, 0.0);
  for (int i = 1; i < spec.x_points; ++i) {
    const double x = static_cast<double>(i) / (spec.x_points - 1);
    const double cur = avg_mp_index(params, x);
    worst_mono = std::max(worst_mono, prev - cur);
    prev = cur;
  }
  core.max_monotonicity_violation = worst_mono;
  // The seam against the last branch closes like (t+1) rho^t.
  std::int64_t depth = 1;
  for (double s = params.rho; (double(depth) + 1.0) * s >= 1e-11 && depth < 200000;
       s *= params.rho)
    ++depth;
  core.max_continuity_residual = avg_continuity_residual(params, depth);
  core.index_monotone_ok = worst_mono <= 1e-12 && core.max_continuity_residual <= tol;

  // APCLI3: same jump identity with the average metrics. They do not depend
  // on the initial belief, so the candidate stream from x only adds harmless
  // zero-jump points.
  SplitMix64 rng(spec.seed);
  double worst_residual = 0.0;
  for (int sample = 0; sample < spec.stieltjes_samples; ++sample) {
    const double x = rng.next_double();
    double z1 = rng.next_double();
    double z2 = rng.next_double();
    if (z1 > z2) std::swap(z1, z2);
    if (z1 == z2) continue;
    const double residual = detail::stieltjes_residual(
        params, x, z1, z2, [&](double c) { return avg_mp_index(params, c); },
        [&](double z) { return avg_metrics(params, Threshold::finite(z)).reward_rate; },
        [&](double z) { return avg_metrics(params, Threshold::finite(z)).work_rate; });
    worst_residual = std::max(worst_residual, residual);
  }
  core.max_integral_residual = worst_residual;
  core.integral_ok = worst_residual <= tol;

  // Abelian bridge: (1 - b) F_b and (1 - b) G_b approach the average rates,
  // with the worst grid residual shrinking along the beta ladder.
  const double betas[3] = {0.99, 0.999, 0.9999};
  for (int k = 0; k < 3; ++k) {
    const PatientParams bridged(params.p, params.q, params.r, betas[k], params.cost);
    double worst = 0.0;
    for (int j = 0; j < spec.z_points; ++j) {
      const double z = static_cast<double>(j) / (spec.z_points - 1);
      const Threshold thr = Threshold::finite(z);
      const AvgMetricPair avg = avg_metrics(params, thr);
      for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const MetricPair disc = threshold_metrics(bridged, x, thr);
        worst = std::max(worst, std::abs((1.0 - betas[k]) * disc.reward - avg.reward_rate));
        worst = std::max(worst, std::abs((1.0 - betas[k]) * disc.work - avg.work_rate));
      }
    }
    report.bridge_max_residual[k] = worst;
  }
  report.bridge_ok = report.bridge_max_residual[2] <= 1e-2 &&
                     report.bridge_max_residual[1] <= report.bridge_max_residual[0] + 1e-12 &&
                     report.bridge_max_residual[2] <= report.bridge_max_residual[1] + 1e-12;
  return report;
}

}  // namespace adherence
