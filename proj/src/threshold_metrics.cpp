#include "adherence/threshold_metrics.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace adherence {

namespace {

double pow_int(double base, std::int64_t t) {
  return std::pow(base, static_cast<double>(t));
}

// F(p,z) and G(p,z) on the middle regime, t = tau(p, z).
void anchor_values(const PatientParams& pp, std::int64_t t, double& fp, double& gp) {
  const double bt = pow_int(pp.beta, t);
  const double denom = 1.0 - pp.beta * bt;  // 1 - beta^{t+1}
  fp = pp.r * (disc_passive_sum(pp, pp.p, t) + bt) / denom;
  gp = bt / denom;
}

}  // namespace

Regime classify_threshold(const PatientParams& params, const Threshold& z) {
  switch (z.kind()) {
    case Threshold::Kind::AlwaysActive:
      return {Regime::Kind::BelowP, 0};
    case Threshold::Kind::AlwaysPassive:
      return {Regime::Kind::AlwaysPassive, 0};
    default:
      break;
  }
  const double zv = z.value();
  if (zv < params.p) return {Regime::Kind::BelowP, 0};
  if (zv >= 1.0) return {Regime::Kind::AlwaysPassive, 0};
  if (zv >= params.z_inf) return {Regime::Kind::AboveZinf, 0};
  const CrossingTime t = crossing_time(params, params.p, zv);
  assert(t.has_value() && *t >= 1);
  return {Regime::Kind::Middle, *t};
}

MetricPair threshold_metrics(const PatientParams& params, double x, const Threshold& z) {
  const Regime regime = classify_threshold(params, z);
  const double r = params.r;
  const double beta = params.beta;
  const bool active = z.active_at(x);

  switch (regime.kind) {
    case Regime::Kind::BelowP: {
      if (active) return {r / (1.0 - beta), 1.0 / (1.0 - beta)};
      return {r * (1.0 / (1.0 - beta) - x), beta / (1.0 - beta)};
    }
    case Regime::Kind::Middle: {
      double fp, gp;
      anchor_values(params, regime.t, fp, gp);
      if (active) return {r + beta * fp, 1.0 + beta * gp};
      const CrossingTime s = crossing_time(params, x, z);
      assert(s.has_value() && *s >= 1);
      const double bs = pow_int(beta, *s);
      return {r * disc_passive_sum(params, x, *s) + bs * (r + beta * fp),
              bs * (1.0 + beta * gp)};
    }
    case Regime::Kind::AboveZinf: {
      if (active) return {r * (1.0 + beta * disc_passive_sum_inf(params, params.p)), 1.0};
      return {r * disc_passive_sum_inf(params, x), 0.0};
    }
    default:  // always passive
      return {r * disc_passive_sum_inf(params, x), 0.0};
  }
}

MetricPair marginal_metrics(const PatientParams& params, double x, const Threshold& z) {
  const Regime regime = classify_threshold(params, z);
  const double r = params.r;
  const double beta = params.beta;

  switch (regime.kind) {
    case Regime::Kind::BelowP:
      return {r * x, 1.0};
    case Regime::Kind::Middle: {
      double fp, gp;
      anchor_values(params, regime.t, fp, gp);
      const double kf = r + beta * fp;
      const double kg = 1.0 + beta * gp;
      if (z.active_at(x))
        return {r * (x - 1.0) + (1.0 - beta) * kf, (1.0 - beta) * kg};
      const CrossingTime s = crossing_time(params, x, z);
      assert(s.has_value() && *s >= 1);
      const double bs = pow_int(beta, *s);
      return {(1.0 - bs) * kf - r * disc_passive_sum(params, x, *s), (1.0 - bs) * kg};
    }
    case Regime::Kind::AboveZinf: {
      // Active branch applies only when both x and h(x) exceed z.
      if (z.active_at(x) && z.active_at(passive_step(params, x))) {
        const double kf = r * (1.0 + beta * disc_passive_sum_inf(params, params.p));
        return {r * (x - 1.0) + (1.0 - beta) * kf, 1.0 - beta};
      }
      return {r * x / (1.0 - beta * params.rho), 1.0};
    }
    default:  // always passive
      return {r * x / (1.0 - beta * params.rho), 1.0};
  }
}

double mp_metric(const PatientParams& params, double x, const Threshold& z) {
  if (z.active_at(x)) return params.r * x;
  const MetricPair m = marginal_metrics(params, x, z);
  assert(m.work > 0.0);
  return m.reward / m.work;
}

MetricPair truncated_oracle(const PatientParams& params, double x, const Threshold& z,
                            std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("truncated_oracle: horizon must be >= 1");
  double reward = 0.0;
  double work = 0.0;
  double discount = 1.0;
  double belief = x;
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (z.active_at(belief)) {
      reward += discount * params.r;
      work += discount;
      belief = params.p;
    } else {
      reward += discount * params.r * (1.0 - belief);
      belief = passive_step(params, belief);
    }
    discount *= params.beta;
  }
  return {reward, work};
}

}  // namespace adherence
