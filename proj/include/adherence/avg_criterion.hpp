#pragma once

#include "adherence/params.hpp"
#include "adherence/verification.hpp"

namespace adherence {

/// Long-run per-period reward and work rates under a threshold policy.
struct AvgMetricPair {
  double reward_rate;  ///< in [0, r]
  double work_rate;    ///< in [0, 1]
};

/// Long-run average reward/work of the z-threshold policy (independent of the
/// initial belief): (r, 1) below p; the (s+1)-cycle averages on the middle
/// regime; (r (1 - z_inf), 0) at or above z_inf.
AvgMetricPair avg_metrics(const PatientParams& params, const Threshold& z);

/// Long-run average marginal reward/work of a one-step activation deviation.
AvgMetricPair avg_marginal_metrics(const PatientParams& params, double x, const Threshold& z);

/// Average-criterion MP index: r x on [0, p); r [(t+1) x + avg_passive_sum(p, t) - t]
/// on [z_{t-1}, z_t); r x / (1 - rho) on [z_inf, 1]. A conjecture-grade
/// priority rule: no optimality claim is attached to it.
double avg_mp_index(const PatientParams& params, double x);

/// Numeric check of the average-criterion analogues of the three
/// indexability conditions, plus the Abelian bridge
/// (1 - beta) F_beta -> F_avg along beta in {0.99, 0.999, 0.9999}.
ApcliReport verify_apcli(const PatientParams& params, const GridSpec& spec);

}  // namespace adherence
