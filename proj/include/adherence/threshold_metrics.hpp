#pragma once

#include <cstdint>

#include "adherence/dynamics.hpp"
#include "adherence/params.hpp"

namespace adherence {

/// Discounted reward/work pair. Used both for the threshold-policy metrics
/// F(x,z), G(x,z) and for the one-step-deviation marginals f(x,z), g(x,z);
/// range invariants are asserted in debug builds only.
struct MetricPair {
  double reward;
  double work;
};

/// Case of the piecewise closed forms that a threshold falls into.
struct Regime {
  enum class Kind : std::uint8_t { BelowP, Middle, AboveZinf, AlwaysPassive };
  Kind kind;
  std::int64_t t;  ///< crossing index tau(p, z); meaningful for Middle only
};

/// Classifies z into the unique regime: z < p, z_{t-1} <= z < z_t (Middle),
/// z_inf <= z < 1, or z >= 1 / always-passive.
Regime classify_threshold(const PatientParams& params, const Threshold& z);

/// Discounted reward and work (F(x,z), G(x,z)) of the z-threshold policy
/// started from belief x, by the per-regime closed forms.
MetricPair threshold_metrics(const PatientParams& params, double x, const Threshold& z);

/// Marginal reward and work (f(x,z), g(x,z)) of activating once at x and
/// following the z-threshold policy afterwards, versus staying passive once.
/// Satisfies g(x,z) >= 1 - beta everywhere.
MetricPair marginal_metrics(const PatientParams& params, double x, const Threshold& z);

/// Marginal productivity metric m(x,z) = f(x,z) / g(x,z); for x > z with
/// z < 1 the active-side shortcut r * x is returned.
double mp_metric(const PatientParams& params, double x, const Threshold& z);

/// Independent oracle: runs the deterministic belief recursion for `horizon`
/// steps and accumulates discounted reward and work. Truncation error is at
/// most max(r, 1) * beta^horizon / (1 - beta) componentwise.
MetricPair truncated_oracle(const PatientParams& params, double x, const Threshold& z,
                            std::int64_t horizon);

}  // namespace adherence
