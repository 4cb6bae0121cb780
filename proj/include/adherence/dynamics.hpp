#pragma once

#include <cstdint>

#include "adherence/params.hpp"

namespace adherence {

/// Iteration cap for crossing-time searches. Reaching it means the threshold
/// sits within ~1e-12 of z_inf; treated as an internal error.
inline constexpr std::int64_t kCrossingTimeCap = 1'000'000;

/// One passive belief update h(x) = p + rho * x.
inline double passive_step(const PatientParams& params, double x) {
  return params.p + params.rho * x;
}

/// t-fold passive update h_t(x) = z_inf + (x - z_inf) * rho^t, exact closed
/// form; t = 0 returns x unchanged.
double trajectory_point(const PatientParams& params, double x, std::int64_t t);

/// First time the passive trajectory from x strictly exceeds the threshold.
/// Finite(0) when the policy is active immediately; disengaged (never) when
/// x <= z and z >= z_inf. The log/ceil formula is re-checked against the
/// iterate characterization h_{t-1}(x) <= z < h_t(x) to settle boundary cases.
CrossingTime crossing_time(const PatientParams& params, double x, const Threshold& z);

/// crossing_time for a finite threshold value.
CrossingTime crossing_time(const PatientParams& params, double x, double z);

/// Threshold breakpoints: z_{-1} = 0 and z_t = h_t(p) for t >= 0, strictly
/// increasing toward z_inf.
double state_breakpoint(const PatientParams& params, std::int64_t t);

/// Discounted passive sum Phi_t(x) = sum_{s<t} (1 - h_s(x)) beta^s.
double disc_passive_sum(const PatientParams& params, double x, std::int64_t t);

/// Infinite-horizon discounted passive sum Phi_inf(x).
double disc_passive_sum_inf(const PatientParams& params, double x);

/// Undiscounted passive sum  t (1 - z_inf) + (1 - rho^t) / (1 - rho) * (z_inf - x).
double avg_passive_sum(const PatientParams& params, double x, std::int64_t t);

}  // namespace adherence
