#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adherence/params.hpp"
#include "adherence/threshold_metrics.hpp"
#include "adherence/verification.hpp"

namespace adherence {

/// Closed-form Whittle/MP index at belief x. Piecewise affine: r*x on [0, p),
/// the middle-branch form (r/(1-beta)) [(1-beta^{t+1}) x + C_t] on
/// [z_{t-1}, z_t) with t = tau(p, x), and r*x / (1 - beta*rho) on [z_inf, 1].
/// When params.cost > 0 the returned value is the cost-adjusted index
/// m(x) - cost.
double mp_index(const PatientParams& params, double x);

/// Raw index m(x) without the cost offset (the inverse of optimal_threshold).
double mp_index_raw(const PatientParams& params, double x);

/// One affine branch, valid on [lo, hi) of its input axis.
struct IndexBranch {
  double lo, hi;
  double slope, intercept;
  std::int64_t t;  ///< middle-branch crossing index; 0 first branch, -1 last
};

/// Breakpoints and per-branch affine coefficients of the index m and of the
/// optimal threshold map z*. Immutable after construction.
struct IndexTable {
  PatientParams params;
  std::int64_t t_max;
  /// [0, z_0 = p, z_1, ..., z_{t_max}, z_inf, 1]
  std::vector<double> state_breakpoints;
  /// [lambda_0, ..., lambda_{t_max}, lambda_inf, lambda_max]
  std::vector<double> price_breakpoints;
  std::vector<IndexBranch> index_branches;      ///< m(x) over x
  std::vector<IndexBranch> threshold_branches;  ///< z*(lambda) over lambda
  double lambda_max;

  /// Index lookup from the table; queries in [z_{t_max}, z_inf) fall back to
  /// the last tabulated middle branch (max error O(rho^{t_max})).
  double lookup_index(double x) const;
};

/// Smallest t with rho^t < 1e-14 (default table depth).
std::int64_t default_table_depth(const PatientParams& params);

/// Builds the table through t_max, trimming to the depth where consecutive
/// breakpoint prices remain distinguishable in double precision; throws
/// std::runtime_error if the branch continuity check at any breakpoint
/// exceeds 1e-8 (an implementation bug, not a data error).
IndexTable build_index_table(const PatientParams& params, std::int64_t t_max);

/// Optimal threshold map z*(lambda), the generalized inverse of the raw index:
/// lambda < 0 yields the always-active sentinel, lambda > lambda_max the
/// always-passive sentinel. Callers fold per-intervention costs into the
/// effective price before the lookup.
Threshold optimal_threshold(const PatientParams& params, double lambda);

/// Countable closed set that confines every threshold-policy trajectory from
/// x: {0, 1, z_inf} plus the passive iterates h_t(x) and breakpoints z_t,
/// enumerated until rho^t * max(|x - z_inf|, |p - z_inf|) < tol.
struct ReachableSet {
  double origin;
  std::vector<double> points;  ///< sorted, deduplicated at 1e-12
};

ReachableSet reachable_set(const PatientParams& params, double x, double tol);

/// Numeric check of the three indexability conditions on grids; returns a
/// failing report (never throws) when a residual exceeds spec.tolerance.
VerificationReport verify_pcl(const PatientParams& params, const GridSpec& spec);

/// Worst disagreement between adjacent index branches at their shared
/// breakpoints, scanning t = 1..t_max plus the p and z_inf seams.
double index_continuity_residual(const PatientParams& params, std::int64_t t_max);

/// Index response to the lapse probability p at fixed x: strictly decreasing
/// while p < x, exactly constant once p >= x. p_grid must be ascending and
/// inside (0, 1 - q).
MonotonicityReport sensitivity_p(const PatientParams& base, double x,
                                 std::span<const double> p_grid);

/// Index response to the recovery probability q at fixed x, asserted
/// branchwise: flat on the first branch and first middle branch, increasing
/// on middle branches t >= 2, decreasing on the last branch (q >= q_inf(x)).
/// q_grid must be ascending and inside (0, 1 - p).
MonotonicityReport sensitivity_q(const PatientParams& base, double x,
                                 std::span<const double> q_grid);

}  // namespace adherence
