#pragma once

#include <array>
#include <cstdint>

namespace adherence {

/// Grid/sampling configuration for the numeric indexability-condition suites.
struct GridSpec {
  int x_points = 100;
  int z_points = 100;
  int stieltjes_samples = 200;
  double tolerance = 1e-6;
  std::uint64_t seed = 0x51e17e5ULL;
};

/// Outcome of the three condition checks (positive marginal work, monotone
/// continuous index, Stieltjes jump identity). A failing check is reported,
/// not thrown.
struct VerificationReport {
  bool positive_work_ok = false;
  double min_marginal_work = 0.0;

  bool index_monotone_ok = false;
  double max_monotonicity_violation = 0.0;
  double max_continuity_residual = 0.0;

  bool integral_ok = false;
  double max_integral_residual = 0.0;

  bool pass() const { return positive_work_ok && index_monotone_ok && integral_ok; }
};

/// verify_apcli additionally checks the Abelian bridge between discounted and
/// long-run average metrics at beta in {0.99, 0.999, 0.9999}.
struct ApcliReport {
  VerificationReport core;
  bool bridge_ok = false;
  std::array<double, 3> bridge_max_residual = {0.0, 0.0, 0.0};

  bool pass() const { return core.pass() && bridge_ok; }
};

/// Result of a branchwise parameter-sensitivity check.
struct MonotonicityReport {
  bool pass = false;
  std::int64_t checked_pairs = 0;
  std::int64_t violations = 0;
  double max_violation = 0.0;
};

}  // namespace adherence
