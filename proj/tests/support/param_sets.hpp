#pragma once

// Canonical parameter sets shared by the unit and acceptance suites. They
// cover both orderings of p and q, discount factors up to 0.999, reward
// scales away from 1, and one set with beta equal to rho (the critical
// branch of the uniform-initial formulas).

#include <vector>

#include "adherence/params.hpp"

namespace testsupport {

inline const std::vector<adherence::PatientParams>& canonical_sets() {
  static const std::vector<adherence::PatientParams> sets = {
      {0.30, 0.20, 1.0, 0.95}, {0.03, 0.02, 1.0, 0.95},  // beta == rho
      {0.10, 0.05, 1.0, 0.99}, {0.35, 0.01, 1.0, 0.99},
      {0.01, 0.01, 1.0, 0.90}, {0.20, 0.30, 1.0, 0.95},
      {0.05, 0.05, 2.0, 0.99}, {0.30, 0.35, 1.0, 0.85},
      {0.01, 0.35, 1.0, 0.99}, {0.35, 0.35, 0.5, 0.95},
      {0.10, 0.20, 1.0, 0.999}, {0.25, 0.10, 3.0, 0.92},
  };
  return sets;
}

}  // namespace testsupport
