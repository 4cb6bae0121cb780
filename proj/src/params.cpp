#include "adherence/params.hpp"

#include <stdexcept>
#include <string>

namespace adherence {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("PatientParams: ") + what);
}

}  // namespace

PatientParams::PatientParams(double p_, double q_, double r_, double beta_, double cost_)
    : p(p_), q(q_), r(r_), beta(beta_), cost(cost_) {
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
  require(r > 0.0, "r must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(cost >= 0.0, "cost must be nonnegative");
  require(1.0 - p > q, "1 - p > q (positive persistence) required");
  rho = 1.0 - p - q;
  z_inf = p / (p + q);
}

Threshold Threshold::finite(double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::invalid_argument("Threshold::finite: z must lie in [0, 1]");
  return Threshold(Kind::Finite, z);
}

}  // namespace adherence
