#pragma once

// Internal helper for the Stieltjes jump-identity checks: the reward metric,
// as a function of the threshold, must change across (z1, z2] by the
// index-weighted sum of the work-metric jumps at the reachable points.
// Jump points below z_inf accumulate geometrically; the un-enumerated tail is
// folded into one telescope term weighted by the index at z_inf, which is
// exact up to O(rho^depth) because the index is continuous there.

#include <algorithm>
#include <cmath>
#include <vector>

#include "adherence/dynamics.hpp"
#include "adherence/params.hpp"

namespace adherence::detail {

template <class IndexFn, class RewardFn, class WorkFn>
double stieltjes_residual(const PatientParams& pp, double x, double z1, double z2,
                          IndexFn&& index_at, RewardFn&& reward_at, WorkFn&& work_at) {
  if (!(z1 < z2)) return 0.0;
  const double target = reward_at(z2) - reward_at(z1);

  // Candidate jump points strictly below z_inf and strictly above it. The
  // families are generated by the same passive_step iteration that decides
  // the crossing times at boundary thresholds, so every candidate matches its
  // jump location bitwise.
  std::vector<double> below, above;
  const double scale = std::max({std::abs(x - pp.z_inf), std::abs(pp.p - pp.z_inf), 1e-6});
  double rt = scale;
  const bool x_descends = x > pp.z_inf;
  double hx = x;
  double zt = pp.p;  // z_0
  for (std::int64_t t = 0; rt >= 1e-13 && t <= kCrossingTimeCap; ++t, rt *= pp.rho) {
    for (double c : {hx, zt}) {
      if (c <= z1 || c > z2) continue;
      if (c < pp.z_inf)
        below.push_back(c);
      else if (c > pp.z_inf)
        above.push_back(c);
    }
    const bool zt_done = zt > z2 || pp.z_inf <= z1;
    const bool hx_done =
        x_descends ? (hx <= z1 || pp.z_inf > z2) : (hx > z2 || pp.z_inf <= z1);
    if (zt_done && hx_done) break;
    hx = passive_step(pp, hx);
    zt = passive_step(pp, zt);
  }
  auto tidy = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());  // exact duplicates only
  };
  tidy(below);
  tidy(above);

  // The windows (prev, c] partition (z1, z2]; between candidates the work
  // metric is constant, so each term is exactly the jump at c. Inside the
  // cluster left of z_inf the candidates lie within 1e-12 of the remaining
  // atoms and the index is continuous, which bounds the weight error.
  double sum = 0.0;
  double prev = z1;
  double g_prev = work_at(z1);
  const auto take = [&](double c, double weight) {
    const double g_c = work_at(c);
    sum += weight * (g_c - g_prev);
    prev = c;
    g_prev = g_c;
  };
  for (double c : below) take(c, index_at(c));
  if (pp.z_inf > z1 && pp.z_inf <= z2) take(pp.z_inf, index_at(pp.z_inf));
  for (double c : above) take(c, index_at(c));
  if (prev < z2) take(z2, index_at(z2));
  return std::abs(target - sum);
}

}  // namespace adherence::detail
