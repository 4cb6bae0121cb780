#include "adherence/whittle.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "adherence/rng.hpp"
#include "stieltjes.hpp"

namespace adherence {

namespace {

double pow_int(double base, std::int64_t t) {
  return std::pow(base, static_cast<double>(t));
}

// C_t = beta^{t+1} - beta + beta (1 - beta) Phi_t(p).
double middle_offset(const PatientParams& pp, std::int64_t t) {
  const double b = pp.beta;
  return pow_int(b, t + 1) - b + b * (1.0 - b) * disc_passive_sum(pp, pp.p, t);
}

// Middle-branch index value on [z_{t-1}, z_t).
double middle_index(const PatientParams& pp, std::int64_t t, double x) {
  const double b = pp.beta;
  return pp.r / (1.0 - b) * ((1.0 - pow_int(b, t + 1)) * x + middle_offset(pp, t));
}

double last_index(const PatientParams& pp, double x) {
  return pp.r * x / (1.0 - pp.beta * pp.rho);
}

// lambda_t = m(z_t); evaluated on the (t+1)-st branch whose interval the
// breakpoint opens.
double price_breakpoint(const PatientParams& pp, std::int64_t t) {
  return middle_index(pp, t + 1, state_breakpoint(pp, t));
}

}  // namespace

double mp_index_raw(const PatientParams& params, double x) {
  if (x < params.p) return params.r * x;
  if (x >= params.z_inf) return last_index(params, x);
  const CrossingTime t = crossing_time(params, params.p, x);
  assert(t.has_value() && *t >= 1);
  return middle_index(params, *t, x);
}

double mp_index(const PatientParams& params, double x) {
  return mp_index_raw(params, x) - params.cost;
}

std::int64_t default_table_depth(const PatientParams& params) {
  std::int64_t t = 1;
  double rt = params.rho;
  while (rt >= 1e-14 && t < kCrossingTimeCap) {
    rt *= params.rho;
    ++t;
  }
  return t;
}

IndexTable build_index_table(const PatientParams& params, std::int64_t t_max) {
  if (t_max < 1) throw std::invalid_argument("build_index_table: t_max must be >= 1");

  // Trim the depth to where the breakpoint prices are still numerically
  // distinguishable from each other and from the accumulation value.
  const double lambda_inf = last_index(params, params.z_inf);
  double prev_price = price_breakpoint(params, 0);
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double cur = price_breakpoint(params, t);
    if (!(cur > prev_price) || !(cur < lambda_inf)) {
      t_max = std::max<std::int64_t>(1, t - 1);
      break;
    }
    prev_price = cur;
  }

  IndexTable table{params, t_max, {}, {}, {}, {}, params.r / (1.0 - params.beta * params.rho)};

  table.state_breakpoints.reserve(static_cast<std::size_t>(t_max) + 4);
  table.state_breakpoints.push_back(0.0);
  for (std::int64_t t = 0; t <= t_max; ++t)
    table.state_breakpoints.push_back(state_breakpoint(params, t));
  table.state_breakpoints.push_back(params.z_inf);
  table.state_breakpoints.push_back(1.0);

  table.price_breakpoints.reserve(static_cast<std::size_t>(t_max) + 3);
  for (std::int64_t t = 0; t <= t_max; ++t)
    table.price_breakpoints.push_back(price_breakpoint(params, t));
  table.price_breakpoints.push_back(last_index(params, params.z_inf));
  table.price_breakpoints.push_back(table.lambda_max);

  // m(x) branches.
  table.index_branches.push_back({0.0, params.p, params.r, 0.0, 0});
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double lo = state_breakpoint(params, t - 1);
    const double hi = state_breakpoint(params, t);
    const double slope =
        params.r / (1.0 - params.beta) * (1.0 - pow_int(params.beta, t + 1));
    const double intercept = params.r / (1.0 - params.beta) * middle_offset(params, t);
    table.index_branches.push_back({lo, hi, slope, intercept, t});
  }
  table.index_branches.push_back(
      {params.z_inf, 1.0, params.r / (1.0 - params.beta * params.rho), 0.0, -1});

  // z*(lambda) branches.
  const double lambda_0 = table.price_breakpoints.front();
  table.threshold_branches.push_back({0.0, lambda_0, 1.0 / params.r, 0.0, 0});
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double lo = price_breakpoint(params, t - 1);
    const double hi = price_breakpoint(params, t);
    const double denom = 1.0 - pow_int(params.beta, t + 1);
    table.threshold_branches.push_back(
        {lo, hi, (1.0 - params.beta) / (params.r * denom), -middle_offset(params, t) / denom, t});
  }
  table.threshold_branches.push_back({last_index(params, params.z_inf), table.lambda_max,
                                      (1.0 - params.beta * params.rho) / params.r, 0.0, -1});

  if (index_continuity_residual(params, t_max) > 1e-8)
    throw std::runtime_error("build_index_table: branch continuity check failed");
  for (std::size_t i = 1; i < table.price_breakpoints.size(); ++i) {
    if (!(table.price_breakpoints[i] > table.price_breakpoints[i - 1]))
      throw std::runtime_error("build_index_table: price breakpoints not increasing");
  }
  return table;
}

double IndexTable::lookup_index(double x) const {
  if (x < params.p) return params.r * x - params.cost;
  if (x >= params.z_inf) return last_index(params, x) - params.cost;
  // Middle region: binary search over the tabulated branches; queries beyond
  // z_{t_max} land on the deepest branch.
  const auto first = index_branches.begin() + 1;
  const auto last = index_branches.end() - 1;  // exclude the [z_inf, 1] branch
  auto it = std::upper_bound(first, last, x,
                             [](double v, const IndexBranch& b) { return v < b.hi; });
  if (it == last) --it;
  return it->slope * x + it->intercept - params.cost;
}

Threshold optimal_threshold(const PatientParams& params, double lambda) {
  if (lambda < 0.0) return Threshold::always_active();
  const double lambda_max = params.r / (1.0 - params.beta * params.rho);
  if (lambda > lambda_max) return Threshold::always_passive();
  const double lambda_0 = params.r * params.p;
  if (lambda < lambda_0) return Threshold::finite(lambda / params.r);
  const double lambda_inf = last_index(params, params.z_inf);
  if (lambda >= lambda_inf) {
    const double z = (1.0 - params.beta * params.rho) * lambda / params.r;
    return Threshold::finite(std::clamp(z, params.z_inf, 1.0));
  }

  // Middle region: locate the branch t with lambda_{t-1} <= lambda < lambda_t
  // by exponential plus binary search on the breakpoint prices.
  std::int64_t lo = 0, hi = 1;
  while (price_breakpoint(params, hi) <= lambda) {
    lo = hi;
    hi *= 2;
    if (hi > kCrossingTimeCap)
      throw std::runtime_error("optimal_threshold: branch search exceeded cap");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (price_breakpoint(params, mid) <= lambda)
      lo = mid;
    else
      hi = mid;
  }
  const std::int64_t t = hi;
  const double denom = 1.0 - pow_int(params.beta, t + 1);
  const double z = ((1.0 - params.beta) * lambda / params.r - middle_offset(params, t)) / denom;
  return Threshold::finite(std::clamp(z, 0.0, 1.0));
}

ReachableSet reachable_set(const PatientParams& params, double x, double tol) {
  if (!(tol > 0.0 && tol < 1.0))
    throw std::invalid_argument("reachable_set: tol must lie in (0, 1)");
  ReachableSet set{x, {0.0, 1.0, params.z_inf}};
  const double scale =
      std::max(std::abs(x - params.z_inf), std::abs(params.p - params.z_inf));
  double rt = 1.0;
  for (std::int64_t t = 0; rt * scale >= tol && t <= kCrossingTimeCap; ++t, rt *= params.rho) {
    set.points.push_back(trajectory_point(params, x, t));
    set.points.push_back(state_breakpoint(params, t));
  }
  std::sort(set.points.begin(), set.points.end());
  auto last = std::unique(set.points.begin(), set.points.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; });
  set.points.erase(last, set.points.end());
  return set;
}

double index_continuity_residual(const PatientParams& params, std::int64_t t_max) {
  double worst = std::abs(params.r * params.p - middle_index(params, 1, params.p));
  for (std::int64_t t = 1; t <= t_max; ++t) {
    const double z_t = state_breakpoint(params, t);
    worst = std::max(worst,
                     std::abs(middle_index(params, t, z_t) - middle_index(params, t + 1, z_t)));
  }
  const double z_deep = state_breakpoint(params, t_max);
  worst = std::max(worst, std::abs(middle_index(params, t_max + 1, z_deep) -
                                   last_index(params, z_deep)));
  return worst;
}

VerificationReport verify_pcl(const PatientParams& params, const GridSpec& spec) {
  VerificationReport report;
  const double tol = spec.tolerance;

  // Condition 1: marginal work bounded below by 1 - beta on the grid,
  // sentinels included.
  double min_work = marginal_metrics(params, 0.0, Threshold::always_active()).work;
  for (int i = 0; i < spec.x_points; ++i) {
    const double x = static_cast<double>(i) / (spec.x_points - 1);
    min_work = std::min(min_work, marginal_metrics(params, x, Threshold::always_active()).work);
    min_work = std::min(min_work, marginal_metrics(params, x, Threshold::always_passive()).work);
    for (int j = 0; j < spec.z_points; ++j) {
      const double z = static_cast<double>(j) / (spec.z_points - 1);
      min_work = std::min(min_work, marginal_metrics(params, x, Threshold::finite(z)).work);
    }
  }
  report.min_marginal_work = min_work;
  report.positive_work_ok = min_work >= 1.0 - params.beta - 1e-12;

  // Condition 2: index nondecreasing on the x grid, branches continuous.
  double worst_mono = 0.0;
  double prev = mp_index_raw(params, 0.0);
  for (int i = 1; i < spec.x_points; ++i) {
    const double x = static_cast<double>(i) / (spec.x_points - 1);
    const double cur = mp_index_raw(params, x);
    worst_mono = std::max(worst_mono, prev - cur);
    prev = cur;
  }
  report.max_monotonicity_violation = worst_mono;
  std::int64_t depth = 1;
  const double shrink = std::max(params.rho, params.beta);
  for (double s = shrink; s >= 1e-12 && depth < 200000; s *= shrink) ++depth;
  report.max_continuity_residual = index_continuity_residual(params, depth);
  report.index_monotone_ok =
      worst_mono <= 1e-12 && report.max_continuity_residual <= tol;

  // Condition 3: F(x, z2) - F(x, z1) equals the index-weighted sum of the
  // work jumps over the reachable points in (z1, z2].
  SplitMix64 rng(spec.seed);
  double worst_residual = 0.0;
  for (int sample = 0; sample < spec.stieltjes_samples; ++sample) {
    const double x = rng.next_double();
    double z1 = rng.next_double();
    double z2 = rng.next_double();
    if (z1 > z2) std::swap(z1, z2);
    if (z1 == z2) continue;
    const double residual = detail::stieltjes_residual(
        params, x, z1, z2, [&](double c) { return mp_index_raw(params, c); },
        [&](double z) { return threshold_metrics(params, x, Threshold::finite(z)).reward; },
        [&](double z) { return threshold_metrics(params, x, Threshold::finite(z)).work; });
    worst_residual = std::max(worst_residual, residual);
  }
  report.max_integral_residual = worst_residual;
  report.integral_ok = worst_residual <= tol;
  return report;
}

MonotonicityReport sensitivity_p(const PatientParams& base, double x,
                                 std::span<const double> p_grid) {
  MonotonicityReport report;
  report.pass = true;
  std::vector<double> values;
  values.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0 - base.q))
      throw std::invalid_argument("sensitivity_p: p grid point outside (0, 1 - q)");
    values.push_back(mp_index_raw(PatientParams(p, base.q, base.r, base.beta), x));
  }
  if (values.size() < 2) return report;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(p_grid[i] < p_grid[i + 1]))
      throw std::invalid_argument("sensitivity_p: grid must be ascending");
    const double diff = values[i + 1] - values[i];
    double violation = std::max(0.0, diff - 1e-12);  // nonincreasing overall
    if (p_grid[i + 1] < x) {
      violation = std::max(violation, diff + 1e-12); // strict decrease required
    } else if (p_grid[i] >= x) {
      violation = std::max(violation, std::abs(diff) - 1e-12);  // exactly flat
    }
    ++report.checked_pairs;
    if (violation > 0.0) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, violation);
      report.pass = false;
    }
  }
  return report;
}

namespace {

enum class QBranch { First, FirstMiddle, Middle, Last };

QBranch classify_q_branch(const PatientParams& pp, double x, std::int64_t& t_out) {
  t_out = 0;
  if (x < pp.p) return QBranch::First;
  if (x >= pp.z_inf) return QBranch::Last;
  const CrossingTime t = crossing_time(pp, pp.p, x);
  t_out = *t;
  return *t <= 1 ? QBranch::FirstMiddle : QBranch::Middle;
}

}  // namespace

MonotonicityReport sensitivity_q(const PatientParams& base, double x,
                                 std::span<const double> q_grid) {
  MonotonicityReport report;
  report.pass = true;
  struct Point {
    double value;
    QBranch branch;
    std::int64_t t;
  };
  std::vector<Point> points;
  points.reserve(q_grid.size());
  for (double q : q_grid) {
    if (!(q > 0.0 && q < 1.0 - base.p))
      throw std::invalid_argument("sensitivity_q: q grid point outside (0, 1 - p)");
    const PatientParams pp(base.p, q, base.r, base.beta);
    std::int64_t t = 0;
    const QBranch branch = classify_q_branch(pp, x, t);
    points.push_back({mp_index_raw(pp, x), branch, t});
  }
  if (points.size() < 2) return report;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(q_grid[i] < q_grid[i + 1]))
      throw std::invalid_argument("sensitivity_q: grid must be ascending");
    const Point& a = points[i];
    const Point& b = points[i + 1];
    if (a.branch != b.branch) continue;  // cross-branch jumps not asserted
    if (a.branch == QBranch::Middle && a.t != b.t) continue;
    const double diff = b.value - a.value;
    double violation = 0.0;
    switch (a.branch) {
      case QBranch::First:
      case QBranch::FirstMiddle:
        violation = std::abs(diff) - 1e-12;
        break;
      case QBranch::Middle:
        violation = 1e-12 - diff;  // must increase
        break;
      case QBranch::Last:
        violation = diff + 1e-12;  // must decrease
        break;
    }
    ++report.checked_pairs;
    if (violation > 0.0) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, violation);
      report.pass = false;
    }
  }
  return report;
}

}  // namespace adherence
